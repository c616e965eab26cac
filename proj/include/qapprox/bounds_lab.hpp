#pragma once

/**
 * @file
 * Rate formulas and lower-bound machinery for approximating J_pq^N and S_N:
 * rho(L, l, l'), spike families and their Condition (I) check, separation
 * certificates, the upper/lower bound evaluators, and the three-setting
 * comparison table. log means log2 throughout.
 */

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qapprox/lp_spaces.hpp"

namespace qapprox {

/// sqrt(L / |l - l'|) + min_{j in {l, l'}} sqrt(j (L - j)) / |l - l'|.
double rho_lb(double L, double l, double l_prime);

/// Named constants with defaults c = c0 = c1 = c2 = c_alg = 1, nu1 = nu2 = 24.
using Constants = std::map<std::string, double>;
Constants default_constants();

struct RateQuery {
  std::size_t n = 1;
  std::size_t N = 1;
  Exponent p = Exponent::finite(1.0);
  Exponent q = Exponent::infinity();
  Constants constants = default_constants();

  double constant(const std::string& name) const;
  void validate() const;
};

struct BoundReport {
  double upper = 0.0;
  double lower = 0.0;
  std::string regime;
  /// Polynomial part with logarithmic factors suppressed.
  double polynomial_rate = 0.0;
  std::vector<std::string> formulas;
  std::vector<std::string> guards;
};

/// Upper and lower bounds for e_n^q(J_pq^N, B(L_p^N)).
BoundReport bound_Jpq(const RateQuery& rq);

/// Bounds for e_n^q(S_N, B(L_p^N)); q is ignored. Out-of-regime n is
/// reported in `guards`.
BoundReport bound_SN(const RateQuery& rq);

/// log(N/n) + log log(n+1) + 2.
double lambda_nN(double n, double N);

/// c n^{-1} lambda^{3/2} log lambda, the refined p = 2 summation bound.
double summation_refined_upper(double n, double N, double c = 1.0);

/// min((N/n)^{2/p-2/q}, N^{1/p-1/q}) for p < q, 1 otherwise.
double theorem1_rate(std::size_t n, std::size_t N, Exponent p, Exponent q);

/// e_n(J_pq) >= e_{(nu1+2nu2)n}(J_{p,inf}) / (4 e_n(J_{q,inf})).
double reduction_lower_bound(double e_p_inf_scaled, double e_q_inf);

struct ComparisonRow {
  std::string setting;
  std::string deterministic;
  std::string randomized;
  std::string quantum;
};

enum class TableRegime { SmallBudget, LargeBudget, QAtMostP };

/// One row of the deterministic / randomized / quantum comparison.
ComparisonRow comparison_table(Exponent p, Exponent q, std::size_t n, std::size_t N);
ComparisonRow comparison_row(TableRegime regime);
std::vector<ComparisonRow> comparison_rows();

/// Numeric values of the three columns at (n, N).
struct NumericRates {
  double deterministic = 0.0;
  double randomized = 0.0;
  double quantum = 0.0;
};
NumericRates comparison_rates(Exponent p, Exponent q, std::size_t n, std::size_t N);

/// f_u = sum_j u_j psi_j for u in {0,1}^L.
struct AdversarialFamily {
  std::size_t N = 1;
  Exponent p = Exponent::finite(1.0);
  std::size_t l = 0;
  std::size_t l_prime = 1;
  std::vector<std::vector<double>> psi;  // L functions on [0, N)

  std::size_t L() const { return psi.size(); }
  std::vector<double> f(const std::vector<std::uint8_t>& u) const;
};

/// Spike family psi_j = scale (l+1)^{-1/p} N^{1/p} e_j, levels (l, l+1),
/// L = N. Throws ValidationError when f_u leaves B(L_p^N) for |u| in {l, l+1}.
AdversarialFamily build_family(std::size_t N, Exponent p, std::size_t l, double scale = 1.0);

struct ConditionReport {
  bool pass = true;
  bool exhaustive = false;
  /// controlling[t] = bit index deciding f_u(t), or L when f_u(t) is constant.
  std::vector<std::size_t> controlling;
  struct Witness {
    std::size_t t = 0;
    std::vector<std::uint8_t> u;
    std::vector<std::uint8_t> u_prime;
  };
  std::optional<Witness> witness;
};

/// Checks that every f_u(t) depends on a single bit of u. Exhaustive over
/// {0,1}^L for L <= 16, otherwise `samples` random pairs per point.
ConditionReport condition_I_check(const AdversarialFamily& family, std::size_t samples = 256,
                                  std::uint64_t seed = 1);

struct Certificate {
  bool applicable = false;
  double value = 0.0;        // 1/2 min separation in L_q^N
  double rho = 0.0;
  double threshold = 0.0;    // c0 rho
  std::string method;        // "closed-form" or "enumeration"
};

/// 1/2 min{||f_u - f_u'||_q : |u| = l, |u'| = l'} when n <= c0 rho(L, l, l').
Certificate lemma9_certificate(const AdversarialFamily& family, std::size_t n, double c0,
                               Exponent q = Exponent::infinity());

/// Least-squares slope alpha of log(ratio) on log(log(N + n)) (clamped at 0)
/// and C = max ratio / log(N+n)^alpha.
struct EnvelopeFit {
  double C = 0.0;
  double alpha = 0.0;
  std::size_t points = 0;
  double max_ratio = 0.0;
};
EnvelopeFit fit_envelope(Exponent p, Exponent q, const std::vector<std::size_t>& grid,
                         const Constants& constants = default_constants());

/// "p,q,n,N,regime,upper,lower,det_rate,rand_rate,quantum_rate".
std::string bounds_csv_header();
std::string bounds_csv_row(const RateQuery& rq);

}  // namespace qapprox
