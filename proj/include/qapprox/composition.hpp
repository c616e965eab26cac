#pragma once

/**
 * @file
 * Two-stage composition: an algorithm for the embedding J (stage 1) followed
 * by an algorithm for a linear operator S on B(X) (stage 2) that is run on
 * the rescaled residual h_{f,x} instead of f.
 *
 * X is L_p^N with spike separating functions g_t = e_t. Stage-2 registers are
 * widened to [i | z | u | x | v], where x holds the stage-1 outcomes and v is
 * an m*-qubit ancilla that carries beta(f(t)) between the two copies of the
 * modified query.
 */

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qapprox/lp_spaces.hpp"
#include "qapprox/query_model.hpp"

namespace qapprox {

struct LinearOperator {
  std::function<Element(const Element&)> apply;
  /// Upper bound on the operator norm X -> G.
  double norm_bound = 1.0;
  std::string name;

  /// The mean S_N f = (1/N) sum f(i) into R; its norm on any L_p^N is 1.
  static LinearOperator mean();
};

struct CompositionPlan {
  MeasuredAlgorithm stage1;  // approximates J on F, outputs points of X
  MeasuredAlgorithm stage2;  // approximates S on B(X)
  LinearOperator S;
  std::size_t N = 1;
  Exponent p = Exponent::finite(1.0);
  double sigma = 1.0;
  double delta = 1.0;
  int m_star = 2;
  std::vector<std::size_t> query_points;  // D_A, sorted
  double M1 = 0.0;                        // max ||g_t||_X
  double M2 = 0.0;                        // max |f(t)| over witnesses, t in D_A
  /// Qubit counts of the stage-1 stages; their sum is the x-register width.
  std::vector<int> stage1_widths;

  int x_width() const;
  void validate() const;
};

/// D_A: every domain point queried by some stage of `a`.
std::vector<std::size_t> query_points(const MeasuredAlgorithm& a);

/// Smallest even m* >= 2 with 2^{-m*/2} <= delta / (M1 |D_A|) and
/// M2 < 2^{m*/2 - 1}, so that |a - gamma(beta(a))| <= delta / (M1 |D_A|).
int choose_m_star(double M1, std::size_t domain_count, double delta, double M2);

struct PlanInputs {
  MeasuredAlgorithm stage1;
  MeasuredAlgorithm stage2;
  LinearOperator S;
  std::size_t N = 1;
  Exponent p = Exponent::finite(1.0);
  std::vector<InputFunction> witnesses;  // the finite input class F
  double theta1 = 0.25;
  double delta = 0.25;
};

struct PlannedComposition {
  CompositionPlan plan;
  double e_J = 0.0;  // e(J, stage1, F, theta1), exact over the witnesses
};

/// Computes e_J, sigma = e_J + 2 delta, D_A, M1, M2 and m*.
PlannedComposition make_plan(PlanInputs inputs);

/// sigma^{-1}(a - b); shared by residual_function and the V_l register map
/// so that both produce bit-identical values.
double residual_value(double encoded_f, double phi_x_at_t, double sigma);

/// The stage-1 output element for the concatenated outcome register value.
Element stage1_output(const CompositionPlan& plan, BasisIndex x_register);

/// h_{f,x} = sigma^{-1}(f - phi~(x) + sum_{t in D_A}(gamma beta f(t) - f(t)) g_t).
InputFunction residual_function(const InputFunction& f, OutcomeSpan x,
                                const CompositionPlan& plan);

/// Register maps of one modified query, on m_l + x_width + m* qubits.
struct ModifiedQueryParts {
  StructuredUnitary P;      // [i|z|u|x|v] -> [i|v|z|u|x]
  StructuredUnitary P_inv;
  StructuredUnitary V;
  StructuredUnitary W;
  QuerySpec Q_bar;          // value register v of width m*, read in the P-frame
};

ModifiedQueryParts modified_query_parts(std::size_t l, const CompositionPlan& plan);

/// P^{-1} Qbar P W V P^{-1} Qbar P (applied right to left) as one unitary,
/// with Qbar bound to f. Acts as Q_{l,h_{f,x}} (x) I on states |.>|x>|0>.
StructuredUnitary build_modified_query(std::size_t l, const CompositionPlan& plan,
                                       const InputFunction& f);

/// The composed algorithm B: k~ + k stages and n~ + 2n queries.
MeasuredAlgorithm compose(const CompositionPlan& plan);

struct MultiplicativeBound {
  double bound = 0.0;
  std::uint64_t queries = 0;
};

/// 4 e_J e_S with query count nu1 n~ + 2 nu2 n. Throws DomainError unless
/// e^{-nu1/8} + e^{-nu2/8} - e^{-(nu1+nu2)/8} <= 1/4.
MultiplicativeBound multiplicative_bound(double e_J, double e_S, std::size_t nu1,
                                         std::size_t nu2, std::uint64_t n_tilde = 0,
                                         std::uint64_t n = 0);

/// Left side of the side condition above.
double side_condition(std::size_t nu1, std::size_t nu2);

struct ErrorChainReport {
  double e_J = 0.0;
  double e_S = 0.0;  // sup of e(S, A, h, theta2) over the in-ball residuals met
  double measured = 0.0;  // sup over witnesses of e(SJ, B, f, theta1+theta2-theta1 theta2)
  double bound = 0.0;     // ||S|| delta + (e_J + 2 delta)(e_S + delta)
  std::uint64_t declared_queries = 0;
  std::uint64_t expected_queries = 0;  // n~ + 2n
  bool queries_ok = false;
  bool chain_ok = false;
};

/// Exact check of the error chain on a finite witness class.
ErrorChainReport verify_error_chain(const PlannedComposition& planned,
                                    const std::vector<InputFunction>& witnesses,
                                    double theta1, double theta2);

/// Toy instance: N = 4, X = L_1^4, S = mean, F = two inputs told apart by one
/// single-bit query, stage 2 a one-query estimator of the mean.
PlanInputs toy_plan_inputs(double delta = 0.25);

/// Seeded variation of the toy: random inputs and split point, a stage 1 that
/// fails with probability in {0, 0.1, 0.2, 0.3}, 1..4 stage-2 reads at width 2
/// or 4, and delta in {0.25, 0.5}.
PlanInputs random_toy_plan_inputs(std::uint64_t seed);

}  // namespace qapprox
