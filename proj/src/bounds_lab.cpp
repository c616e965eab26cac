#include "qapprox/bounds_lab.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <limits>
#include <numeric>
#include <random>

#include "qapprox/errors.hpp"
#include "qapprox/format.hpp"

namespace qapprox {

namespace {

double lg(double x) { return std::log2(x); }

/// log(n / sqrt(N) + 2), always >= 1.
double search_log(double n, double N) { return lg(n / std::sqrt(N) + 2.0); }

double pow_or_one(double base, double e) { return e == 0.0 ? 1.0 : std::pow(base, e); }

std::string exponent_str(Exponent e) { return e.str(); }

}  // namespace

double rho_lb(double L, double l, double l_prime) {
  if (l == l_prime) throw DomainError("rho_lb needs l != l'");
  if (l < 0 || l_prime < 0 || l > L || l_prime > L) {
    throw DomainError("rho_lb needs 0 <= l, l' <= L");
  }
  const double gap = std::abs(l - l_prime);
  const double m = std::min(std::sqrt(l * (L - l)), std::sqrt(l_prime * (L - l_prime)));
  return std::sqrt(L / gap) + m / gap;
}

Constants default_constants() {
  return {{"c", 1.0},   {"c0", 1.0},   {"c1", 1.0},   {"c2", 1.0},
          {"c_alg", 1.0}, {"nu1", 24.0}, {"nu2", 24.0}};
}

double RateQuery::constant(const std::string& name) const {
  const auto it = constants.find(name);
  if (it != constants.end()) return it->second;
  const auto defaults = default_constants();
  const auto d = defaults.find(name);
  if (d == defaults.end()) throw DomainError("unknown constant '" + name + "'");
  return d->second;
}

void RateQuery::validate() const {
  if (n < 1 || N < 1) throw DomainError("rate queries need n, N >= 1");
  for (const auto& [k, v] : constants) {
    if (!(v > 0.0)) throw DomainError("constant '" + k + "' must be positive");
  }
}

double theorem1_rate(std::size_t n, std::size_t N, Exponent p, Exponent q) {
  if (!(p < q)) return 1.0;
  const double e = p.reciprocal() - q.reciprocal();
  const double Nd = static_cast<double>(N);
  return std::min(std::pow(Nd / static_cast<double>(n), 2.0 * e), std::pow(Nd, e));
}

BoundReport bound_Jpq(const RateQuery& rq) {
  rq.validate();
  BoundReport r;
  const double n = static_cast<double>(rq.n);
  const double N = static_cast<double>(rq.N);
  const double ip = rq.p.reciprocal();
  const double iq = rq.q.reciprocal();
  const double c = rq.constant("c");
  const double c0 = rq.constant("c0");
  const double c1 = rq.constant("c1");
  const double c2 = rq.constant("c2");
  r.polynomial_rate = theorem1_rate(rq.n, rq.N, rq.p, rq.q);

  if (rq.p < rq.q) {
    r.regime = n <= c0 * std::sqrt(N) ? "n<=sqrt(N)" : "sqrt(N)<n<=cN";
    const double e = ip - iq;
    r.upper = c * std::min(std::pow(N / n * search_log(n, N), 2.0 * e), std::pow(N, e));
    r.formulas.push_back("upper: c min((N/n log(n/sqrt(N)+2))^{2/p-2/q}, N^{1/p-1/q})");
    r.lower = c1 * std::min(std::pow(N / n, 2.0 * e) * pow_or_one(search_log(n, N), -2.0 * iq),
                            std::pow(N, e));
    r.formulas.push_back("lower: c1 min((N/n)^{2/p-2/q} log(n/sqrt(N)+2)^{-2/q}, N^{1/p-1/q})");
    if (rq.q.is_infinite()) {
      const double l3 = c2 * std::min(std::pow(N / n, 2.0 * ip), std::pow(N, ip));
      r.formulas.push_back("lower: c2 min((N/n)^{2/p}, N^{1/p})");
      r.lower = std::max(r.lower, l3);
    }
  } else {
    r.regime = "p>=q";
    r.upper = 1.0;
    r.formulas.push_back("upper: 1");
    if (rq.q < rq.p) {
      r.lower = c1 * pow_or_one(lg(N) + 1.0, -2.0 * iq);
      r.formulas.push_back("lower: c1 (log N + 1)^{-2/q}");
    } else {
      // p = q: the p <= q form with exponent 2/p - 2/q = 0
      r.lower = c1 * std::min(pow_or_one(search_log(n, N), -2.0 * iq), 1.0);
      r.formulas.push_back("lower: c1 min(log(n/sqrt(N)+2)^{-2/q}, 1)");
    }
  }
  if (n > c0 * N) r.guards.push_back("n > c0 N: outside the range of the lower bounds");

  // summation-based lower forms, any p
  if (N > 4.0) {
    double l7 = 0.0;
    if (rq.q.is_infinite() || rq.q.value() > 2.0) {
      l7 = c1;
      r.formulas.push_back("lower: c1 (q > 2)");
    } else if (rq.q.value() == 2.0) {
      if (N >= 16.0) {
        l7 = c1 * std::pow(lg(lg(N)), -1.5) / lg(lg(lg(N)));
        r.formulas.push_back("lower: c1 (log log N)^{-3/2} (log log log N)^{-1}");
      } else {
        r.guards.push_back("q = 2 iterated-log form skipped: needs N >= 16");
      }
    } else {
      l7 = c1 * std::pow(lg(N), 1.0 - 2.0 * iq);
      r.formulas.push_back("lower: c1 (log N)^{1-2/q} (q < 2)");
    }
    r.lower = std::max(r.lower, l7);
  } else {
    r.guards.push_back("summation-based lower forms skipped: need N > 4");
  }
  return r;
}

double lambda_nN(double n, double N) {
  if (!(n >= 1.0) || !(N >= n)) throw DomainError("lambda(n, N) needs 1 <= n <= N");
  return lg(N / n) + lg(lg(n + 1.0)) + 2.0;
}

double summation_refined_upper(double n, double N, double c) {
  const double lam = lambda_nN(n, N);
  return c / n * std::pow(lam, 1.5) * lg(lam);
}

BoundReport bound_SN(const RateQuery& rq) {
  rq.validate();
  BoundReport r;
  const double n = static_cast<double>(rq.n);
  const double N = static_cast<double>(rq.N);
  const double c0 = rq.constant("c0");
  const double c1 = rq.constant("c1");
  const double c2 = rq.constant("c2");
  const bool in_regime = n > 2.0 && n <= c0 * N;
  r.regime = in_regime ? "2<n<=c0N" : "outside";
  if (!in_regime) r.guards.push_back("n outside (2, c0 N]: summation bounds not asserted");

  const bool p_above_2 = rq.p.is_infinite() || rq.p.value() > 2.0;
  if (p_above_2) {
    r.lower = c1 / n;
    r.upper = c2 / n;
    r.polynomial_rate = 1.0 / n;
    r.formulas = {"lower: c1 n^{-1}", "upper: c2 n^{-1}"};
  } else if (rq.p.value() == 2.0) {
    r.lower = c1 / n;
    r.polynomial_rate = 1.0 / n;
    r.formulas.push_back("lower: c1 n^{-1}");
    r.upper = std::numeric_limits<double>::infinity();
    if (n > 2.0) {
      r.upper = c2 / n * std::pow(lg(n), 1.5) * lg(lg(n));
      r.formulas.push_back("upper: c2 n^{-1} log^{3/2} n log log n");
    }
    if (n <= N) {
      r.upper = std::min(r.upper, summation_refined_upper(n, N, rq.constant("c")));
      r.formulas.push_back("upper: c n^{-1} lambda^{3/2} log lambda");
    }
  } else {
    const double ip = rq.p.reciprocal();
    const double poly = std::min(std::pow(n, -2.0 * (1.0 - ip)),
                                 std::pow(n, -2.0 * ip) * std::pow(N, 2.0 * ip - 1.0));
    r.polynomial_rate = poly;
    r.lower = c1 * poly;
    r.upper = c2 * poly * std::pow(search_log(n, N), 2.0 * ip - 1.0);
    r.formulas = {"lower: c1 min(n^{-2(1-1/p)}, n^{-2/p} N^{2/p-1})",
                  "upper: c2 min(n^{-2(1-1/p)}, n^{-2/p} N^{2/p-1}) log(n/sqrt(N)+2)^{2/p-1}"};
  }
  return r;
}

double reduction_lower_bound(double e_p_inf_scaled, double e_q_inf) {
  if (!(e_q_inf > 0.0)) throw DomainError("reduction needs e_n(J_{q,inf}) > 0");
  return e_p_inf_scaled / (4.0 * e_q_inf);
}

ComparisonRow comparison_row(TableRegime regime) {
  switch (regime) {
    case TableRegime::SmallBudget:
      return {"1 <= p < q <= inf, n <= sqrt(N)", "N^{1/p-1/q}", "N^{1/p-1/q}", "N^{1/p-1/q}"};
    case TableRegime::LargeBudget:
      return {"1 <= p < q <= inf, n > sqrt(N)", "N^{1/p-1/q}", "N^{1/p-1/q}",
              "(N/n)^{2/p-2/q}"};
    case TableRegime::QAtMostP:
      return {"1 <= q <= p <= inf", "1", "1", "1"};
  }
  return {};
}

std::vector<ComparisonRow> comparison_rows() {
  return {comparison_row(TableRegime::SmallBudget), comparison_row(TableRegime::LargeBudget),
          comparison_row(TableRegime::QAtMostP)};
}

namespace {
TableRegime table_regime(Exponent p, Exponent q, std::size_t n, std::size_t N) {
  if (!(p < q)) return TableRegime::QAtMostP;
  const double nd = static_cast<double>(n);
  return nd * nd <= static_cast<double>(N) ? TableRegime::SmallBudget
                                           : TableRegime::LargeBudget;
}
}  // namespace

ComparisonRow comparison_table(Exponent p, Exponent q, std::size_t n, std::size_t N) {
  return comparison_row(table_regime(p, q, n, N));
}

NumericRates comparison_rates(Exponent p, Exponent q, std::size_t n, std::size_t N) {
  const TableRegime regime = table_regime(p, q, n, N);
  if (regime == TableRegime::QAtMostP) return {1.0, 1.0, 1.0};
  const double e = p.reciprocal() - q.reciprocal();
  const double classical = std::pow(static_cast<double>(N), e);
  const double quantum =
      regime == TableRegime::SmallBudget
          ? classical
          : std::pow(static_cast<double>(N) / static_cast<double>(n), 2.0 * e);
  return {classical, classical, quantum};
}

std::vector<double> AdversarialFamily::f(const std::vector<std::uint8_t>& u) const {
  if (u.size() != L()) throw StructuralError("bit vector length differs from L");
  std::vector<double> out(N, 0.0);
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (!u[j]) continue;
    for (std::size_t t = 0; t < N; ++t) out[t] += psi[j][t];
  }
  return out;
}

AdversarialFamily build_family(std::size_t N, Exponent p, std::size_t l, double scale) {
  if (N < 1) throw DomainError("build_family needs N >= 1");
  if (l + 1 > N) throw DomainError("build_family needs l + 1 <= N");
  if (!(scale > 0.0)) throw DomainError("build_family needs scale > 0");
  AdversarialFamily fam;
  fam.N = N;
  fam.p = p;
  fam.l = l;
  fam.l_prime = l + 1;
  const double height = scale * std::pow(static_cast<double>(l + 1), -p.reciprocal()) *
                        std::pow(static_cast<double>(N), p.reciprocal());
  fam.psi.assign(N, std::vector<double>(N, 0.0));
  for (std::size_t j = 0; j < N; ++j) fam.psi[j][j] = height;
  // equal heights and disjoint supports: one representative per level suffices
  for (std::size_t level : {fam.l, fam.l_prime}) {
    std::vector<std::uint8_t> u(N, 0);
    for (std::size_t j = 0; j < level; ++j) u[j] = 1;
    const double norm = lp_norm(fam.f(u), p);
    if (norm > 1.0 + 1e-12) {
      throw ValidationError("family member with |u| = " + std::to_string(level) +
                            " has norm " + format_number(norm) + " > 1");
    }
  }
  return fam;
}

ConditionReport condition_I_check(const AdversarialFamily& family, std::size_t samples,
                                  std::uint64_t seed) {
  const std::size_t L = family.L();
  const std::size_t N = family.N;
  ConditionReport rep;
  rep.controlling.assign(N, L);
  rep.exhaustive = L <= 16;
  std::mt19937_64 rng(seed);

  auto bits_of = [L](std::uint64_t u) {
    std::vector<std::uint8_t> v(L);
    for (std::size_t j = 0; j < L; ++j) v[j] = static_cast<std::uint8_t>((u >> j) & 1U);
    return v;
  };

  for (std::size_t t = 0; t < N; ++t) {
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j < L; ++j)
      if (family.psi[j][t] != 0.0) nz.push_back(j);
    if (nz.empty()) continue;  // constant zero at t
    const std::size_t candidate = nz.front();
    auto value = [&](const std::vector<std::uint8_t>& u) {
      double s = 0.0;
      for (std::size_t j : nz) s += u[j] ? family.psi[j][t] : 0.0;
      return s;
    };
    if (rep.exhaustive) {
      const std::uint64_t count = std::uint64_t{1} << L;
      std::vector<double> vals(count);
      for (std::uint64_t u = 0; u < count; ++u) {
        double s = 0.0;
        for (std::size_t j : nz)
          if ((u >> j) & 1U) s += family.psi[j][t];
        vals[u] = s;
      }
      std::size_t found = L;
      for (std::size_t j = 0; j < L && found == L; ++j) {
        bool ok = true;
        double ref[2] = {0.0, 0.0};
        bool seen[2] = {false, false};
        for (std::uint64_t u = 0; u < count && ok; ++u) {
          const int b = static_cast<int>((u >> j) & 1U);
          if (!seen[b]) {
            seen[b] = true;
            ref[b] = vals[u];
          } else if (vals[u] != ref[b]) {
            ok = false;
          }
        }
        if (ok) found = j;
      }
      if (found < L) {
        rep.controlling[t] = found;
        continue;
      }
      rep.pass = false;
      // witness for the natural candidate bit: same u_candidate, different value
      for (std::uint64_t u = 0; u < count && !rep.witness; ++u) {
        if ((u >> candidate) & 1U) continue;
        for (std::uint64_t v = u + 1; v < count; ++v) {
          if (((v >> candidate) & 1U) == 0 && vals[v] != vals[u]) {
            rep.witness = ConditionReport::Witness{t, bits_of(u), bits_of(v)};
            break;
          }
        }
      }
      return rep;
    }
    // sampled: random pairs agreeing in the candidate bit
    std::bernoulli_distribution coin(0.5);
    for (std::size_t s = 0; s < samples; ++s) {
      std::vector<std::uint8_t> u(L), v(L);
      for (std::size_t j = 0; j < L; ++j) {
        u[j] = coin(rng);
        v[j] = coin(rng);
      }
      v[candidate] = u[candidate];
      if (value(u) != value(v)) {
        rep.pass = false;
        rep.witness = ConditionReport::Witness{t, u, v};
        return rep;
      }
    }
    rep.controlling[t] = candidate;
  }
  return rep;
}

Certificate lemma9_certificate(const AdversarialFamily& family, std::size_t n, double c0,
                               Exponent q) {
  Certificate cert;
  const double L = static_cast<double>(family.L());
  cert.rho = rho_lb(L, static_cast<double>(family.l), static_cast<double>(family.l_prime));
  cert.threshold = c0 * cert.rho;
  if (static_cast<double>(n) > cert.threshold) {
    cert.method = "not-applicable";
    return cert;
  }
  cert.applicable = true;

  // spike families: psi_j = h e_{s(j)} with one common height and distinct s(j)
  bool spikes = true;
  double height = 0.0;
  std::vector<bool> used(family.N, false);
  for (const auto& psi : family.psi) {
    std::size_t support = 0, where = 0;
    for (std::size_t t = 0; t < family.N; ++t)
      if (psi[t] != 0.0) {
        ++support;
        where = t;
      }
    if (support != 1 || used[where] || (height != 0.0 && std::abs(psi[where]) != height)) {
      spikes = false;
      break;
    }
    used[where] = true;
    height = std::abs(psi[where]);
  }
  const double gap = std::abs(static_cast<double>(family.l) - static_cast<double>(family.l_prime));
  if (spikes && family.L() > 12) {
    cert.method = "closed-form";
    const double sep = q.is_infinite()
                           ? height
                           : height * std::pow(gap / static_cast<double>(family.N), q.reciprocal());
    cert.value = 0.5 * sep;
    return cert;
  }
  if (family.L() > 20) throw ResourceError("separation enumeration needs L <= 20");
  cert.method = "enumeration";
  const std::size_t Ls = family.L();
  std::vector<std::vector<double>> low, high;
  for (std::uint64_t u = 0; u < (std::uint64_t{1} << Ls); ++u) {
    const auto w = static_cast<std::size_t>(std::popcount(u));
    if (w != family.l && w != family.l_prime) continue;
    std::vector<std::uint8_t> bits(Ls);
    for (std::size_t j = 0; j < Ls; ++j) bits[j] = static_cast<std::uint8_t>((u >> j) & 1U);
    (w == family.l ? low : high).push_back(family.f(bits));
  }
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> diff(family.N);
  for (const auto& a : low)
    for (const auto& b : high) {
      for (std::size_t t = 0; t < family.N; ++t) diff[t] = a[t] - b[t];
      best = std::min(best, lp_norm(diff, q));
    }
  cert.value = 0.5 * best;
  return cert;
}

EnvelopeFit fit_envelope(Exponent p, Exponent q, const std::vector<std::size_t>& grid,
                         const Constants& constants) {
  std::vector<double> xs, ys, ratios, logs;
  for (std::size_t N : grid)
    for (std::size_t n : grid) {
      if (n > N) continue;
      RateQuery rq{n, N, p, q, constants};
      const BoundReport r = bound_Jpq(rq);
      const double ratio = r.upper / r.lower;
      const double L = lg(static_cast<double>(N + n));
      xs.push_back(std::log(L));
      ys.push_back(std::log(ratio));
      ratios.push_back(ratio);
      logs.push_back(L);
    }
  EnvelopeFit fit;
  fit.points = xs.size();
  if (xs.empty()) return fit;
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  fit.alpha = sxx > 0.0 ? std::max(0.0, sxy / sxx) : 0.0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    fit.C = std::max(fit.C, ratios[i] / std::pow(logs[i], fit.alpha));
    fit.max_ratio = std::max(fit.max_ratio, ratios[i]);
  }
  return fit;
}

std::string bounds_csv_header() { return "p,q,n,N,regime,upper,lower,det_rate,rand_rate,quantum_rate"; }

std::string bounds_csv_row(const RateQuery& rq) {
  const BoundReport b = bound_Jpq(rq);
  const NumericRates r = comparison_rates(rq.p, rq.q, rq.n, rq.N);
  return exponent_str(rq.p) + "," + exponent_str(rq.q) + "," + std::to_string(rq.n) + "," +
         std::to_string(rq.N) + "," + b.regime + "," + format_number(b.upper) + "," +
         format_number(b.lower) + "," + format_number(r.deterministic) + "," +
         format_number(r.randomized) + "," + format_number(r.quantum);
}

}  // namespace qapprox
