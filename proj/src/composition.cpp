#include "qapprox/composition.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "qapprox/error_lab.hpp"
#include "qapprox/errors.hpp"

namespace qapprox {

namespace {

/// Splits the concatenated x register into the stage-1 outcomes x_0..x_{k~-1}.
std::vector<BasisIndex> split_outcomes(const std::vector<int>& widths, BasisIndex x) {
  std::vector<BasisIndex> out(widths.size());
  for (std::size_t l = widths.size(); l-- > 0;) {
    out[l] = x & ((BasisIndex{1} << widths[l]) - 1);
    x >>= widths[l];
  }
  return out;
}

BasisIndex join_outcomes(const std::vector<int>& widths, OutcomeSpan xs) {
  BasisIndex x = 0;
  for (std::size_t l = 0; l < widths.size(); ++l) x = (x << widths[l]) | xs[l];
  return x;
}

/// phi~(x)(t) for every x and every t in D_A.
struct Stage1Table {
  std::vector<std::vector<double>> values;  // [x][position of t in D_A]
};

std::shared_ptr<const Stage1Table> tabulate_stage1(const CompositionPlan& plan) {
  const int w = plan.x_width();
  if (w > 16) throw ResourceError("stage-1 outcome register wider than 16 qubits");
  auto table = std::make_shared<Stage1Table>();
  const BasisIndex count = BasisIndex{1} << w;
  table->values.resize(count);
  for (BasisIndex x = 0; x < count; ++x) {
    const Element g = stage1_output(plan, x);
    auto& row = table->values[x];
    row.reserve(plan.query_points.size());
    for (std::size_t t : plan.query_points) row.push_back(g.at(t));
  }
  return table;
}

std::size_t position_in(const std::vector<std::size_t>& sorted, std::size_t t) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
  if (it == sorted.end() || *it != t) throw StructuralError("point outside D_A");
  return static_cast<std::size_t>(it - sorted.begin());
}

}  // namespace

LinearOperator LinearOperator::mean() {
  LinearOperator S;
  S.apply = [](const Element& f) { return Element{qapprox::mean(f)}; };
  S.norm_bound = 1.0;
  S.name = "mean";
  return S;
}

int CompositionPlan::x_width() const {
  int w = 0;
  for (int x : stage1_widths) w += x;
  return w;
}

void CompositionPlan::validate() const {
  stage1.validate();
  stage2.validate();
  if (!(sigma > 0.0)) throw DomainError("composition needs sigma > 0");
  if (!(delta > 0.0)) throw DomainError("composition needs delta > 0");
  if (m_star < 2 || m_star % 2 != 0) throw DomainError("m* must be even and >= 2");
  if (!S.apply) throw StructuralError("composition needs an operator S");
  if (stage1_widths.size() != stage1.num_stages()) {
    throw StructuralError("stage-1 widths do not match the stage-1 algorithm");
  }
  for (std::size_t l = 0; l < stage1.num_stages(); ++l) {
    if (stage1_widths[l] != stage1.stages[l].num_qubits()) {
      throw StructuralError("stage-1 width mismatch at stage " + std::to_string(l));
    }
  }
  for (std::size_t t : query_points) {
    if (t >= N) throw StructuralError("query point outside [0, N)");
  }
  if (!std::is_sorted(query_points.begin(), query_points.end())) {
    throw StructuralError("D_A must be sorted");
  }
}

std::vector<std::size_t> query_points(const MeasuredAlgorithm& a) {
  std::vector<std::size_t> pts;
  for (const auto& s : a.stages) {
    if (s.num_queries() == 0) continue;
    pts.insert(pts.end(), s.query.tau.begin(), s.query.tau.end());
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

int choose_m_star(double M1, std::size_t domain_count, double delta, double M2) {
  if (!(delta > 0.0)) throw DomainError("choose_m_star needs delta > 0");
  int m = 2;
  if (domain_count > 0 && M1 > 0.0) {
    const double need = std::log2(M1 * static_cast<double>(domain_count) / delta);
    m = std::max(m, 2 * static_cast<int>(std::ceil(need)));
  }
  // beta saturates at 2^{m*/2-1}; the sandwich needs |a| strictly inside
  while (!(M2 < std::ldexp(1.0, m / 2 - 1))) m += 2;
  return m;
}

PlannedComposition make_plan(PlanInputs in) {
  if (in.witnesses.empty()) throw DomainError("make_plan needs a nonempty input class");
  PlannedComposition out;
  CompositionPlan& plan = out.plan;
  plan.N = in.N;
  plan.p = in.p;
  plan.delta = in.delta;
  plan.S = std::move(in.S);

  const NormFn x_norm = [p = in.p](std::span<const double> g) { return lp_norm(g, p); };
  double e_J = 0.0;
  for (const auto& f : in.witnesses) {
    const RunReport r = run_algorithm(in.stage1, f);
    e_J = std::max(e_J, exact_error(f.values, r.distribution, in.theta1, x_norm));
  }
  out.e_J = e_J;
  plan.sigma = e_J + 2.0 * in.delta;

  plan.query_points = query_points(in.stage2);
  for (std::size_t t : plan.query_points) {
    if (t >= in.N) throw StructuralError("stage 2 queries a point outside [0, N)");
    Element g(in.N, 0.0);
    g[t] = 1.0;
    plan.M1 = std::max(plan.M1, x_norm(g));
  }
  for (const auto& f : in.witnesses)
    for (std::size_t t : plan.query_points) plan.M2 = std::max(plan.M2, std::abs(f.at(t)));
  plan.m_star = choose_m_star(plan.M1, plan.query_points.size(), in.delta, plan.M2);

  for (const auto& s : in.stage1.stages) plan.stage1_widths.push_back(s.num_qubits());
  plan.stage1 = std::move(in.stage1);
  plan.stage2 = std::move(in.stage2);
  plan.validate();
  return out;
}

double residual_value(double encoded_f, double phi_x_at_t, double sigma) {
  return (encoded_f - phi_x_at_t) / sigma;
}

Element stage1_output(const CompositionPlan& plan, BasisIndex x_register) {
  const auto xs = split_outcomes(plan.stage1_widths, x_register);
  Element g = plan.stage1.output(OutcomeSpan(xs.data(), xs.size()));
  if (g.size() != plan.N) throw StructuralError("stage 1 must output points of L_p^N");
  return g;
}

InputFunction residual_function(const InputFunction& f, OutcomeSpan x,
                                const CompositionPlan& plan) {
  if (x.size() != plan.stage1_widths.size()) {
    throw StructuralError("outcome tuple length differs from the stage-1 stage count");
  }
  const Element phi = stage1_output(plan, join_outcomes(plan.stage1_widths, x));
  InputFunction h;
  h.tag = "h_{" + (f.tag.empty() ? std::string("f") : f.tag) + ",x}";
  h.values.resize(plan.N);
  for (std::size_t s = 0; s < plan.N; ++s) {
    const bool queried =
        std::binary_search(plan.query_points.begin(), plan.query_points.end(), s);
    const double a =
        queried ? gamma_decode(beta_encode(f.at(s), plan.m_star), plan.m_star) : f.at(s);
    h.values[s] = residual_value(a, phi[s], plan.sigma);
  }
  return h;
}

ModifiedQueryParts modified_query_parts(std::size_t l, const CompositionPlan& plan) {
  if (l >= plan.stage2.num_stages()) throw StructuralError("stage index out of range");
  const QuerySpec& q = plan.stage2.stages[l].query;
  const int ms = plan.m_star;
  const int xw = plan.x_width();
  const int m = q.m + xw + ms;
  if (m > kDefaultMaxQubits) {
    throw ResourceError("modified query needs " + std::to_string(m) + " qubits");
  }
  const int low_bits = m - q.m_prime;  // z, u, x, v
  const int rest = low_bits - ms;      // z, u, x
  const BasisIndex v_mask = (BasisIndex{1} << ms) - 1;
  const BasisIndex rest_mask = (BasisIndex{1} << rest) - 1;
  const BasisIndex low_mask = (BasisIndex{1} << low_bits) - 1;

  ModifiedQueryParts parts{
      StructuredUnitary::permutation(
          m,
          [=](BasisIndex b) {
            const BasisIndex low = b & low_mask;
            return (b & ~low_mask) | ((low & v_mask) << rest) | (low >> ms);
          }),
      StructuredUnitary::permutation(
          m,
          [=](BasisIndex b) {
            const BasisIndex low = b & low_mask;
            return (b & ~low_mask) | ((low & rest_mask) << ms) | (low >> rest);
          }),
      StructuredUnitary::identity(m), StructuredUnitary::identity(m), QuerySpec{}};

  parts.W = StructuredUnitary::permutation(m, [=](BasisIndex b) {
    const BasisIndex v = b & v_mask;
    return (b & ~v_mask) | (((v_mask + 1) - v) & v_mask);
  });

  // V: z += beta_l(sigma^{-1}(gamma(v) - phi~(x)(tau_l(i)))) for i in Z_l
  auto table = tabulate_stage1(plan);
  auto slot = std::make_shared<std::vector<std::int64_t>>(std::size_t{1} << q.m_prime, -1);
  for (std::size_t k = 0; k < q.Z.size(); ++k) {
    (*slot)[q.Z[k]] = static_cast<std::int64_t>(position_in(plan.query_points, q.tau[k]));
  }
  const int z_low = m - q.m_prime - q.m_dblprime;
  const BasisIndex z_mask = (BasisIndex{1} << q.m_dblprime) - 1;
  const BasisIndex x_mask = (BasisIndex{1} << xw) - 1;
  const int width = q.m_dblprime;
  const double sigma = plan.sigma;
  const BetaMap beta_l = q.beta;
  parts.V = StructuredUnitary::permutation(m, [=](BasisIndex b) {
    const std::int64_t pos = (*slot)[b >> (m - q.m_prime)];
    if (pos < 0) return b;
    const BasisIndex v = b & v_mask;
    const BasisIndex x = (b >> ms) & x_mask;
    const double h = residual_value(gamma_decode(v, ms),
                                    table->values[x][static_cast<std::size_t>(pos)], sigma);
    const BasisIndex z = (b >> z_low) & z_mask;
    const BasisIndex nz = (z + beta_l(h, width)) & z_mask;
    return (b & ~(z_mask << z_low)) | (nz << z_low);
  });

  parts.Q_bar.m = m;
  parts.Q_bar.m_prime = q.m_prime;
  parts.Q_bar.m_dblprime = ms;
  parts.Q_bar.Z = q.Z;
  parts.Q_bar.tau = q.tau;
  parts.Q_bar.beta = BetaMap(BetaEncode{ms});
  return parts;
}

StructuredUnitary build_modified_query(std::size_t l, const CompositionPlan& plan,
                                       const InputFunction& f) {
  const auto parts = modified_query_parts(l, plan);
  const auto q = build_query_unitary(parts.Q_bar, f);
  const int m = parts.Q_bar.m;
  return StructuredUnitary::sequence(
      m, {parts.P, q, parts.P_inv, parts.V, parts.W, parts.P, q, parts.P_inv});
}

MeasuredAlgorithm compose(const CompositionPlan& plan) {
  plan.validate();
  const std::size_t k1 = plan.stage1.num_stages();
  const int xw = plan.x_width();
  const int ms = plan.m_star;
  MeasuredAlgorithm out;
  for (std::size_t l = 0; l < k1; ++l) {
    out.stages.push_back(plan.stage1.stages[l]);
    out.selectors.push_back(plan.stage1.selectors[l]);
  }
  auto shared = std::make_shared<const CompositionPlan>(plan);
  const int extra = xw + ms;
  for (std::size_t l = 0; l < plan.stage2.num_stages(); ++l) {
    const NoMeasureAlgorithm& a = plan.stage2.stages[l];
    NoMeasureAlgorithm bar;
    if (a.num_queries() == 0) {
      // no query: keep the original query description, only widen the registers
      bar.query = a.query;
      bar.query.m += extra;
      bar.unitaries.push_back(a.unitaries.front().widened(extra));
    } else {
      const auto parts = modified_query_parts(l, plan);
      const int m = parts.Q_bar.m;
      bar.query = parts.Q_bar;
      const auto middle =
          StructuredUnitary::sequence(m, {parts.P_inv, parts.V, parts.W, parts.P});
      bar.unitaries.push_back(
          StructuredUnitary::sequence(m, {a.unitaries.front().widened(extra), parts.P}));
      for (std::size_t j = 1; j < a.unitaries.size(); ++j) {
        bar.unitaries.push_back(middle);
        if (j + 1 < a.unitaries.size()) {
          bar.unitaries.push_back(StructuredUnitary::sequence(
              m, {parts.P_inv, a.unitaries[j].widened(extra), parts.P}));
        } else {
          bar.unitaries.push_back(
              StructuredUnitary::sequence(m, {parts.P_inv, a.unitaries[j].widened(extra)}));
        }
      }
    }
    out.stages.push_back(std::move(bar));
    out.selectors.push_back([shared, k1, l, extra, ms](OutcomeSpan prior) {
      const auto& widths = shared->stage1_widths;
      const BasisIndex x = join_outcomes(widths, prior.subspan(0, k1));
      std::vector<BasisIndex> ys;
      ys.reserve(l);
      for (std::size_t j = 0; j < l; ++j) ys.push_back(prior[k1 + j] >> extra);
      const BasisIndex b = shared->stage2.selectors[l](OutcomeSpan(ys.data(), ys.size()));
      return (b << extra) | (x << ms);
    });
  }
  out.output = [shared, k1, extra](OutcomeSpan outcomes) {
    const Element phi_x = shared->stage1.output(outcomes.subspan(0, k1));
    std::vector<BasisIndex> ys;
    for (std::size_t j = k1; j < outcomes.size(); ++j) ys.push_back(outcomes[j] >> extra);
    const Element s_phi = shared->S.apply(phi_x);
    const Element a_out = shared->stage2.output(OutcomeSpan(ys.data(), ys.size()));
    if (s_phi.size() != a_out.size()) throw StructuralError("S and stage 2 disagree on G");
    Element g(s_phi.size());
    for (std::size_t c = 0; c < g.size(); ++c) g[c] = s_phi[c] + shared->sigma * a_out[c];
    return g;
  };
  return out;
}

double side_condition(std::size_t nu1, std::size_t nu2) {
  const double a = std::exp(-static_cast<double>(nu1) / 8.0);
  const double b = std::exp(-static_cast<double>(nu2) / 8.0);
  return a + b - a * b;
}

MultiplicativeBound multiplicative_bound(double e_J, double e_S, std::size_t nu1,
                                         std::size_t nu2, std::uint64_t n_tilde,
                                         std::uint64_t n) {
  const double side = side_condition(nu1, nu2);
  if (side > 0.25) {
    throw DomainError("side condition fails: e^{-nu1/8} + e^{-nu2/8} - e^{-(nu1+nu2)/8} = " +
                      std::to_string(side) + " > 1/4");
  }
  if (!(e_J >= 0.0 && e_S >= 0.0)) throw DomainError("errors must be >= 0");
  return {4.0 * e_J * e_S, nu1 * n_tilde + 2 * nu2 * n};
}

ErrorChainReport verify_error_chain(const PlannedComposition& planned,
                                    const std::vector<InputFunction>& witnesses,
                                    double theta1, double theta2) {
  const CompositionPlan& plan = planned.plan;
  ErrorChainReport rep;
  rep.e_J = planned.e_J;
  const NormFn x_norm = [p = plan.p](std::span<const double> g) { return lp_norm(g, p); };
  const NormFn g_norm = [](std::span<const double> g) {
    double m = 0.0;
    for (double v : g) m = std::max(m, std::abs(v));
    return m;
  };
  const double sigma1 = planned.e_J + plan.delta;
  for (const auto& f : witnesses) {
    const RunReport r1 = run_algorithm(plan.stage1, f);
    for (BasisIndex x = 0; x < (BasisIndex{1} << plan.x_width()); ++x) {
      const auto xs = split_outcomes(plan.stage1_widths, x);
      // only outcome tuples that occur and leave h in the unit ball
      bool occurs = false;
      const Element phi = stage1_output(plan, x);
      for (const auto& [g, pmass] : r1.distribution.atoms()) {
        if (g == phi && pmass > 0.0) occurs = true;
      }
      if (!occurs) continue;
      Element diff(plan.N);
      for (std::size_t s = 0; s < plan.N; ++s) diff[s] = f.values[s] - phi[s];
      if (x_norm(diff) > sigma1) continue;
      const InputFunction h = residual_function(f, OutcomeSpan(xs.data(), xs.size()), plan);
      const RunReport r2 = run_algorithm(plan.stage2, h);
      rep.e_S = std::max(rep.e_S, exact_error(plan.S.apply(h.values), r2.distribution, theta2,
                                              g_norm));
    }
  }
  const MeasuredAlgorithm B = compose(plan);
  const double theta = theta1 + theta2 - theta1 * theta2;
  rep.expected_queries = plan.stage1.num_queries() + 2 * plan.stage2.num_queries();
  bool metered_ok = true;
  for (const auto& f : witnesses) {
    const RunReport r = run_algorithm(B, f);
    rep.measured =
        std::max(rep.measured, exact_error(plan.S.apply(f.values), r.distribution, theta, g_norm));
    rep.declared_queries = r.declared_queries;
    metered_ok = metered_ok && r.metered_queries_min == rep.expected_queries &&
                 r.metered_queries_max == rep.expected_queries;
  }
  rep.queries_ok = metered_ok && B.num_queries() == rep.expected_queries;
  rep.bound = plan.S.norm_bound * plan.delta + (planned.e_J + 2.0 * plan.delta) *
                                                    (rep.e_S + plan.delta);
  rep.chain_ok = rep.measured <= rep.bound + 1e-12;
  return rep;
}

PlanInputs toy_plan_inputs(double delta) {
  constexpr std::size_t N = 4;
  const InputFunction f0{{0.3, -0.2, 1.0, 0.7}, "f0"};
  const InputFunction f1{{0.3, -0.2, 0.0, 0.7}, "f1"};

  // stage 1: floor(f(2)) mod 2 tells f0 from f1 with one query
  NoMeasureAlgorithm s1;
  s1.query.m = 2;
  s1.query.m_prime = 1;
  s1.query.m_dblprime = 1;
  s1.query.Z = {0};
  s1.query.tau = {2};
  s1.query.beta = BetaMap(BetaModulo{});
  s1.unitaries = {StructuredUnitary::identity(2), StructuredUnitary::identity(2)};
  MeasuredAlgorithm a1;
  a1.stages = {s1};
  a1.selectors = {MeasuredAlgorithm::constant_start(0)};
  a1.output = [f0, f1](OutcomeSpan x) { return (x[0] & 1U) ? f0.values : f1.values; };

  // stage 2: read each coordinate at width 4 and average the decoded values
  constexpr int width = 4;
  MeasuredAlgorithm a2;
  for (std::size_t t = 0; t < N; ++t) {
    NoMeasureAlgorithm s;
    s.query.m = 1 + width;
    s.query.m_prime = 1;
    s.query.m_dblprime = width;
    s.query.Z = {0};
    s.query.tau = {t};
    s.query.beta = BetaMap(BetaEncode{width});
    s.unitaries = {StructuredUnitary::identity(s.query.m), StructuredUnitary::identity(s.query.m)};
    a2.stages.push_back(std::move(s));
    a2.selectors.push_back(MeasuredAlgorithm::constant_start(0));
  }
  a2.output = [](OutcomeSpan ys) {
    double total = 0.0;
    for (BasisIndex y : ys) total += gamma_decode(y & 0xF, width);
    return Element{total / static_cast<double>(ys.size())};
  };

  PlanInputs in;
  in.stage1 = std::move(a1);
  in.stage2 = std::move(a2);
  in.S = LinearOperator::mean();
  in.N = N;
  in.p = Exponent::finite(1.0);
  in.witnesses = {f0, f1};
  in.theta1 = 0.25;
  in.delta = delta;
  return in;
}

PlanInputs random_toy_plan_inputs(std::uint64_t seed) {
  constexpr std::size_t N = 4;
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  const std::size_t split = rng() % N;
  InputFunction f0{{}, "f0"};
  InputFunction f1{{}, "f1"};
  for (std::size_t t = 0; t < N; ++t) {
    const double v = uniform(-0.6, 0.6);
    f0.values.push_back(v);
    f1.values.push_back(v);
  }
  // floor() is odd on f0 and even on f1 at the split point
  f0.values[split] = uniform(1.0, 1.5);
  f1.values[split] = uniform(0.0, 0.99);

  const double fail = 0.1 * static_cast<double>(rng() % 4);
  NoMeasureAlgorithm s1;
  s1.query.m = 2;
  s1.query.m_prime = 1;
  s1.query.m_dblprime = 1;
  s1.query.Z = {0};
  s1.query.tau = {split};
  s1.query.beta = BetaMap(BetaModulo{});
  const double c = std::sqrt(1.0 - fail);
  const double s = std::sqrt(fail);
  // index 1 is never queried, so the parity bit reads 0 and f1 comes out
  s1.unitaries = {StructuredUnitary::single_qubit(2, 0, {c, -s, s, c}),
                  StructuredUnitary::identity(2)};
  MeasuredAlgorithm a1;
  a1.stages = {s1};
  a1.selectors = {MeasuredAlgorithm::constant_start(0)};
  a1.output = [f0, f1](OutcomeSpan x) { return (x[0] & 1U) ? f0.values : f1.values; };

  const int width = (rng() % 2) ? 4 : 2;
  std::vector<std::size_t> reads;
  while (reads.empty()) {
    for (std::size_t t = 0; t < N; ++t)
      if (rng() % 2) reads.push_back(t);
  }
  MeasuredAlgorithm a2;
  for (std::size_t t : reads) {
    NoMeasureAlgorithm s;
    s.query.m = 1 + width;
    s.query.m_prime = 1;
    s.query.m_dblprime = width;
    s.query.Z = {0};
    s.query.tau = {t};
    s.query.beta = BetaMap(BetaEncode{width});
    s.unitaries = {StructuredUnitary::identity(s.query.m), StructuredUnitary::identity(s.query.m)};
    a2.stages.push_back(std::move(s));
    a2.selectors.push_back(MeasuredAlgorithm::constant_start(0));
  }
  const BasisIndex mask = (BasisIndex{1} << width) - 1;
  a2.output = [width, mask](OutcomeSpan ys) {
    double total = 0.0;
    for (BasisIndex y : ys) total += gamma_decode(y & mask, width);
    return Element{total / static_cast<double>(N)};
  };

  PlanInputs in;
  in.stage1 = std::move(a1);
  in.stage2 = std::move(a2);
  in.S = LinearOperator::mean();
  in.N = N;
  in.p = Exponent::finite(1.0);
  in.witnesses = {f0, f1};
  in.theta1 = 0.25;
  in.delta = (rng() % 2) ? 0.5 : 0.25;
  return in;
}

}  // namespace qapprox
