// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracles.hpp"
#include "qapprox/boosting.hpp"
#include "qapprox/bounds_lab.hpp"
#include "qapprox/composition.hpp"
#include "qapprox/grover_threshold.hpp"
#include "qapprox/lp_spaces.hpp"
#include "qapprox/query_model.hpp"

using namespace qapprox;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

const Exponent P1 = Exponent::finite(1);
const Exponent P2 = Exponent::finite(2);
const Exponent P4 = Exponent::finite(4);
const Exponent PI = Exponent::infinity();
const std::vector<Exponent> kExponents{P1, P2, P4, PI};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

// Normalized p-norm written out directly.
double norm_p(const std::vector<double>& f, Exponent p) {
  double s = 0.0;
  if (p.is_infinite()) {
    for (double v : f) s = std::max(s, std::abs(v));
    return s;
  }
  for (double v : f) s += std::pow(std::abs(v), p.value());
  return std::pow(s / static_cast<double>(f.size()), 1.0 / p.value());
}

double sup_norm(std::span<const double> g) {
  double s = 0.0;
  for (double v : g) s = std::max(s, std::abs(v));
  return s;
}

// inf{eps : P(dist > eps) <= theta} over a finite atom list, by scanning candidates.
double error_at(const std::vector<std::pair<double, double>>& dist_mass, double theta) {
  std::vector<double> cands{0.0};
  for (const auto& [d, m] : dist_mass) cands.push_back(d);
  std::sort(cands.begin(), cands.end());
  for (double eps : cands) {
    double beyond = 0.0;
    for (const auto& [d, m] : dist_mass)
      if (d > eps) beyond += m;
    if (beyond <= theta + 1e-12) return eps;
  }
  return cands.back();
}

template <class Dist>
double error_of(const Element& target, const Dist& atoms, double theta,
                const std::function<double(const std::vector<double>&)>& norm) {
  std::vector<std::pair<double, double>> dm;
  for (const auto& [g, p] : atoms) {
    std::vector<double> d(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) d[i] = target[i] - g[i];
    dm.emplace_back(norm(d), p);
  }
  return error_at(dm, theta);
}

double binomial_tail(std::size_t n, double p, std::size_t k) {
  long double s = 0.0L;
  for (std::size_t j = k; j <= n; ++j) {
    long double c = 1.0L;
    for (std::size_t i = 0; i < j; ++i) c = c * static_cast<long double>(n - i) / (i + 1.0L);
    s += c * std::pow(static_cast<long double>(p), static_cast<long double>(j)) *
         std::pow(1.0L - p, static_cast<long double>(n - j));
  }
  return static_cast<double>(s);
}

// --------------------------------------------------------------------------

Verdict criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1001);
  double worst_tv = 0.0, worst_mass = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t N = 2 + rng() % 7;
    const auto a = oracle::random_algorithm(rng, N, 8, 3);
    const auto f = oracle::random_input(rng, N);
    const auto r = run_algorithm(a, f);
    worst_mass = std::max(worst_mass, std::abs(r.distribution.total_mass() - 1.0));
    worst_tv = std::max(worst_tv, oracle::total_variation(oracle::run(a, f), r.distribution));
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = worst_tv <= 1e-9 && worst_mass <= 1e-9 && secs <= 120.0;
  return {ok, "500 algorithms, max TV " + fmt(worst_tv) + ", max |mass-1| " + fmt(worst_mass) +
                  ", " + fmt(secs) + " s"};
}

// --------------------------------------------------------------------------

double simulated_grover(std::size_t N, std::size_t marked, std::size_t iterations) {
  InputFunction f{std::vector<double>(N, 0.0), "grover"};
  f.values[marked] = 1.0;
  std::vector<std::size_t> active(N);
  for (std::size_t i = 0; i < N; ++i) active[i] = i;
  const auto stage = grover_stage(marking_query(index_qubits_for(N), active, 0.5), iterations);
  const auto state = run_stage(stage, f, 1);
  double p = 0.0;
  for (BasisIndex x = 0; x < (BasisIndex{1} << stage.num_qubits()); ++x)
    if ((x >> 1) == marked) p += std::norm(state.amplitude(x));
  return p;
}

double grover_closed(std::size_t N, std::size_t j) {
  const double theta = std::asin(1.0 / std::sqrt(static_cast<double>(N)));
  return std::pow(std::sin((2.0 * j + 1.0) * theta), 2);
}

Verdict criterion2() {
  const double p8 = simulated_grover(8, 5, 2);
  const double want = std::pow(std::sin(5.0 * std::asin(1.0 / std::sqrt(8.0))), 2);
  double worst = std::abs(p8 - want);
  std::size_t checks = 1;
  for (std::size_t N = 4; N <= 1024; N *= 2) {
    const auto jmax = static_cast<std::size_t>(
        std::floor(M_PI / (4.0 * std::asin(1.0 / std::sqrt(static_cast<double>(N))))));
    for (std::size_t j = 0; j <= jmax; ++j) {
      worst = std::max(worst, std::abs(simulated_grover(N, (N * 3) / 7, j) - grover_closed(N, j)));
      ++checks;
    }
  }
  return {worst <= 1e-9, "N=8 j=2 p=" + fmt(p8) + ", " + std::to_string(checks) +
                             " (N, j) cells, max deviation " + fmt(worst)};
}

// --------------------------------------------------------------------------

Verdict criterion3() {
  std::mt19937_64 rng(3003);
  std::size_t checks = 0, violations = 0;
  for (Exponent p : kExponents) {
    for (int s = 0; s < 1000; ++s) {
      const std::size_t N = 1 + rng() % 48;
      std::vector<double> f(N);
      std::student_t_distribution<double> heavy(1.5);
      for (auto& v : f) v = (rng() % 3 == 0) ? 0.0 : heavy(rng);
      if (s % 5 == 0) f[rng() % N] = 1e3;  // spike-dominated
      const double nrm = norm_p(f, p);
      if (nrm > 0.0) {
        const double scale = std::uniform_real_distribution<double>(0.2, 1.0)(rng) / nrm;
        for (auto& v : f) v *= (s % 4 == 0) ? 1.0 / nrm : scale;
      }
      for (Exponent q : kExponents) {
        if (q < p) continue;
        for (double M : {0.1, 0.5, 1.0}) {
          const auto c = threshold(LpVector(f), M);
          std::vector<double> d(N);
          for (std::size_t i = 0; i < N; ++i) d[i] = f[i] - c[i];
          const double bound =
              q.is_infinite() ? (p.is_infinite() ? 1.0 : M)
                              : std::pow(M, 1.0 - (p.is_infinite() ? 0.0 : p.value() / q.value()));
          ++checks;
          if (norm_p(d, q) > bound + 1e-12) ++violations;
        }
      }
    }
  }
  return {violations == 0,
          std::to_string(checks) + " (f, p, q, M) checks, " + std::to_string(violations) +
              " violations"};
}

// --------------------------------------------------------------------------

Verdict criterion4() {
  constexpr std::size_t N = 64;
  constexpr std::uint64_t trials = 400;
  const double z = 1.6448536269514722;
  std::vector<double> Cs;
  std::ostringstream detail;
  bool ok = true;
  for (std::size_t k : {1, 2, 4, 8}) {
    const std::size_t n = planted_budget(N, k, P1);
    const double M = choose_threshold(N, n, P1, 1.0);
    std::uint64_t successes = 0, queries = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      const auto f = planted_input(N, k, M, P1, mix_seed(400 + k, t));
      QueryOracle o(f);
      const auto res = approximate_embedding(o, P1, P2, n, mix_seed(900 + k, t), 1.0, 0.25);
      queries += o.queries();
      // success: exactly the planted heavy set, values within the readout step
      std::vector<std::size_t> heavy;
      for (std::size_t i = 0; i < N; ++i)
        if (std::abs(f.values[i]) >= M) heavy.push_back(i);
      bool good = res.report && res.report->found.size() == heavy.size();
      for (std::size_t j = 0; good && j < heavy.size(); ++j) {
        const auto& [idx, y] = res.report->found[j];
        good = idx == heavy[j] && y <= f.values[idx] && f.values[idx] - y <= decode_resolution(res.report->m_star);
      }
      successes += good;
    }
    const double phat = static_cast<double>(successes) / trials;
    const double nt = static_cast<double>(trials);
    const double lcb = (phat + z * z / (2 * nt) -
                        z * std::sqrt(phat * (1 - phat) / nt + z * z / (4 * nt * nt))) /
                       (1 + z * z / nt);
    const double C = static_cast<double>(queries) / trials /
                     (std::sqrt(static_cast<double>(N * k)) * std::log2(static_cast<double>(N)));
    Cs.push_back(C);
    ok = ok && lcb >= 0.75;
    detail << "k=" << k << " n=" << n << " success " << fmt(phat) << " (lcb " << fmt(lcb)
           << ") C=" << fmt(C) << "; ";
  }
  const double spread = *std::max_element(Cs.begin(), Cs.end()) / *std::min_element(Cs.begin(), Cs.end());
  ok = ok && spread <= 2.0;
  detail << "C max/min " << fmt(spread);
  return {ok, detail.str()};
}

// --------------------------------------------------------------------------

Verdict criterion5() {
  std::ostringstream detail;
  bool ok = true;
  const InputFunction f{{0.0}, "mock"};
  for (std::size_t nu : {8, 16, 24, 32}) {
    const auto b = boost(failure_mock(0.25), nu, Selector::rho(), NormedOutputSpace::real_line());
    const auto s = sample_algorithm(b, f, 100000, mix_seed(5005, nu));
    std::uint64_t fails = 0;
    for (const auto& [g, c] : s.counts)
      if (g != Element{0.0}) fails += c;
    const double emp = static_cast<double>(fails) / 1e5;
    const double tail = binomial_tail(nu, 0.25, (nu + 1) / 2);
    const double hoeff = std::exp(-static_cast<double>(nu) / 8.0);
    ok = ok && emp <= tail && tail <= hoeff && (nu != 32 || emp <= 0.03);
    detail << "nu=" << nu << " " << fmt(emp) << "<=" << fmt(tail) << "<=" << fmt(hoeff) << "; ";
  }

  // rho-selector on every success path of small instances
  std::mt19937_64 rng(5006);
  std::size_t paths = 0, bad = 0;
  for (int inst = 0; inst < 40; ++inst) {
    std::vector<std::pair<Element, double>> atoms;
    Element target;
    if (inst % 2 == 0) {
      const auto a = oracle::random_algorithm(rng, 4, 4, 2, 6);
      const auto d = run_algorithm(a, oracle::random_input(rng, 4)).distribution;
      for (const auto& [g, p] : d.atoms()) atoms.emplace_back(g, p);
      target = atoms[rng() % atoms.size()].first;
      target[0] += 0.3;
    } else {
      std::uniform_real_distribution<double> u(-2.0, 2.0);
      const std::size_t count = 2 + rng() % 4;
      for (std::size_t i = 0; i < count; ++i) atoms.push_back({{u(rng), u(rng)}, 1.0 / count});
      target = {u(rng), u(rng)};
    }
    if (atoms.size() > 6) atoms.resize(6);
    const double e = error_of(target, atoms, 0.25, [](const std::vector<double>& v) {
      return sup_norm(v);
    });
    for (std::size_t nu = 1; nu <= 5; ++nu) {
      std::vector<std::size_t> idx(nu, 0);
      while (true) {
        std::vector<Element> runs;
        std::size_t near = 0;
        for (std::size_t i : idx) {
          runs.push_back(atoms[i].first);
          std::vector<double> d(target.size());
          for (std::size_t c = 0; c < d.size(); ++c) d[c] = runs.back()[c] - target[c];
          near += sup_norm(d) <= e;
        }
        if (2 * near > nu) {
          ++paths;
          const Element g = rho_select(runs, sup_norm);
          std::vector<double> d(target.size());
          for (std::size_t c = 0; c < d.size(); ++c) d[c] = g[c] - target[c];
          if (sup_norm(d) > 3.0 * e + 1e-12) ++bad;
        }
        std::size_t pos = 0;
        while (pos < nu && ++idx[pos] == atoms.size()) idx[pos++] = 0;
        if (pos == nu) break;
      }
    }
  }
  ok = ok && bad == 0;
  detail << "rho <= 3e on " << paths << " success paths, " << bad << " violations";
  return {ok, detail.str()};
}

// --------------------------------------------------------------------------

std::vector<BasisIndex> split_x(const std::vector<int>& widths, BasisIndex x) {
  std::vector<BasisIndex> out(widths.size());
  for (std::size_t l = widths.size(); l-- > 0;) {
    out[l] = x & ((BasisIndex{1} << widths[l]) - 1);
    x >>= widths[l];
  }
  return out;
}

// h_{f,x} from its definition.
InputFunction residual(const CompositionPlan& plan, const InputFunction& f,
                       const std::vector<BasisIndex>& xs) {
  const Element phi = plan.stage1.output(OutcomeSpan(xs.data(), xs.size()));
  InputFunction h{std::vector<double>(plan.N), "h"};
  for (std::size_t s = 0; s < plan.N; ++s) {
    const bool queried =
        std::find(plan.query_points.begin(), plan.query_points.end(), s) != plan.query_points.end();
    const double a = queried ? oracle::decode(oracle::encode(f.values[s], plan.m_star), plan.m_star)
                             : f.values[s];
    h.values[s] = (a - phi[s]) / plan.sigma;
  }
  return h;
}

Verdict criterion6() {
  std::size_t meter_bad = 0, table_bad = 0, table_cells = 0, chain_bad = 0, instances = 0;
  const auto xnorm = [](const CompositionPlan& plan) {
    return [p = plan.p](const std::vector<double>& v) { return norm_p(v, p); };
  };
  const auto gnorm = [](const std::vector<double>& v) { return sup_norm(v); };
  for (std::uint64_t i = 0; i < 100; ++i) {
    const PlanInputs in = i == 0 ? toy_plan_inputs() : random_toy_plan_inputs(mix_seed(6006, i));
    const PlannedComposition planned = make_plan(in);
    const CompositionPlan& plan = planned.plan;
    const MeasuredAlgorithm B = compose(plan);
    const std::uint64_t expected = in.stage1.num_queries() + 2 * in.stage2.num_queries();

    // (a) meter
    for (const auto& f : in.witnesses) {
      const auto r = run_algorithm(B, f);
      if (r.metered_queries_min != expected || r.metered_queries_max != expected) ++meter_bad;
    }

    // (b) permutation table on the |x>|0> slice
    const int xw = plan.x_width();
    for (const auto& f : in.witnesses) {
      for (std::size_t l = 0; l < plan.stage2.num_stages(); ++l) {
        const auto& q = plan.stage2.stages[l].query;
        const auto U = build_modified_query(l, plan, f);
        const int total = q.m + xw + plan.m_star;
        for (BasisIndex x = 0; x < (BasisIndex{1} << xw); ++x) {
          const InputFunction h = residual(plan, f, split_x(plan.stage1_widths, x));
          for (BasisIndex a = 0; a < (BasisIndex{1} << q.m); ++a) {
            const BasisIndex from = (a << (xw + plan.m_star)) | (x << plan.m_star);
            const BasisIndex want =
                (oracle::query_image(q, h, a) << (xw + plan.m_star)) | (x << plan.m_star);
            const auto s = apply(QubitState(total, from), U);
            ++table_cells;
            if (std::norm(s.amplitude(want)) < 1.0 - 1e-12) ++table_bad;
          }
        }
      }
    }

    // (c) error chain with test-side errors
    const double theta1 = in.theta1, theta2 = 0.25;
    double e_J = 0.0;
    for (const auto& f : in.witnesses)
      e_J = std::max(e_J, error_of(f.values, oracle::run(in.stage1, f), theta1, xnorm(plan)));
    double e_S = 0.0;
    for (const auto& f : in.witnesses) {
      for (BasisIndex x = 0; x < (BasisIndex{1} << xw); ++x) {
        const auto xs = split_x(plan.stage1_widths, x);
        const Element phi = plan.stage1.output(OutcomeSpan(xs.data(), xs.size()));
        const auto d1 = oracle::run(in.stage1, f);
        if (!d1.count(phi)) continue;
        std::vector<double> diff(plan.N);
        for (std::size_t s = 0; s < plan.N; ++s) diff[s] = f.values[s] - phi[s];
        if (norm_p(diff, plan.p) > e_J + plan.delta) continue;
        const InputFunction h = residual(plan, f, xs);
        e_S = std::max(e_S, error_of(in.S.apply(h.values), oracle::run(in.stage2, h), theta2, gnorm));
      }
    }
    const double bound = in.S.norm_bound * plan.delta + (e_J + 2 * plan.delta) * (e_S + plan.delta);
    const double theta = theta1 + theta2 - theta1 * theta2;
    for (const auto& f : in.witnesses) {
      ++instances;
      const auto dist = run_algorithm(B, f).distribution;
      if (error_of(in.S.apply(f.values), dist.atoms(), theta, gnorm) > bound + 1e-12) ++chain_bad;
    }
  }
  const bool ok = meter_bad == 0 && table_bad == 0 && chain_bad == 0;
  return {ok, "100 plans: meter mismatches " + std::to_string(meter_bad) + ", table mismatches " +
                  std::to_string(table_bad) + "/" + std::to_string(table_cells) +
                  ", chain violations " + std::to_string(chain_bad) + "/" +
                  std::to_string(instances)};
}

// --------------------------------------------------------------------------

Verdict criterion7() {
  bool ok = true;
  std::ostringstream detail;
  double rho_dev = std::abs(rho_lb(16, 4, 5) - (4.0 + std::sqrt(48.0)));
  for (double N : {1.0, 4.0, 17.0, 64.0, 1000.0})
    rho_dev = std::max(rho_dev, std::abs(rho_lb(N, 0, 1) - std::sqrt(N)));
  ok = ok && rho_dev <= 1e-12;
  detail << "rho max deviation " << fmt(rho_dev) << "; ";

  std::mt19937_64 rng(7007);
  std::size_t families = 0, failed = 0;
  for (std::size_t N = 1; N <= 64; ++N) {
    for (Exponent p : kExponents) {
      for (std::size_t l : {std::size_t{0}, (N - 1) / 2, N - 1}) {
        ++families;
        if (!condition_I_check(build_family(N, p, l), 64, N).pass) ++failed;
      }
    }
    // disjoint spikes at random positions and heights
    AdversarialFamily fam;
    fam.N = N;
    std::vector<std::size_t> pos(N);
    for (std::size_t i = 0; i < N; ++i) pos[i] = i;
    std::shuffle(pos.begin(), pos.end(), rng);
    const std::size_t L = 1 + rng() % N;
    for (std::size_t j = 0; j < L; ++j) {
      std::vector<double> psi(N, 0.0);
      psi[pos[j]] = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
      fam.psi.push_back(psi);
    }
    ++families;
    if (!condition_I_check(fam, 64, N).pass) ++failed;
  }
  AdversarialFamily overlap;
  overlap.N = 8;
  overlap.psi = {{1, 0, 0, 0, 0, 0, 0, 0}, {0.5, 1, 0, 0, 0, 0, 0, 0}, {0, 0, 1, 0, 0, 0, 0, 0}};
  const bool overlap_fails = !condition_I_check(overlap).pass;
  ok = ok && failed == 0 && overlap_fails;
  detail << families << " spike families pass " << families - failed << ", overlap "
         << (overlap_fails ? "rejected" : "accepted") << "; ";

  double cert_dev = 0.0;
  std::size_t certs = 0;
  for (std::size_t N : {4, 8, 16, 32, 64}) {
    for (Exponent p : kExponents) {
      const double ip = p.reciprocal();
      const auto c0 = lemma9_certificate(build_family(N, p, 0), 1, 1.0, PI);
      cert_dev = std::max(cert_dev, std::abs(c0.value - 0.5 * std::pow(N, ip)));
      ok = ok && c0.applicable;
      ++certs;
      for (std::size_t l : {std::size_t{1}, N / 4, N / 2 - 1}) {
        const auto c = lemma9_certificate(build_family(N, p, l), 1, 1.0, PI);
        cert_dev = std::max(cert_dev,
                            std::abs(c.value - 0.5 * std::pow(l + 1.0, -ip) * std::pow(N, ip)));
        ok = ok && c.applicable;
        ++certs;
      }
    }
  }
  ok = ok && cert_dev <= 1e-12;
  detail << certs << " certificates, max deviation " << fmt(cert_dev);
  return {ok, detail.str()};
}

// --------------------------------------------------------------------------

std::string normalize_cell(std::string s) {
  const std::vector<std::pair<std::string, std::string>> subs = {
      {"\\left(\\frac{N}{n}\\right)", "(N/n)"}, {"\\sqrt{N}", "sqrt(N)"}, {"\\infty", "inf"},
      {"\\le", "<="}, {"\\,", ""}, {"\\ ", ""}, {" ", ""}};
  for (const auto& [from, to] : subs) {
    for (std::size_t at = s.find(from); at != std::string::npos; at = s.find(from, at))
      s.replace(at, from.size(), to), at += to.size();
  }
  return s;
}

Verdict criterion8() {
  const std::vector<std::vector<std::string>> latex = {
      {"1\\le p< q\\le \\infty,\\,n\\le \\sqrt{N}", "\\, N^{1/p-1/q}", "\\, N^{1/p-1/q}",
       "\\, N^{1/p-1/q}"},
      {"1\\le p< q\\le \\infty,\\ n> \\sqrt{N}", "\\, N^{1/p-1/q}", "\\, N^{1/p-1/q}",
       "\\, \\left(\\frac{N}{n}\\right)^{2/p-2/q}"},
      {"1\\le q\\le p\\le \\infty", "\\, 1", "\\, 1", "\\, 1"}};
  const auto rows = comparison_rows();
  bool ok = rows.size() == latex.size();
  for (std::size_t i = 0; ok && i < rows.size(); ++i) {
    const std::vector<std::string> got{rows[i].setting, rows[i].deterministic, rows[i].randomized,
                                       rows[i].quantum};
    for (std::size_t c = 0; c < 4; ++c)
      ok = ok && normalize_cell(got[c]) == normalize_cell(latex[i][c]);
  }
  std::vector<std::size_t> grid;
  for (std::size_t v = 4; v <= 1024; v *= 2) grid.push_back(v);
  double worst_alpha = 0.0;
  for (Exponent p : kExponents)
    for (Exponent q : kExponents) worst_alpha = std::max(worst_alpha, fit_envelope(p, q, grid).alpha);
  const bool rows_ok = ok;
  ok = ok && worst_alpha <= 4.0;
  return {ok, std::string("table rows ") + (rows_ok ? "match" : "differ") +
                  ", max envelope alpha over 16 pairs " + fmt(worst_alpha)};
}

// --------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict criterion9() {
#ifndef QAPPROX_CLI_PATH
  return {false, "CLI path not configured"};
#else
  const fs::path work = fs::temp_directory_path() / ("qapprox_accept_" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work);
  const std::vector<std::pair<std::string, std::string>> configs = {
      {"threshold-sweep", "N = 16, 64\nn = 8, 32\np = 1, 2\nq = inf\ntrials = 20\nseed = 5\n"},
      {"bounds-table", "N = 4, 16, 64\nn = 4, 16\n"},
      {"boost-demo", "nu = 8, 16\ntrials = 2000\nseed = 3\n"},
      {"compose-check", "plans = 5\nseed = 4\n"},
      {"lowerbound-cert", "N = 8, 16\nseed = 1\n"}};
  std::size_t files = 0, differ = 0;
  bool ran = true;
  for (const auto& [cmd, text] : configs) {
    const fs::path cfg = work / (cmd + ".cfg");
    std::ofstream(cfg) << text;
    for (const char* run : {"a", "b"}) {
      const std::string line = std::string("\"") + QAPPROX_CLI_PATH + "\" " + cmd + " --config \"" +
                               cfg.string() + "\" --out \"" + (work / run / cmd).string() +
                               "\" > /dev/null";
      ran = ran && std::system(line.c_str()) == 0;
    }
    for (const auto& entry : fs::directory_iterator(work / "a" / cmd)) {
      ++files;
      const fs::path other = work / "b" / cmd / entry.path().filename();
      if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differ;
    }
  }
  fs::remove_all(work);
  return {ran && files > 0 && differ == 0,
          "5 commands, " + std::to_string(files) + " files, " + std::to_string(differ) +
              " differ" + (ran ? "" : ", a run failed")};
#endif
}

}  // namespace

int main() {
  const std::vector<std::function<Verdict()>> criteria = {criterion1, criterion2, criterion3,
                                                          criterion4, criterion5, criterion6,
                                                          criterion7, criterion8, criterion9};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i]();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %zu: %s - %s\n", i + 1, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
    failures += !v.pass;
  }
  return failures == 0 ? 0 : 1;
}
