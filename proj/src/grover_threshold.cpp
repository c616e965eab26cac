#include "qapprox/grover_threshold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <json.hpp>

#include "qapprox/errors.hpp"

namespace qapprox {

namespace {

BasisIndex sample_basis(const QubitState& state, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng);
  const auto amps = state.amplitudes();
  BasisIndex last_nonzero = 0;
  for (BasisIndex i = 0; i < amps.size(); ++i) {
    const double p = std::norm(amps[i]);
    if (p == 0.0) continue;
    last_nonzero = i;
    if (u < p) return i;
    u -= p;
  }
  return last_nonzero;
}

NoMeasureAlgorithm single_point_stage(int value_width, std::size_t t, BetaMap beta) {
  NoMeasureAlgorithm a;
  a.query.m = 1 + value_width;
  a.query.m_prime = 1;
  a.query.m_dblprime = value_width;
  a.query.Z = {0};
  a.query.tau = {t};
  a.query.beta = std::move(beta);
  a.unitaries = {StructuredUnitary::identity(a.query.m), StructuredUnitary::identity(a.query.m)};
  return a;
}

/// One metered stage run; adds its declared n_q to `declared`.
BasisIndex run_and_measure(const NoMeasureAlgorithm& a, QueryOracle& oracle, BasisIndex start,
                           std::mt19937_64& rng, std::uint64_t& declared) {
  const QubitState psi = run_stage(a, oracle, start);
  declared += a.num_queries();
  return sample_basis(psi, rng);
}

double log2_size(std::size_t N) { return std::log2(static_cast<double>(N)); }

}  // namespace

int index_qubits_for(std::size_t N) {
  if (N < 1) throw DomainError("search range must be nonempty");
  int b = 1;
  while ((std::size_t{1} << b) < N) ++b;
  return b;
}

QuerySpec marking_query(int index_qubits, const std::vector<std::size_t>& active, double M) {
  QuerySpec q;
  q.m = index_qubits + 1;
  q.m_prime = index_qubits;
  q.m_dblprime = 1;
  q.beta = BetaMap(BetaIndicator{M});
  std::vector<std::size_t> sorted = active;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (std::size_t t : sorted) {
    q.Z.push_back(t);
    q.tau.push_back(t);
  }
  return q;
}

NoMeasureAlgorithm grover_stage(const QuerySpec& marking, std::size_t iterations) {
  if (marking.m_dblprime != 1 || marking.m != marking.m_prime + 1) {
    throw StructuralError("grover_stage needs an index register plus one ancilla");
  }
  const int m = marking.m;
  const int b = marking.m_prime;
  NoMeasureAlgorithm a;
  a.query = marking;
  if (iterations == 0) {
    a.unitaries.push_back(StructuredUnitary::hadamard_block(m, 0, b));
    return a;
  }
  a.unitaries.push_back(StructuredUnitary::hadamard_block(m, 0, b + 1));
  for (std::size_t j = 1; j < iterations; ++j) {
    a.unitaries.push_back(StructuredUnitary::diffusion(m, 0, b));
  }
  a.unitaries.push_back(StructuredUnitary::sequence(
      m, {StructuredUnitary::diffusion(m, 0, b), StructuredUnitary::hadamard(m, b)}));
  return a;
}

double grover_success_closed_form(std::size_t N, std::size_t k, std::size_t iterations) {
  if (k > N || N == 0) throw DomainError("need 0 <= k <= N, N >= 1");
  const double theta = std::asin(std::sqrt(static_cast<double>(k) / static_cast<double>(N)));
  const double s = std::sin((2.0 * static_cast<double>(iterations) + 1.0) * theta);
  return s * s;
}

std::size_t best_iteration_count(std::size_t N, std::size_t k) {
  if (k == 0 || k > N) throw DomainError("best_iteration_count needs 1 <= k <= N");
  const double theta = std::asin(std::sqrt(static_cast<double>(k) / static_cast<double>(N)));
  return static_cast<std::size_t>(std::floor(std::numbers::pi / (4.0 * theta)));
}

double averaged_success(std::size_t m, double theta) {
  if (m == 0) return 0.0;
  const double s2 = std::sin(2.0 * theta);
  if (std::abs(s2) < 1e-300) {
    // theta = pi/2: every j succeeds; theta = 0: none does
    return theta > 0.0 ? 1.0 : 0.0;
  }
  const double md = static_cast<double>(m);
  return 0.5 - std::sin(4.0 * md * theta) / (4.0 * md * s2);
}

SearchSchedule SearchSchedule::make(std::size_t padded_size, double growth) {
  if (!(growth > 1.0)) throw DomainError("schedule growth must exceed 1");
  SearchSchedule s;
  s.padded_size = padded_size;
  const double cap = std::sqrt(static_cast<double>(padded_size));
  double level = 1.0;
  for (int guard = 0; guard < 10000; ++guard) {
    s.caps.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(level)));
    level = std::min(level * growth, cap);
    if (s.worst_miss_probability() <= 0.5) break;
  }
  return s;
}

double SearchSchedule::miss_probability(std::size_t k) const {
  if (k == 0) return 1.0;
  const double theta =
      std::asin(std::sqrt(static_cast<double>(k) / static_cast<double>(padded_size)));
  double miss = 1.0;
  for (std::size_t m : caps) miss *= 1.0 - averaged_success(m, theta);
  return std::clamp(miss, 0.0, 1.0);
}

double SearchSchedule::worst_miss_probability() const {
  double worst = 0.0;
  for (std::size_t k = 1; k <= padded_size; ++k) worst = std::max(worst, miss_probability(k));
  return worst;
}

SearchResult grover_search_unknown(QueryOracle& oracle, const QuerySpec& marking,
                                   const SearchSchedule& schedule, std::mt19937_64& rng) {
  marking.validate();
  SearchResult result;
  const std::uint64_t before = oracle.queries();
  std::uint64_t declared = 0;
  const auto& beta = marking.beta;
  for (std::size_t m : schedule.caps) {
    ++result.attempts;
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    const std::size_t j = pick(rng);
    const NoMeasureAlgorithm stage = grover_stage(marking, j);
    const BasisIndex outcome = run_and_measure(stage, oracle, 1, rng, declared);
    const BasisIndex i = outcome >> 1;
    const auto it = std::lower_bound(marking.Z.begin(), marking.Z.end(), i);
    if (it == marking.Z.end() || *it != i) continue;
    const std::size_t t = marking.tau[static_cast<std::size_t>(it - marking.Z.begin())];
    const BasisIndex check =
        run_and_measure(single_point_stage(1, t, beta), oracle, 0, rng, declared);
    if (check & 1U) {
      result.index = t;
      break;
    }
  }
  result.queries = oracle.queries() - before;
  if (result.queries != declared) throw Error("query meter disagrees with stage counts");
  return result;
}

SearchResult grover_search_unknown(QueryOracle& oracle, const QuerySpec& marking,
                                   std::uint64_t seed, double growth) {
  std::mt19937_64 rng(seed);
  const auto schedule = SearchSchedule::make(std::size_t{1} << marking.m_prime, growth);
  return grover_search_unknown(oracle, marking, schedule, rng);
}

double read_value(QueryOracle& oracle, std::size_t t, int m_star, int chunk,
                  std::mt19937_64& rng) {
  if (chunk < 1) throw DomainError("readout chunk must be >= 1");
  BasisIndex code = 0;
  std::uint64_t declared = 0;
  for (int shift = 0; shift < m_star; shift += chunk) {
    const int width = std::min(chunk, m_star - shift);
    const auto stage = single_point_stage(width, t, BetaMap(BetaChunk{m_star, shift, width}));
    const BasisIndex outcome = run_and_measure(stage, oracle, 0, rng, declared);
    code |= (outcome & ((BasisIndex{1} << width) - 1)) << shift;
  }
  return gamma_decode(code, m_star);
}

std::size_t empty_rounds_for(double fail_target, std::size_t cardinality_bound, double miss) {
  if (!(fail_target > 0.0 && fail_target < 1.0)) {
    throw DomainError("fail_target must lie in (0, 1)");
  }
  if (!(miss < 1.0)) throw DomainError("round miss probability must be < 1");
  if (miss <= 0.0) return 1;
  const double budget = fail_target / (2.0 * static_cast<double>(std::max<std::size_t>(1, cardinality_bound)));
  return std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(std::log(budget) / std::log(miss))));
}

ThresholdRunReport find_all_above(QueryOracle& oracle, double M, double fail_target,
                                  std::uint64_t seed, const ThresholdOptions& options) {
  if (!(M > 0.0)) throw DomainError("find_all_above needs M > 0");
  const std::size_t N = oracle.domain_size();
  const int b = index_qubits_for(N);
  const std::size_t padded = std::size_t{1} << b;

  ThresholdRunReport report;
  report.M = M;
  report.seed = seed;
  report.m_star = options.m_star;
  if (options.p) {
    // values of B(L_p^N) are bounded by N^{1/p}; widen m* so beta does not clamp them
    const double peak = std::pow(static_cast<double>(N), options.p->reciprocal());
    const int need = 2 * (static_cast<int>(std::ceil(std::log2(std::max(peak, 1.0)))) + 2);
    report.m_star = std::max(report.m_star, need);
    const double bound = static_cast<double>(N) *
                         (options.p->is_infinite() ? (M <= 1.0 ? 1.0 : 0.0)
                                                   : std::pow(M, -options.p->value()));
    report.cardinality_bound = std::min<std::size_t>(N, static_cast<std::size_t>(std::floor(bound)));
  } else {
    report.cardinality_bound = N;
  }
  if (report.m_star % 2 != 0) ++report.m_star;

  const SearchSchedule schedule = SearchSchedule::make(padded, options.growth);
  report.round_miss_bound = schedule.worst_miss_probability();
  report.empty_rounds_rule =
      options.empty_rounds > 0
          ? options.empty_rounds
          : empty_rounds_for(fail_target, std::max<std::size_t>(1, report.cardinality_bound),
                             report.round_miss_bound);

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> active(N);
  for (std::size_t t = 0; t < N; ++t) active[t] = t;
  const std::uint64_t before = oracle.queries();
  std::size_t empty = 0;
  while (empty < report.empty_rounds_rule) {
    if (options.max_queries > 0 && oracle.queries() - before >= options.max_queries) {
      report.completed = false;
      break;
    }
    if (active.empty()) {
      // nothing left to search; the remaining empty rounds are certain
      break;
    }
    ++report.rounds;
    const QuerySpec marking = marking_query(b, active, M);
    const SearchResult r = grover_search_unknown(oracle, marking, schedule, rng);
    report.stage_queries += r.queries;
    if (!r.index) {
      ++empty;
      continue;
    }
    empty = 0;
    const std::uint64_t q0 = oracle.queries();
    const double y = read_value(oracle, *r.index, report.m_star, options.readout_chunk, rng);
    report.stage_queries += oracle.queries() - q0;
    report.found.emplace_back(*r.index, y);
    active.erase(std::find(active.begin(), active.end(), *r.index));
  }
  std::sort(report.found.begin(), report.found.end());
  report.queries_used = oracle.queries() - before;
  return report;
}

bool evaluate_against(ThresholdRunReport& report, const InputFunction& f, double M) {
  std::vector<std::size_t> truth;
  for (std::size_t t = 0; t < f.domain_size(); ++t)
    if (std::abs(f.values[t]) >= M) truth.push_back(t);
  bool ok = report.completed && truth.size() == report.found.size();
  const double res = decode_resolution(report.m_star);
  for (std::size_t k = 0; ok && k < truth.size(); ++k) {
    const auto& [t, y] = report.found[k];
    ok = t == truth[k] && std::abs(y - f.values[t]) <= res;
  }
  report.success = ok;
  return ok;
}

std::string to_json_line(const ThresholdRunReport& report) {
  nlohmann::ordered_json j;
  j["record"] = "threshold_run";
  j["M"] = report.M;
  j["seed"] = report.seed;
  j["m_star"] = report.m_star;
  j["queries_used"] = report.queries_used;
  j["rounds"] = report.rounds;
  j["empty_rounds_rule"] = report.empty_rounds_rule;
  j["round_miss_bound"] = report.round_miss_bound;
  j["cardinality_bound"] = report.cardinality_bound;
  j["completed"] = report.completed;
  auto found = nlohmann::ordered_json::array();
  for (const auto& [t, y] : report.found) found.push_back({t, y});
  j["found"] = found;
  if (report.success) {
    j["success"] = *report.success;
  } else {
    j["success"] = nullptr;
  }
  return j.dump();
}

double choose_threshold(std::size_t N, std::size_t n, Exponent p, double c_alg) {
  if (N < 1 || n < 1) throw DomainError("choose_threshold needs n, N >= 1");
  const double e = 2.0 * p.reciprocal();
  const double ratio = static_cast<double>(N) / static_cast<double>(n);
  const double lg = std::max(std::log2(static_cast<double>(n)) - 0.5 * log2_size(N), 1.0);
  return c_alg * std::pow(ratio, e) * std::pow(lg, e);
}

namespace {

bool heavy_part_fits(std::size_t N, std::size_t k, double M, Exponent p) {
  const double h = 1.25 * M;
  if (p.is_infinite()) return h <= 1.0;
  return static_cast<double>(k) * std::pow(h, p.value()) <= 0.9 * static_cast<double>(N);
}

}  // namespace

InputFunction planted_input(std::size_t N, std::size_t k, double M, Exponent p,
                            std::uint64_t seed) {
  if (k > N) throw DomainError("more planted entries than coordinates");
  if (!(M > 0.0)) throw DomainError("planted_input needs M > 0");
  if (!heavy_part_fits(N, k, M, p)) {
    throw DomainError("planted entries do not fit in the unit ball");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(N);
  for (std::size_t i = 0; i < N; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  const double light = std::min(0.3 * M, p.is_infinite() ? 1.0 : std::pow(0.1, p.reciprocal()));
  std::vector<double> v(N, 0.0);
  for (std::size_t j = 0; j < N; ++j) {
    if (j < k) {
      v[order[j]] = (rng() & 1U) ? 1.25 * M : -1.25 * M;
    } else {
      v[order[j]] = light * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    }
  }
  return InputFunction{std::move(v), "planted"};
}

std::size_t planted_budget(std::size_t N, std::size_t k, Exponent p, double c_alg) {
  for (std::size_t n = 1; n <= N * N; n *= 2) {
    if (n * n >= N && heavy_part_fits(N, k, choose_threshold(N, n, p, c_alg), p)) return n;
  }
  throw DomainError("no budget n <= N^2 leaves room for the planted entries");
}

std::string branch_name(EmbeddingResult::Branch b) {
  switch (b) {
    case EmbeddingResult::Branch::Threshold:
      return "threshold";
    case EmbeddingResult::Branch::Trivial:
      return "trivial";
    case EmbeddingResult::Branch::Degenerate:
      return "degenerate";
  }
  return "threshold";
}

EmbeddingResult approximate_embedding(QueryOracle& oracle, Exponent p, Exponent q,
                                      std::size_t n, std::uint64_t seed, double c_alg,
                                      double fail_target, ThresholdOptions options) {
  if (n < 1) throw DomainError("approximate_embedding needs n >= 1");
  const std::size_t N = oracle.domain_size();
  EmbeddingResult out;
  out.g = LpVector::zeros(N);
  if (!(p < q)) {
    out.branch = EmbeddingResult::Branch::Degenerate;
    out.error_bound = 1.0;
    out.note = "p >= q: only the trivial bound ||f||_q <= ||f||_p <= 1 applies";
    return out;
  }
  if (static_cast<double>(n) * static_cast<double>(n) < static_cast<double>(N)) {
    out.branch = EmbeddingResult::Branch::Trivial;
    out.error_bound = embedding_norm(N, p, q);
    out.note = "n < sqrt(N): zero output, error <= N^{1/p - 1/q}";
    return out;
  }
  out.M = choose_threshold(N, n, p, c_alg);
  options.p = p;
  auto report = find_all_above(oracle, out.M, fail_target, seed, options);
  std::vector<double> g(N, 0.0);
  for (const auto& [t, y] : report.found) g[t] = y;
  out.g = LpVector(std::move(g));
  out.error_bound = tail_bound(p, q, out.M) + decode_resolution(report.m_star);
  out.report = std::move(report);
  return out;
}

}  // namespace qapprox
