#include "qapprox/query_model.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <string>

#include "qapprox/errors.hpp"

namespace qapprox {

// --- encoders ---------------------------------------------------------------

BasisIndex beta_encode(double z, int m_star) {
  if (m_star < 2 || m_star % 2 != 0 || m_star > 62) {
    throw DomainError("beta_encode needs an even m* in [2, 62], got " +
                      std::to_string(m_star));
  }
  const double half = std::ldexp(1.0, m_star / 2 - 1);
  const BasisIndex top = (BasisIndex{1} << m_star) - 1;
  if (std::isnan(z)) throw DomainError("beta_encode of NaN");
  if (z < -half) return 0;
  if (z >= half) return top;
  const double scaled = std::floor(std::ldexp(z + half, m_star / 2));
  // z + half can round up to 2 * half for z just below half
  return std::min(static_cast<BasisIndex>(scaled), top);
}

double gamma_decode(BasisIndex y, int m_star) {
  if (m_star < 2 || m_star % 2 != 0 || m_star > 62) {
    throw DomainError("gamma_decode needs an even m* in [2, 62]");
  }
  if (y >= (BasisIndex{1} << m_star)) {
    throw DomainError("gamma_decode argument " + std::to_string(y) +
                      " outside [0, 2^" + std::to_string(m_star) + ")");
  }
  return std::ldexp(static_cast<double>(y), -m_star / 2) - std::ldexp(1.0, m_star / 2 - 1);
}

double decode_resolution(int m_star) { return std::ldexp(1.0, -m_star / 2); }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

BasisIndex BetaMap::operator()(double z, int register_width) const {
  const BasisIndex modulus = BasisIndex{1} << register_width;
  return std::visit(
      [&](const auto& k) -> BasisIndex {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, BetaEncode>) {
          return beta_encode(z, k.m_star);
        } else if constexpr (std::is_same_v<T, BetaIndicator>) {
          return std::abs(z) >= k.threshold ? 1 : 0;
        } else if constexpr (std::is_same_v<T, BetaModulo>) {
          const auto v = static_cast<long long>(std::floor(z));
          const auto mod = static_cast<long long>(modulus);
          return static_cast<BasisIndex>(((v % mod) + mod) % mod);
        } else if constexpr (std::is_same_v<T, BetaChunk>) {
          return (beta_encode(z, k.m_star) >> k.shift) & ((BasisIndex{1} << k.width) - 1);
        } else {
          const BasisIndex v = k.fn(z);
          if (v >= modulus) throw InputError("custom beta produced an out-of-range code");
          return v;
        }
      },
      kind_);
}

std::optional<BasisIndex> BetaMap::max_code(int register_width) const {
  return std::visit(
      [&](const auto& k) -> std::optional<BasisIndex> {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, BetaEncode>) {
          return (BasisIndex{1} << k.m_star) - 1;
        } else if constexpr (std::is_same_v<T, BetaIndicator>) {
          return BasisIndex{1};
        } else if constexpr (std::is_same_v<T, BetaModulo>) {
          return (BasisIndex{1} << register_width) - 1;
        } else if constexpr (std::is_same_v<T, BetaChunk>) {
          return (BasisIndex{1} << k.width) - 1;
        } else {
          return std::nullopt;
        }
      },
      kind_);
}

// --- queries ----------------------------------------------------------------

void QuerySpec::validate() const {
  if (m_prime < 1 || m_dblprime < 1 || m_prime + m_dblprime > m) {
    throw StructuralError("query widths need m', m'' >= 1 and m' + m'' <= m");
  }
  if (m > kDefaultMaxQubits) throw ResourceError("query register exceeds the qubit cap");
  if (Z.empty()) throw StructuralError("query index set Z is empty");
  if (tau.size() != Z.size()) throw StructuralError("tau must be defined on all of Z");
  const BasisIndex limit = BasisIndex{1} << m_prime;
  for (std::size_t k = 0; k < Z.size(); ++k) {
    if (Z[k] >= limit) throw StructuralError("Z element outside [0, 2^{m'})");
    if (k > 0 && Z[k] <= Z[k - 1]) throw StructuralError("Z must be sorted and distinct");
  }
  if (const auto top = beta.max_code(m_dblprime)) {
    if (*top >= (BasisIndex{1} << m_dblprime)) {
      throw StructuralError("beta range exceeds [0, 2^{m''})");
    }
  }
}

double InputFunction::at(std::size_t t) const {
  if (t >= values.size()) {
    throw InputError("input function " + (tag.empty() ? std::string("f") : tag) +
                     " is undefined at domain point " + std::to_string(t));
  }
  return values[t];
}

StructuredUnitary build_query_unitary(const QuerySpec& q, const InputFunction& f) {
  q.validate();
  const std::size_t index_count = std::size_t{1} << q.m_prime;
  // -1 marks i outside Z
  auto shift = std::make_shared<std::vector<std::int64_t>>(index_count, -1);
  for (std::size_t k = 0; k < q.Z.size(); ++k) {
    (*shift)[q.Z[k]] = static_cast<std::int64_t>(q.beta(f.at(q.tau[k]), q.m_dblprime));
  }
  const int low = q.m - q.m_prime - q.m_dblprime;
  const int index_shift = q.m - q.m_prime;
  const BasisIndex x_mask = (BasisIndex{1} << q.m_dblprime) - 1;
  return StructuredUnitary::permutation(q.m, [=](BasisIndex b) {
    const std::int64_t add = (*shift)[b >> index_shift];
    if (add < 0) return b;
    const BasisIndex x = (b >> low) & x_mask;
    const BasisIndex nx = (x + static_cast<BasisIndex>(add)) & x_mask;
    return (b & ~(x_mask << low)) | (nx << low);
  });
}

void PreparedQuery::apply(QubitState& state) const {
  unitary_.apply_in_place(state);
  ++*meter_;
}

PreparedQuery QueryOracle::prepare(const QuerySpec& q) const {
  return PreparedQuery(build_query_unitary(q, f_), &meter_);
}

// --- stages -----------------------------------------------------------------

void NoMeasureAlgorithm::validate() const {
  query.validate();
  if (unitaries.empty()) throw StructuralError("a stage needs at least U_0");
  for (const auto& u : unitaries) {
    if (u.num_qubits() != query.m) {
      throw StructuralError("stage unitary acts on " + std::to_string(u.num_qubits()) +
                            " qubits, query register has " + std::to_string(query.m));
    }
  }
}

QubitState run_stage(const NoMeasureAlgorithm& a, QueryOracle& oracle, BasisIndex start) {
  a.validate();
  QubitState state(a.num_qubits(), start);
  a.unitaries.front().apply_in_place(state);
  if (a.unitaries.size() > 1) {
    const PreparedQuery q = oracle.prepare(a.query);
    for (std::size_t j = 1; j < a.unitaries.size(); ++j) {
      q.apply(state);
      a.unitaries[j].apply_in_place(state);
    }
  }
  return state;
}

QubitState run_stage(const NoMeasureAlgorithm& a, const InputFunction& f, BasisIndex start) {
  QueryOracle oracle(f);
  return run_stage(a, oracle, start);
}

std::size_t MeasuredAlgorithm::num_queries() const {
  std::size_t n = 0;
  for (const auto& s : stages) n += s.num_queries();
  return n;
}

void MeasuredAlgorithm::validate() const {
  if (stages.empty()) throw StructuralError("an algorithm needs k >= 1 stages");
  if (selectors.size() != stages.size()) {
    throw StructuralError("one start selector per stage is required");
  }
  if (!output) throw StructuralError("algorithm has no output map");
  for (const auto& s : stages) s.validate();
}

StartSelector MeasuredAlgorithm::constant_start(BasisIndex b) {
  return [b](OutcomeSpan) { return b; };
}

namespace {

struct StageOutcomes {
  std::vector<std::pair<BasisIndex, double>> outcomes;
  std::uint64_t queries = 0;
};

/// Memoizes stage runs by (stage, start basis state).
class StageCache {
 public:
  StageCache(const MeasuredAlgorithm& a, const InputFunction& f) : a_(a), f_(f) {}

  const StageOutcomes& get(std::size_t l, BasisIndex start) {
    const BasisIndex limit = BasisIndex{1} << a_.stages[l].num_qubits();
    if (start >= limit) {
      throw StructuralError("selector for stage " + std::to_string(l) +
                            " returned start " + std::to_string(start) +
                            " outside [0, 2^" + std::to_string(a_.stages[l].num_qubits()) +
                            ")");
    }
    auto key = std::make_pair(l, start);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    QueryOracle oracle(f_);
    const QubitState psi = run_stage(a_.stages[l], oracle, start);
    StageOutcomes out;
    for (const auto& [x, p] : measurement_distribution(psi)) out.outcomes.emplace_back(x, p);
    out.queries = oracle.queries();
    return cache_.emplace(key, std::move(out)).first->second;
  }

 private:
  const MeasuredAlgorithm& a_;
  const InputFunction& f_;
  std::map<std::pair<std::size_t, BasisIndex>, StageOutcomes> cache_;
};

}  // namespace

RunReport run_algorithm(const MeasuredAlgorithm& a, const InputFunction& f,
                        const RunOptions& options) {
  a.validate();
  RunReport report;
  report.declared_queries = a.num_queries();
  report.metered_queries_min = ~std::uint64_t{0};
  StageCache cache(a, f);
  std::vector<BasisIndex> prefix;
  prefix.reserve(a.num_stages());

  std::function<void(std::size_t, double, std::uint64_t)> descend =
      [&](std::size_t l, double mass, std::uint64_t metered) {
        if (l == a.num_stages()) {
          if (++report.paths > options.max_paths) {
            throw ResourceError("path enumeration exceeded " +
                                std::to_string(options.max_paths) +
                                " paths; use sample_algorithm (Monte Carlo mode)");
          }
          report.distribution.add(a.output(prefix), mass);
          report.metered_queries_min = std::min(report.metered_queries_min, metered);
          report.metered_queries_max = std::max(report.metered_queries_max, metered);
          return;
        }
        const BasisIndex start = a.selectors[l](OutcomeSpan(prefix.data(), prefix.size()));
        const StageOutcomes& stage = cache.get(l, start);
        for (const auto& [x, p] : stage.outcomes) {
          const double next = mass * p;
          if (next < options.path_pruning) {
            report.pruned_mass += next;
            continue;
          }
          prefix.push_back(x);
          descend(l + 1, next, metered + stage.queries);
          prefix.pop_back();
        }
      };
  descend(0, 1.0, 0);
  if (report.paths == 0) report.metered_queries_min = 0;
  return report;
}

SampleReport sample_algorithm(const MeasuredAlgorithm& a, const InputFunction& f,
                              std::uint64_t trials, std::uint64_t seed) {
  a.validate();
  if (trials < 1) throw DomainError("sample_algorithm needs trials >= 1");
  SampleReport report;
  report.trials = trials;
  report.seed = seed;
  StageCache cache(a, f);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<BasisIndex> prefix;
  for (std::uint64_t t = 0; t < trials; ++t) {
    prefix.clear();
    for (std::size_t l = 0; l < a.num_stages(); ++l) {
      const BasisIndex start = a.selectors[l](OutcomeSpan(prefix.data(), prefix.size()));
      const auto& outcomes = cache.get(l, start).outcomes;
      double total = 0.0;
      for (const auto& o : outcomes) total += o.second;
      double u = unit(rng) * total;
      BasisIndex pick = outcomes.back().first;
      for (const auto& [x, p] : outcomes) {
        if (u < p) {
          pick = x;
          break;
        }
        u -= p;
      }
      prefix.push_back(pick);
    }
    ++report.counts[a.output(prefix)];
  }
  for (const auto& [g, c] : report.counts) {
    report.empirical.add(g, static_cast<double>(c) / static_cast<double>(trials));
  }
  return report;
}

}  // namespace qapprox
