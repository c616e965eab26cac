#pragma once

/**
 * @file
 * Quantum query algorithms: queries Q = (m, m', m'', Z, tau, beta), stages
 * A = (Q, U_0..U_n) without measurement, algorithms with k measurements, and
 * their exact output distributions.
 *
 * Input functions live on D = [0, N) with real values. A query writes
 * beta(f(tau(i))) into the m''-qubit register that follows the m'-qubit index
 * register, by addition modulo 2^{m''}.
 */

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qapprox/distribution.hpp"
#include "qapprox/statevector.hpp"

namespace qapprox {

/// beta_encode at width m_star (fixed-point grid of step 2^{-m*/2}).
struct BetaEncode {
  int m_star = 2;
};
/// 1 if |z| >= threshold, else 0.
struct BetaIndicator {
  double threshold = 0.0;
};
/// floor(z) mod 2^{m''}; for integer-valued inputs.
struct BetaModulo {};
/// Bits [shift, shift + width) of beta_encode(z, m_star).
struct BetaChunk {
  int m_star = 2;
  int shift = 0;
  int width = 1;
};
/// Arbitrary encoder; not serializable.
struct BetaCustom {
  std::function<BasisIndex(double)> fn;
};

class BetaMap {
 public:
  using Kind = std::variant<BetaEncode, BetaIndicator, BetaModulo, BetaChunk, BetaCustom>;

  BetaMap() : kind_(BetaModulo{}) {}
  BetaMap(Kind kind) : kind_(std::move(kind)) {}  // NOLINT(implicit)

  /// Encodes z for a value register of `register_width` qubits.
  BasisIndex operator()(double z, int register_width) const;

  /// Largest code this map can produce (for range validation).
  std::optional<BasisIndex> max_code(int register_width) const;

  const Kind& kind() const { return kind_; }

 private:
  Kind kind_;
};

struct QuerySpec {
  int m = 1;
  int m_prime = 1;
  int m_dblprime = 0;
  std::vector<BasisIndex> Z;     // sorted, distinct, within [0, 2^{m'})
  std::vector<std::size_t> tau;  // tau[k] is the domain point queried by Z[k]
  BetaMap beta;

  void validate() const;
};

/// f : [0, N) -> R.
struct InputFunction {
  std::vector<double> values;
  std::string tag;

  std::size_t domain_size() const { return values.size(); }
  double at(std::size_t t) const;
};

/// Q_f as a basis permutation: |i>|x>|y> -> |i>|x + beta(f(tau(i))) mod 2^{m''}>|y>
/// for i in Z, identity otherwise.
StructuredUnitary build_query_unitary(const QuerySpec& q, const InputFunction& f);

class QueryOracle;

/// A query unitary bound to an oracle; every application increments the meter.
class PreparedQuery {
 public:
  void apply(QubitState& state) const;

 private:
  friend class QueryOracle;
  PreparedQuery(StructuredUnitary u, std::uint64_t* meter)
      : unitary_(std::move(u)), meter_(meter) {}

  StructuredUnitary unitary_;
  std::uint64_t* meter_;
};

/// Metered access to an input function. Consumers that must not read f
/// directly receive a QueryOracle; the meter is the only query count.
class QueryOracle {
 public:
  explicit QueryOracle(InputFunction f) : f_(std::move(f)) {}

  QueryOracle(const QueryOracle&) = delete;
  QueryOracle& operator=(const QueryOracle&) = delete;

  PreparedQuery prepare(const QuerySpec& q) const;
  std::uint64_t queries() const { return meter_; }
  std::size_t domain_size() const { return f_.domain_size(); }

 private:
  InputFunction f_;
  mutable std::uint64_t meter_ = 0;
};

struct NoMeasureAlgorithm {
  QuerySpec query;
  std::vector<StructuredUnitary> unitaries;  // U_0..U_n

  int num_qubits() const { return query.m; }
  std::size_t num_queries() const { return unitaries.empty() ? 0 : unitaries.size() - 1; }
  void validate() const;
};

using OutcomeSpan = std::span<const BasisIndex>;
using StartSelector = std::function<BasisIndex(OutcomeSpan)>;
using OutputMap = std::function<Element(OutcomeSpan)>;

struct MeasuredAlgorithm {
  std::vector<NoMeasureAlgorithm> stages;
  /// selectors[l] receives the outcomes x_0..x_{l-1}; selectors[0] gets none.
  std::vector<StartSelector> selectors;
  OutputMap output;

  std::size_t num_stages() const { return stages.size(); }
  std::size_t num_queries() const;
  void validate() const;

  static StartSelector constant_start(BasisIndex b);
};

/// A_f |start>.
QubitState run_stage(const NoMeasureAlgorithm& a, QueryOracle& oracle, BasisIndex start);
QubitState run_stage(const NoMeasureAlgorithm& a, const InputFunction& f, BasisIndex start);

struct RunOptions {
  double path_pruning = kProbabilityPruning;
  std::size_t max_paths = std::size_t{1} << 20;
};

struct RunReport {
  OutputDistribution distribution;
  std::uint64_t declared_queries = 0;
  /// Query applications actually performed along each path, min and max.
  std::uint64_t metered_queries_min = 0;
  std::uint64_t metered_queries_max = 0;
  std::size_t paths = 0;
  double pruned_mass = 0.0;
};

/// Exact output distribution by enumerating all measurement paths.
/// Throws ResourceError when the path count exceeds options.max_paths.
RunReport run_algorithm(const MeasuredAlgorithm& a, const InputFunction& f,
                        const RunOptions& options = {});

struct SampleReport {
  OutputDistribution empirical;
  std::map<Element, std::uint64_t> counts;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

/// Monte Carlo surrogate for run_algorithm; reproducible for a given seed.
SampleReport sample_algorithm(const MeasuredAlgorithm& a, const InputFunction& f,
                              std::uint64_t trials, std::uint64_t seed);

/// Real-number discretization onto [0, 2^{m*}); m_star even and >= 2.
BasisIndex beta_encode(double z, int m_star);
/// Inverse grid map 2^{-m*/2} y - 2^{m*/2-1}.
double gamma_decode(BasisIndex y, int m_star);
/// Grid step 2^{-m*/2}.
double decode_resolution(int m_star);

/// splitmix64 step; used to derive independent per-trial seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace qapprox
