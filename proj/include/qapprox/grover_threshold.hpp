#pragma once

/**
 * @file
 * Threshold search: finds every coordinate of f with |f(i)| >= M using Grover
 * search for an unknown number of marked items, reads off the values through
 * the beta-encoded query register, and assembles the sparse approximation of
 * the embedding L_p^N -> L_q^N.
 *
 * All access to f goes through a QueryOracle; its meter is the query count.
 */

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qapprox/lp_spaces.hpp"
#include "qapprox/query_model.hpp"

namespace qapprox {

/// Number of index qubits b with 2^b >= N (at least 1).
int index_qubits_for(std::size_t N);

/// Marking query over the padded index range: m' = b index qubits, one
/// ancilla, beta(z) = [|z| >= M]. Only the listed `active` indices are in Z.
QuerySpec marking_query(int index_qubits, const std::vector<std::size_t>& active, double M);

/// U_0 = H on every qubit (ancilla prepared in |1>, so H gives |->), then
/// `iterations` rounds of (query, diffusion on the index block). The last
/// unitary returns the ancilla to |1>. Start the stage in basis state 1.
NoMeasureAlgorithm grover_stage(const QuerySpec& marking, std::size_t iterations);

/// sin^2((2j+1) theta), sin theta = sqrt(k/N).
double grover_success_closed_form(std::size_t N, std::size_t k, std::size_t iterations);

/// floor(pi / (4 theta)), the iteration count maximizing the closed form.
std::size_t best_iteration_count(std::size_t N, std::size_t k);

/// Iteration caps m_0, m_1, ... of one search round. Attempt a draws j
/// uniformly from [0, m_a). Caps grow by `growth` up to sqrt(N).
struct SearchSchedule {
  std::size_t padded_size = 1;
  std::vector<std::size_t> caps;

  /// Grows the caps geometrically and appends attempts until the exact
  /// per-round miss probability is <= 1/2 for every k in [1, N].
  static SearchSchedule make(std::size_t padded_size, double growth = 2.0);

  /// Exact probability that a round misses every one of k marked items.
  double miss_probability(std::size_t k) const;
  /// max over k in [1, N] of miss_probability(k).
  double worst_miss_probability() const;
};

/// Mean over j in [0, m) of sin^2((2j+1) theta).
double averaged_success(std::size_t m, double theta);

struct SearchResult {
  std::optional<std::size_t> index;
  std::uint64_t queries = 0;
  std::size_t attempts = 0;
};

/// One round of search with the given schedule. Each attempt runs a Grover
/// stage, measures, and confirms a measured active index with one
/// single-point marking query.
SearchResult grover_search_unknown(QueryOracle& oracle, const QuerySpec& marking,
                                   const SearchSchedule& schedule, std::mt19937_64& rng);

/// Convenience overload with its own generator.
SearchResult grover_search_unknown(QueryOracle& oracle, const QuerySpec& marking,
                                   std::uint64_t seed, double growth = 2.0);

/// Reads beta_encode(f(t), m_star) in chunks of `chunk` bits, one
/// single-point query per chunk, and returns gamma of the code.
double read_value(QueryOracle& oracle, std::size_t t, int m_star, int chunk,
                  std::mt19937_64& rng);

struct ThresholdOptions {
  int m_star = 20;
  int readout_chunk = 10;
  double growth = 2.0;
  /// Consecutive empty rounds that end the search; 0 picks it from fail_target.
  std::size_t empty_rounds = 0;
  /// Class exponent p for the bounds |f(i)| <= N^{1/p} and #{|f| >= M} <= N M^{-p}.
  std::optional<Exponent> p;
  /// Checked before each search round, so the round that crosses it runs to
  /// completion and the report is flagged incomplete. 0 means unlimited.
  std::uint64_t max_queries = 0;
};

struct ThresholdRunReport {
  std::vector<std::pair<std::size_t, double>> found;  // (index, y_i), by index
  std::uint64_t queries_used = 0;
  /// Sum of n_q over the executed stages; always equals queries_used.
  std::uint64_t stage_queries = 0;
  std::size_t rounds = 0;
  std::size_t empty_rounds_rule = 0;
  double round_miss_bound = 0.0;
  std::size_t cardinality_bound = 0;
  double M = 0.0;
  int m_star = 20;
  std::uint64_t seed = 0;
  bool completed = true;  // false on budget exhaustion
  std::optional<bool> success;
};

/// Search-and-exclude until `r` consecutive rounds find nothing. With
/// probability >= 1 - fail_target the result is exactly {i : |f(i)| >= M}.
ThresholdRunReport find_all_above(QueryOracle& oracle, double M, double fail_target,
                                  std::uint64_t seed, const ThresholdOptions& options = {});

/// Empty-round count r with cardinality_bound * miss^r <= fail_target / 2.
std::size_t empty_rounds_for(double fail_target, std::size_t cardinality_bound,
                             double miss);

/// Checks the report against a direct scan of f and stores the verdict.
bool evaluate_against(ThresholdRunReport& report, const InputFunction& f, double M);

std::string to_json_line(const ThresholdRunReport& report);

/// c_alg (N/n)^{2/p} max(log2(n / sqrt N), 1)^{2/p}.
double choose_threshold(std::size_t N, std::size_t n, Exponent p, double c_alg = 1.0);

/// k entries of magnitude 1.25 M with random signs at random positions, the
/// rest in [0, min(0.3 M, 0.1^{1/p})). Throws DomainError unless the heavy
/// part fits in 0.9 of the unit ball of L_p^N.
InputFunction planted_input(std::size_t N, std::size_t k, double M, Exponent p,
                            std::uint64_t seed);

/// Smallest power-of-two budget n with n^2 >= N whose threshold M leaves
/// room for k planted entries.
std::size_t planted_budget(std::size_t N, std::size_t k, Exponent p, double c_alg = 1.0);

struct EmbeddingResult {
  enum class Branch { Threshold, Trivial, Degenerate };
  Branch branch = Branch::Threshold;
  LpVector g;
  double M = 0.0;
  /// Guaranteed ||f - g||_q on success paths.
  double error_bound = 0.0;
  std::optional<ThresholdRunReport> report;
  std::string note;
};

std::string branch_name(EmbeddingResult::Branch b);

/// Sparse approximation of J f from queries. For p >= q, and for n < sqrt(N),
/// no queries are made and g = 0.
EmbeddingResult approximate_embedding(QueryOracle& oracle, Exponent p, Exponent q,
                                      std::size_t n, std::uint64_t seed, double c_alg = 1.0,
                                      double fail_target = 0.25,
                                      ThresholdOptions options = {});

}  // namespace qapprox
