#pragma once

/**
 * @file
 * The spaces L_p^N of real N-vectors with the normalized norm
 * ((1/N) sum |f(i)|^p)^{1/p} (max norm for p = infinity), the threshold
 * operator that keeps entries with |f(i)| >= M, and the matching tail bound.
 */

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qapprox {

/// An exponent in [1, infinity]. Infinity is a separate state, never a large float.
class Exponent {
 public:
  static Exponent finite(double p);
  static Exponent infinity() { return Exponent(); }
  /// Parses "1", "2.5", "inf" or "infinity".
  static Exponent parse(const std::string& text);

  bool is_infinite() const { return infinite_; }
  /// Finite value; throws for infinity.
  double value() const;
  /// 1/p, with 1/infinity = 0.
  double reciprocal() const { return infinite_ ? 0.0 : 1.0 / p_; }
  std::string str() const;

  friend bool operator==(const Exponent&, const Exponent&) = default;
  /// Order on [1, infinity].
  friend bool operator<(const Exponent& a, const Exponent& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.p_ < b.p_;
  }
  friend bool operator<=(const Exponent& a, const Exponent& b) { return !(b < a); }

 private:
  Exponent() = default;
  explicit Exponent(double p) : p_(p), infinite_(false) {}

  double p_ = 0.0;
  bool infinite_ = true;
};

class LpVector {
 public:
  LpVector() = default;
  explicit LpVector(std::vector<double> values);
  static LpVector zeros(std::size_t n) { return LpVector(std::vector<double>(n, 0.0)); }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }

  friend bool operator==(const LpVector&, const LpVector&) = default;

 private:
  std::vector<double> values_;
};

/// Normalized p-norm of an N-vector (N >= 1).
double lp_norm(std::span<const double> f, Exponent p);
inline double lp_norm(const LpVector& f, Exponent p) { return lp_norm(f.values(), p); }

/// Entrywise keep f(i) if |f(i)| >= M, else 0.
LpVector threshold(const LpVector& f, double M);

/// M^{1 - p/q}; requires p <= q. Returns M for q = infinity with p finite and
/// 1 whenever p = q.
double tail_bound(Exponent p, Exponent q, double M);

/// Arithmetic mean (1/N) sum f(i).
double mean(std::span<const double> f);
inline double mean(const LpVector& f) { return mean(f.values()); }

/// ||J_pq^N|| = N^{max(1/p - 1/q, 0)} for the normalized norms.
double embedding_norm(std::size_t N, Exponent p, Exponent q);

/// N^{1/p} e_j, the unit-norm spike of L_p^N.
LpVector spike(std::size_t N, std::size_t j, Exponent p);

/// Reproducible members of the unit ball of L_p^N, cycling through spikes,
/// constant vectors, sparse mixtures and rescaled Gaussian draws.
std::vector<LpVector> ball_sample(std::size_t N, Exponent p, std::size_t count,
                                  std::uint64_t seed);

/// One CSV row of N values, shortest round-trip formatting.
std::string to_csv_row(const LpVector& f);
LpVector parse_csv_row(const std::string& row);

}  // namespace qapprox
