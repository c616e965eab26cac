#include "qapprox/lp_spaces.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "qapprox/errors.hpp"

namespace qapprox {

namespace {

class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += (std::abs(sum_) >= std::abs(x)) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void shrink_into_ball(std::vector<double>& v, Exponent p) {
  while (lp_norm(v, p) > 1.0) {
    for (auto& x : v) x *= 1.0 - 0x1p-50;
  }
}

}  // namespace

Exponent Exponent::finite(double p) {
  if (!(p >= 1.0) || std::isinf(p)) {
    throw DomainError("exponent must lie in [1, infinity), got " + std::to_string(p));
  }
  return Exponent(p);
}

Exponent Exponent::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return infinity();
  std::size_t used = 0;
  double p = 0.0;
  try {
    p = std::stod(text, &used);
  } catch (const std::exception&) {
    throw DomainError("cannot parse exponent '" + text + "'");
  }
  if (used != text.size()) throw DomainError("cannot parse exponent '" + text + "'");
  return finite(p);
}

double Exponent::value() const {
  if (infinite_) throw DomainError("infinite exponent has no finite value");
  return p_;
}

std::string Exponent::str() const {
  if (infinite_) return "inf";
  std::ostringstream os;
  os << p_;
  return os.str();
}

LpVector::LpVector(std::vector<double> values) : values_(std::move(values)) {
  for (double x : values_) {
    if (!std::isfinite(x)) throw DomainError("LpVector entries must be finite");
  }
}

double lp_norm(std::span<const double> f, Exponent p) {
  if (f.empty()) throw DomainError("lp_norm of an empty vector");
  double peak = 0.0;
  for (double x : f) peak = std::max(peak, std::abs(x));
  if (p.is_infinite() || peak == 0.0) return peak;
  const double pv = p.value();
  NeumaierSum acc;
  if (pv == 1.0) {
    for (double x : f) acc.add(std::abs(x));
    return acc.value() / static_cast<double>(f.size());
  }
  for (double x : f) acc.add(std::pow(std::abs(x) / peak, pv));
  return peak * std::pow(acc.value() / static_cast<double>(f.size()), 1.0 / pv);
}

LpVector threshold(const LpVector& f, double M) {
  if (!(M >= 0.0)) throw DomainError("threshold level M must be >= 0");
  std::vector<double> out(f.values().begin(), f.values().end());
  for (auto& x : out) {
    if (!(std::abs(x) >= M)) x = 0.0;
  }
  return LpVector(std::move(out));
}

double tail_bound(Exponent p, Exponent q, double M) {
  if (q < p) throw DomainError("tail bound needs p <= q");
  if (!(M >= 0.0)) throw DomainError("tail bound needs M >= 0");
  if (p == q) return 1.0;
  if (q.is_infinite()) return M;
  return std::pow(M, 1.0 - p.value() / q.value());
}

double mean(std::span<const double> f) {
  if (f.empty()) throw DomainError("mean of an empty vector");
  NeumaierSum acc;
  for (double x : f) acc.add(x);
  return acc.value() / static_cast<double>(f.size());
}

double embedding_norm(std::size_t N, Exponent p, Exponent q) {
  const double e = p.reciprocal() - q.reciprocal();
  return e > 0.0 ? std::pow(static_cast<double>(N), e) : 1.0;
}

LpVector spike(std::size_t N, std::size_t j, Exponent p) {
  if (j >= N) throw DomainError("spike index outside [0, N)");
  std::vector<double> v(N, 0.0);
  v[j] = std::pow(static_cast<double>(N), p.reciprocal());
  shrink_into_ball(v, p);
  return LpVector(std::move(v));
}

std::vector<LpVector> ball_sample(std::size_t N, Exponent p, std::size_t count,
                                  std::uint64_t seed) {
  if (N < 1) throw DomainError("ball_sample needs N >= 1");
  if (count < 1) throw DomainError("ball_sample needs count >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> index(0, N - 1);
  std::vector<LpVector> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<double> v(N, 0.0);
    switch (k % 4) {
      case 0: {
        auto s = spike(N, index(rng), p);
        v.assign(s.values().begin(), s.values().end());
        if (unit(rng) < 0.5)
          for (auto& x : v) x = -x;
        break;
      }
      case 1: {
        const double c = 2.0 * unit(rng) - 1.0;
        std::fill(v.begin(), v.end(), c);
        break;
      }
      case 2:
      case 3: {
        if (k % 4 == 2) {
          const std::size_t support = 1 + index(rng) % std::min<std::size_t>(N, 4);
          for (std::size_t s = 0; s < support; ++s) v[index(rng)] = gauss(rng);
        } else {
          for (auto& x : v) x = gauss(rng);
        }
        const double n = lp_norm(v, p);
        if (n > 0.0) {
          const double radius = unit(rng);
          for (auto& x : v) x *= radius / n;
        }
        break;
      }
    }
    shrink_into_ball(v, p);
    out.emplace_back(std::move(v));
  }
  return out;
}

std::string to_csv_row(const LpVector& f) {
  std::string row;
  char buf[64];
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) row.push_back(',');
    const auto res = std::to_chars(buf, buf + sizeof(buf), f[i]);
    row.append(buf, res.ptr);
  }
  return row;
}

LpVector parse_csv_row(const std::string& row) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= row.size()) {
    const std::size_t end = std::min(row.find(',', pos), row.size());
    double x = 0.0;
    const auto res = std::from_chars(row.data() + pos, row.data() + end, x);
    if (res.ec != std::errc() || res.ptr != row.data() + end) {
      throw DomainError("malformed CSV value in '" + row + "'");
    }
    values.push_back(x);
    pos = end + 1;
  }
  return LpVector(std::move(values));
}

}  // namespace qapprox
