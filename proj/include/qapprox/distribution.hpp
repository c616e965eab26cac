#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <vector>

namespace qapprox {

/// A point of the output space G = R^d.
using Element = std::vector<double>;

/// Norm on G, evaluated on a coordinate vector.
using NormFn = std::function<double(std::span<const double>)>;

/// Finite-support probability measure on G. Identical elements are merged.
class OutputDistribution {
 public:
  void add(const Element& element, double probability);

  const std::map<Element, double>& atoms() const { return atoms_; }
  std::size_t support_size() const { return atoms_.size(); }
  double total_mass() const;
  double probability_of(const Element& element) const;

  /// Pushes every atom through `map`.
  OutputDistribution transformed(const std::function<Element(const Element&)>& map) const;

 private:
  std::map<Element, double> atoms_;
};

/// Total variation distance (half the l1 distance of the atom weights).
double total_variation(const OutputDistribution& a, const OutputDistribution& b);

}  // namespace qapprox
