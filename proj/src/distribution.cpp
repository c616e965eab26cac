#include "qapprox/distribution.hpp"

#include <cmath>

namespace qapprox {

void OutputDistribution::add(const Element& element, double probability) {
  if (probability == 0.0) return;
  atoms_[element] += probability;
}

double OutputDistribution::total_mass() const {
  // Neumaier summation
  double sum = 0.0, comp = 0.0;
  for (const auto& [_, p] : atoms_) {
    const double t = sum + p;
    comp += (std::abs(sum) >= std::abs(p)) ? (sum - t) + p : (p - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double OutputDistribution::probability_of(const Element& element) const {
  const auto it = atoms_.find(element);
  return it == atoms_.end() ? 0.0 : it->second;
}

OutputDistribution OutputDistribution::transformed(
    const std::function<Element(const Element&)>& map) const {
  OutputDistribution out;
  for (const auto& [g, p] : atoms_) out.add(map(g), p);
  return out;
}

double total_variation(const OutputDistribution& a, const OutputDistribution& b) {
  double acc = 0.0;
  auto ia = a.atoms().begin();
  auto ib = b.atoms().begin();
  while (ia != a.atoms().end() || ib != b.atoms().end()) {
    if (ib == b.atoms().end() || (ia != a.atoms().end() && ia->first < ib->first)) {
      acc += std::abs(ia->second);
      ++ia;
    } else if (ia == a.atoms().end() || ib->first < ia->first) {
      acc += std::abs(ib->second);
      ++ib;
    } else {
      acc += std::abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return 0.5 * acc;
}

}  // namespace qapprox
