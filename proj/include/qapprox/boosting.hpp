#pragma once

/**
 * @file
 * Success-probability amplification by repetition: the order-statistic
 * median, its componentwise version on l_inf(T), the psi_delta construction
 * for spaces with a finite norming family, and the rho-selector.
 */

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qapprox/distribution.hpp"
#include "qapprox/lp_spaces.hpp"
#include "qapprox/query_model.hpp"

namespace qapprox {

/// ceil((nu+1)/2)-th smallest entry; for even nu this is the upper middle.
double median(std::span<const double> values);

/// Coordinatewise median of equally sized elements.
Element median_componentwise(std::span<const Element> elements);

/// A finite-dimensional output space G = R^d with its norm. A norming family
/// lists functionals t (as coefficient vectors, t(g) = <t, g>) with
/// |t(g)| <= ||g|| and max_t |t(g)| = ||g||.
struct NormedOutputSpace {
  std::string name;
  std::size_t dimension = 1;
  NormFn norm;
  std::vector<Element> norming_family;
  /// True when ||g|| = max_i |g_i|, i.e. G is l_inf^d on its own coordinates.
  bool sup_of_coordinates = false;

  static NormedOutputSpace real_line();
  static NormedOutputSpace l_infinity(std::size_t d);
  /// Normalized L_p^N. Carries a finite norming family for p = infinity
  /// (coordinates) and for p = 1 with N <= 12 (sign vectors scaled by 1/N).
  static NormedOutputSpace lp(std::size_t N, Exponent p);

  /// max_t |t(g)| (requires a norming family).
  double norming_sup(const Element& g) const;
};

/// Index i0 minimizing median_j ||g_j - g_i||, smallest index on ties.
std::size_t rho_select_index(std::span<const Element> elements, const NormFn& norm);
Element rho_select(std::span<const Element> elements, const NormFn& norm);

/// Best approximation in G of a point x of l_inf(T), measured in the sup
/// over T. Candidates listed in `prefer` are returned when they are within a
/// factor (1 + delta) of the optimum.
Element delta_projection(const Element& x, const NormedOutputSpace& space, double delta,
                         std::span<const Element> prefer = {});

/// pi_delta o componentwise-median o J^nu.
Element psi_delta(std::span<const Element> elements, const NormedOutputSpace& space,
                  double delta);

struct Selector {
  enum class Kind { ComponentwiseMedian, Rho, DeltaProjection };
  Kind kind = Kind::Rho;
  double delta = 0.0;

  static Selector rho() { return {Kind::Rho, 0.0}; }
  static Selector componentwise_median() { return {Kind::ComponentwiseMedian, 0.0}; }
  static Selector projection(double delta) { return {Kind::DeltaProjection, delta}; }

  /// Factor on e(S, A, f) guaranteed at level e^{-nu/8}: 1, 3 or 2 + delta.
  double error_constant() const;
  std::string name() const;
};

/// Throws StructuralError if `selector` cannot be used on `space`.
void check_compatible(const Selector& selector, const NormedOutputSpace& space);

Element combine(const Selector& selector, const NormedOutputSpace& space,
                std::span<const Element> elements);

/// Runs `a` nu times (independent stage blocks) and combines the nu outputs.
/// The query count is nu * n_q(a).
MeasuredAlgorithm boost(const MeasuredAlgorithm& a, std::size_t nu, const Selector& selector,
                        const NormedOutputSpace& space);

/// Replaces the output map phi by Phi o phi. The declared Lipschitz constant
/// must be >= 0; the query count is unchanged.
MeasuredAlgorithm lipschitz_postcompose(const MeasuredAlgorithm& a,
                                        std::function<Element(const Element&)> phi,
                                        double lipschitz_constant);

/// max ||Phi(x) - Phi(y)|| / ||x - y|| over distinct pairs of `points`.
double estimate_lipschitz(const std::function<Element(const Element&)>& phi,
                          std::span<const Element> points, const NormFn& norm_in,
                          const NormFn& norm_out);

/// Runs the algorithms one after another and outputs the sum of their outputs.
MeasuredAlgorithm sum_algorithms(std::span<const MeasuredAlgorithm> parts);

/// One-query mock on two qubits: outputs {wrong_value} with probability
/// fail_probability and {0} otherwise, whatever the input.
MeasuredAlgorithm failure_mock(double fail_probability, double wrong_value = 1.0);

/// e^{-nu/8}.
double hoeffding_failure_bound(std::size_t nu);

/// P(Bin(n, p) >= k), summed exactly in log space.
double binomial_upper_tail(std::size_t n, double p, std::size_t k);

}  // namespace qapprox
