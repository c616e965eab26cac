#pragma once

/**
 * @file
 * Error semantics of randomized (quantum) algorithms: the error at level
 * theta, its supremum over a witness family, and family-relative minima as
 * upper estimates of the minimal query error.
 */

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qapprox/distribution.hpp"
#include "qapprox/query_model.hpp"

namespace qapprox {

/// Default level theta = 1/4.
inline constexpr double kDefaultTheta = 0.25;
/// Slack on probability-mass comparisons, absorbing rounding in simulated masses.
inline constexpr double kMassSlack = 1e-12;

/// inf{eps >= 0 : P(||target - zeta|| > eps) <= theta} for zeta ~ dist.
/// The infimum is attained at 0 or at one of the atom distances. Returns 0
/// when theta >= 1.
double exact_error(const Element& target, const OutputDistribution& dist, double theta,
                   const NormFn& norm, double mass_slack = kMassSlack);

using SolutionOperator = std::function<Element(const InputFunction&)>;

struct ErrorProfile {
  std::string family_id;
  double theta = kDefaultTheta;
  std::vector<double> per_witness;
  double supremum = 0.0;
  std::size_t argmax = 0;
  /// The supremum over a finite witness family never exceeds the supremum
  /// over the full input class.
  bool lower_bound_on_class_sup = true;
};

ErrorProfile family_error(const SolutionOperator& S, const MeasuredAlgorithm& a,
                          std::span<const InputFunction> witnesses, double theta,
                          const NormFn& norm, std::string family_id = "",
                          const RunOptions& options = {});

struct FamilyMinimum {
  double value = 0.0;
  std::size_t best_index = 0;
  std::vector<double> per_algorithm;
  /// Always true: a minimum over a declared family bounds e_n^q from above.
  bool upper_estimate = true;
};

/// Minimum of the family errors over algorithms that use at most n queries.
/// Throws DomainError for an empty family or a member exceeding the budget.
FamilyMinimum min_query_error_over(std::span<const MeasuredAlgorithm> algorithms,
                                   std::size_t n, const SolutionOperator& S,
                                   std::span<const InputFunction> witnesses, double theta,
                                   const NormFn& norm, const RunOptions& options = {});

/// One JSON object (single line) describing the profile.
std::string to_json_line(const ErrorProfile& profile);

}  // namespace qapprox
