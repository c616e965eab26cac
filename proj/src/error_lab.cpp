#include "qapprox/error_lab.hpp"

#include <algorithm>
#include <limits>
#include <json.hpp>

#include "qapprox/errors.hpp"

namespace qapprox {

double exact_error(const Element& target, const OutputDistribution& dist, double theta,
                   const NormFn& norm, double mass_slack) {
  if (theta >= 1.0) return 0.0;
  std::vector<std::pair<double, double>> dp;  // (distance, mass)
  dp.reserve(dist.support_size());
  Element diff(target.size());
  for (const auto& [g, p] : dist.atoms()) {
    if (g.size() != target.size()) throw StructuralError("output dimension mismatch");
    for (std::size_t i = 0; i < g.size(); ++i) diff[i] = target[i] - g[i];
    dp.emplace_back(norm(diff), p);
  }
  std::sort(dp.begin(), dp.end());
  // tail[i] = mass of atoms with index >= i
  std::vector<double> tail(dp.size() + 1, 0.0);
  for (std::size_t i = dp.size(); i-- > 0;) tail[i] = tail[i + 1] + dp[i].second;

  // candidate eps = 0
  {
    const auto first_positive = std::upper_bound(
        dp.begin(), dp.end(), std::make_pair(0.0, std::numeric_limits<double>::infinity()));
    if (tail[static_cast<std::size_t>(first_positive - dp.begin())] <= theta + mass_slack)
      return 0.0;
  }
  for (std::size_t i = 0; i < dp.size(); ++i) {
    // eps = dp[i].first; mass strictly beyond starts after the equal run
    std::size_t j = i;
    while (j < dp.size() && dp[j].first == dp[i].first) ++j;
    if (tail[j] <= theta + mass_slack) return dp[i].first;
    i = j - 1;
  }
  return dp.empty() ? 0.0 : dp.back().first;
}

ErrorProfile family_error(const SolutionOperator& S, const MeasuredAlgorithm& a,
                          std::span<const InputFunction> witnesses, double theta,
                          const NormFn& norm, std::string family_id,
                          const RunOptions& options) {
  if (witnesses.empty()) throw DomainError("family_error needs a nonempty witness family");
  ErrorProfile profile;
  profile.family_id = std::move(family_id);
  profile.theta = theta;
  for (std::size_t k = 0; k < witnesses.size(); ++k) {
    const RunReport run = run_algorithm(a, witnesses[k], options);
    const double e = exact_error(S(witnesses[k]), run.distribution, theta, norm);
    profile.per_witness.push_back(e);
    if (k == 0 || e > profile.supremum) {
      profile.supremum = e;
      profile.argmax = k;
    }
  }
  return profile;
}

FamilyMinimum min_query_error_over(std::span<const MeasuredAlgorithm> algorithms,
                                   std::size_t n, const SolutionOperator& S,
                                   std::span<const InputFunction> witnesses, double theta,
                                   const NormFn& norm, const RunOptions& options) {
  if (algorithms.empty()) throw DomainError("min_query_error_over needs a nonempty family");
  FamilyMinimum out;
  for (std::size_t k = 0; k < algorithms.size(); ++k) {
    if (algorithms[k].num_queries() > n) {
      throw DomainError("algorithm " + std::to_string(k) + " uses " +
                        std::to_string(algorithms[k].num_queries()) +
                        " queries, budget is " + std::to_string(n));
    }
    const double e = family_error(S, algorithms[k], witnesses, theta, norm, "", options).supremum;
    out.per_algorithm.push_back(e);
    if (k == 0 || e < out.value) {
      out.value = e;
      out.best_index = k;
    }
  }
  return out;
}

std::string to_json_line(const ErrorProfile& profile) {
  nlohmann::ordered_json j;
  j["record"] = "error_profile";
  j["family"] = profile.family_id;
  j["theta"] = profile.theta;
  j["supremum"] = profile.supremum;
  j["argmax"] = profile.argmax;
  j["per_witness"] = profile.per_witness;
  j["note"] = "supremum over a finite witness family; lower bound on the class supremum";
  return j.dump();
}

}  // namespace qapprox
