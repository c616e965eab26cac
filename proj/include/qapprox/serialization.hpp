#pragma once

/**
 * @file
 * JSON form of measured algorithms: query specs, gates by kind, selectors and
 * the output map as tables over all outcome tuples. Permutations and phase
 * predicates are tabulated, so documents are only practical at small sizes.
 */

#include <string>

#include "qapprox/query_model.hpp"

namespace qapprox {

inline constexpr int kAlgorithmSchemaVersion = 1;

/// Throws ResourceError when a table would exceed 2^16 entries and
/// StructuralError for custom beta maps.
std::string algorithm_to_json(const MeasuredAlgorithm& a, int indent = -1);

/// Inverse of algorithm_to_json. Selectors and the output map become table
/// lookups.
MeasuredAlgorithm algorithm_from_json(const std::string& text);

}  // namespace qapprox
