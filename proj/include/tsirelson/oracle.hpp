#pragma once

#include <optional>
#include <stdexcept>

#include "tsirelson/norm.hpp"

namespace tsirelson {

class OracleRefusal : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Exhaustive reference evaluation: every admissible family of arbitrary
/// successive subsets of the support, at every node of the recursion tree.
/// `level` empty means the limit norm. Shares no code with the interval
/// dynamic program. Throws OracleRefusal above `max_support` entries.
Rational brute_force_norm(const FiniteVector& x, std::optional<unsigned> level, AdmissibilityRule rule,
                          std::size_t max_support = 8);

} // namespace tsirelson
