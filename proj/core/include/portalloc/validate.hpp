#pragma once

#include <string>
#include <vector>

#include "portalloc/domain.hpp"

namespace portalloc {

struct Violation {
    std::string code;     ///< stable machine-readable tag, e.g. "probability_sum"
    std::string message;  ///< human-readable, carries index coordinates
};

inline constexpr double kProbabilityTolerance = 1e-9;
inline constexpr double kStaircaseTolerance = 1e-9;

/// Checks every domain invariant; an empty result means the pair is well formed.
std::vector<Violation> validate_instance(const MarketInstance& instance, const ScenarioSet& scenarios);

/// Instance-only subset of the checks above.
std::vector<Violation> validate_instance(const MarketInstance& instance);

}  // namespace portalloc
