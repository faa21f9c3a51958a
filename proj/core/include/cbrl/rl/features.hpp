#pragma once

#include <array>

#include "cbrl/observation.hpp"

namespace cbrl::rl {

inline constexpr std::size_t kFeatureCount = 10;

/// hour/23, weekday/6, worked_out_today, fatigue/7, then the six last-hour
/// activity flags. Every entry lies in [0, 1].
using FeatureVector = std::array<double, kFeatureCount>;

/// Throws std::out_of_range for an observation outside its domain.
FeatureVector featurize(const Observation& obs);

}  // namespace cbrl::rl
