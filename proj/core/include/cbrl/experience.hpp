#pragma once

#include <vector>

#include "cbrl/observation.hpp"

namespace cbrl {

/// One hourly transition <s, i, r, s'>. Action 1 sends an intervention.
struct Experience {
    Observation state;
    int action = 0;
    double reward = 0.0;
    Observation next;

    friend bool operator==(const Experience&, const Experience&) = default;
};

/// A user's experiences in chronological order.
using Trace = std::vector<Experience>;

inline constexpr int kActionCount = 2;

}  // namespace cbrl
