#pragma once

#include <array>
#include <cstdint>

#include "cbrl/activity.hpp"

namespace cbrl {

/// What the learner sees of a user at an hourly decision point.
struct Observation {
    int hour = 0;     // 0..23
    int weekday = 0;  // 0..6, Monday first
    bool worked_out_today = false;
    int fatigue = 0;  // 0..7
    /// Activities performed at any point during the previous hour, in
    /// kAllActivities order. Several flags may be set at once.
    std::array<bool, kActivityCount> last_hour{};

    /// Throws std::out_of_range when a field is outside its domain.
    void validate() const;

    /// Dense 18-bit encoding used as the tabular key.
    std::uint32_t key() const;
    static Observation from_key(std::uint32_t key);

    friend bool operator==(const Observation&, const Observation&) = default;
};

}  // namespace cbrl
