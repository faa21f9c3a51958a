#include "cbrl/observation.hpp"

#include <stdexcept>
#include <string>

namespace cbrl {

std::string_view to_string(Activity a) {
    switch (a) {
        case Activity::sleep: return "sleep";
        case Activity::breakfast: return "breakfast";
        case Activity::lunch: return "lunch";
        case Activity::dinner: return "dinner";
        case Activity::work: return "work";
        case Activity::work_out: return "work_out";
    }
    return "unknown";
}

std::optional<Activity> activity_from_string(std::string_view name) {
    for (const auto a : kAllActivities) {
        if (to_string(a) == name) {
            return a;
        }
    }
    return std::nullopt;
}

void Observation::validate() const {
    if (hour < 0 || hour >= kHoursPerDay) {
        throw std::out_of_range("observation hour out of range: " + std::to_string(hour));
    }
    if (weekday < 0 || weekday >= kDaysPerWeek) {
        throw std::out_of_range("observation weekday out of range: " + std::to_string(weekday));
    }
    if (fatigue < 0 || fatigue > 7) {
        throw std::out_of_range("observation fatigue out of range: " + std::to_string(fatigue));
    }
}

// layout (lsb first): flags[6] | fatigue[3] | worked[1] | weekday[3] | hour[5]
std::uint32_t Observation::key() const {
    std::uint32_t k = static_cast<std::uint32_t>(hour);
    k = (k << 3) | static_cast<std::uint32_t>(weekday);
    k = (k << 1) | (worked_out_today ? 1U : 0U);
    k = (k << 3) | static_cast<std::uint32_t>(fatigue);
    for (const bool flag : last_hour) {
        k = (k << 1) | (flag ? 1U : 0U);
    }
    return k;
}

Observation Observation::from_key(std::uint32_t key) {
    Observation o;
    for (std::size_t i = kActivityCount; i-- > 0;) {
        o.last_hour[i] = (key & 1U) != 0;
        key >>= 1;
    }
    o.fatigue = static_cast<int>(key & 7U);
    key >>= 3;
    o.worked_out_today = (key & 1U) != 0;
    key >>= 1;
    o.weekday = static_cast<int>(key & 7U);
    key >>= 3;
    o.hour = static_cast<int>(key);
    return o;
}

}  // namespace cbrl
