#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace cbrl {

enum class Activity : std::uint8_t { sleep, breakfast, lunch, dinner, work, work_out };

inline constexpr std::size_t kActivityCount = 6;
inline constexpr std::array<Activity, kActivityCount> kAllActivities{
    Activity::sleep, Activity::breakfast, Activity::lunch,
    Activity::dinner, Activity::work, Activity::work_out};

constexpr std::size_t index_of(Activity a) { return static_cast<std::size_t>(a); }

std::string_view to_string(Activity a);
std::optional<Activity> activity_from_string(std::string_view name);

/// Simulated time, in whole seconds since the start of the simulation.
using Seconds = std::int64_t;

inline constexpr Seconds kSecondsPerHour = 3600;
inline constexpr int kHoursPerDay = 24;
inline constexpr int kDaysPerWeek = 7;
inline constexpr Seconds kSecondsPerDay = kSecondsPerHour * kHoursPerDay;

/// Fractional hours onto the one-second simulation grid.
inline Seconds hours_to_seconds(double hours) {
    return static_cast<Seconds>(std::llround(hours * static_cast<double>(kSecondsPerHour)));
}
inline double seconds_to_hours(Seconds s) {
    return static_cast<double>(s) / static_cast<double>(kSecondsPerHour);
}
constexpr Seconds day_start(int day) { return static_cast<Seconds>(day) * kSecondsPerDay; }
constexpr int day_of(Seconds t) { return static_cast<int>(t / kSecondsPerDay); }
constexpr int hour_of_day(Seconds t) { return static_cast<int>((t % kSecondsPerDay) / kSecondsPerHour); }
/// Day 0 is a Monday.
constexpr int weekday_of_day(int day) { return day % kDaysPerWeek; }

}  // namespace cbrl
