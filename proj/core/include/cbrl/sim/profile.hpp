#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "cbrl/activity.hpp"

namespace cbrl::sim {

/// Prototype schedule entry for one activity. Times are fractional hours of day.
struct ActivitySpec {
    Activity activity = Activity::sleep;
    double early_start = 0.0;
    double late_start = 0.0;
    double min_duration = 0.0;
    double max_duration = 0.0;
    /// Kept for completeness of the prototype; durations are drawn uniformly
    /// on [min_duration, max_duration] and this value is not consulted.
    double sd_duration = 0.0;
    /// Activities that pre-empt this one when both are queued.
    std::vector<Activity> priority_over_this;
    /// Probability of performing the activity, Monday..Sunday.
    std::array<double, kDaysPerWeek> prob_per_day{};

    void validate() const;
    friend bool operator==(const ActivitySpec&, const ActivitySpec&) = default;
};

/// Planning horizon: a prompted activity is only scheduled into an idle gap
/// starting between t_plan_min and t_plan_min + t_plan_duration hours after
/// the prompt. t_plan_sd is the spread of t_plan_min across spawned agents.
struct PlannerSpec {
    double t_plan_min = 0.0;
    double t_plan_duration = 0.0;
    double t_plan_sd = 0.0;

    void validate() const;
    friend bool operator==(const PlannerSpec&, const PlannerSpec&) = default;
};

enum class ProfileType { workaholic, arnold, retiree };
inline constexpr std::size_t kProfileCount = 3;
inline constexpr std::array<ProfileType, kProfileCount> kAllProfiles{
    ProfileType::workaholic, ProfileType::arnold, ProfileType::retiree};

enum class AcceptanceRule { lunch_or_idle, idle_only, always };

/// Optional hour-of-day window outside of which prompts are always refused.
/// None of the shipped profiles set one.
struct AcceptanceWindow {
    double from_hour = 0.0;
    double to_hour = 24.0;
    friend bool operator==(const AcceptanceWindow&, const AcceptanceWindow&) = default;
};

struct UserProfile {
    ProfileType type = ProfileType::workaholic;
    /// Indexed by Activity.
    std::array<ActivitySpec, kActivityCount> activities{};
    PlannerSpec planner;
    AcceptanceRule acceptance_rule = AcceptanceRule::always;
    int fatigue_threshold = 0;
    double second_workout_prob = 0.0;
    std::optional<AcceptanceWindow> acceptance_window;

    const ActivitySpec& spec(Activity a) const { return activities[index_of(a)]; }
    ActivitySpec& spec(Activity a) { return activities[index_of(a)]; }

    void validate() const;
    friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

std::string_view to_string(ProfileType t);
std::optional<ProfileType> profile_from_string(std::string_view name);
std::string_view to_string(AcceptanceRule r);
std::optional<AcceptanceRule> acceptance_rule_from_string(std::string_view name);
constexpr std::size_t index_of(ProfileType t) { return static_cast<std::size_t>(t); }

/// The three prototypical users with their published schedule parameters.
UserProfile default_profile(ProfileType type);
std::array<UserProfile, kProfileCount> default_profiles();

}  // namespace cbrl::sim
