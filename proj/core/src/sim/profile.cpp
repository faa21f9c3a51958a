#include "cbrl/sim/profile.hpp"

#include <stdexcept>
#include <string>

namespace cbrl::sim {
namespace {

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw std::invalid_argument(what);
    }
}

using Probs = std::array<double, kDaysPerWeek>;
constexpr Probs kEveryDay{1, 1, 1, 1, 1, 1, 1};
constexpr Probs kNever{0, 0, 0, 0, 0, 0, 0};

ActivitySpec make(Activity a, double early, double late, double min_d, double max_d,
                  std::vector<Activity> priorities, Probs probs) {
    ActivitySpec s;
    s.activity = a;
    s.early_start = early;
    s.late_start = late;
    s.min_duration = min_d;
    s.max_duration = max_d;
    s.priority_over_this = std::move(priorities);
    s.prob_per_day = probs;
    return s;
}

}  // namespace

void ActivitySpec::validate() const {
    const std::string name(to_string(activity));
    require(early_start >= 0.0 && late_start < 24.0, name + ": start times must lie in [0, 24)");
    require(early_start <= late_start, name + ": early_start must not exceed late_start");
    require(min_duration > 0.0, name + ": min_duration must be positive");
    require(min_duration <= max_duration, name + ": min_duration must not exceed max_duration");
    require(sd_duration >= 0.0, name + ": sd_duration must be non-negative");
    for (const double p : prob_per_day) {
        require(p >= 0.0 && p <= 1.0, name + ": day probabilities must lie in [0, 1]");
    }
    for (const Activity other : priority_over_this) {
        require(other != activity, name + ": an activity cannot have priority over itself");
    }
}

void PlannerSpec::validate() const {
    require(t_plan_min >= 0.0, "planner: t_plan_min must be non-negative");
    require(t_plan_duration > 0.0, "planner: t_plan_duration must be positive");
    require(t_plan_sd >= 0.0, "planner: t_plan_sd must be non-negative");
}

void UserProfile::validate() const {
    for (std::size_t i = 0; i < kActivityCount; ++i) {
        require(activities[i].activity == kAllActivities[i],
                std::string(to_string(type)) + ": activity table out of order");
        activities[i].validate();
    }
    planner.validate();
    require(fatigue_threshold >= 0 && fatigue_threshold <= 7, "fatigue_threshold must lie in [0, 7]");
    require(second_workout_prob >= 0.0 && second_workout_prob <= 1.0,
            "second_workout_prob must lie in [0, 1]");
    if (acceptance_window) {
        require(acceptance_window->from_hour <= acceptance_window->to_hour,
                "acceptance window must be ordered");
    }
}

std::string_view to_string(ProfileType t) {
    switch (t) {
        case ProfileType::workaholic: return "workaholic";
        case ProfileType::arnold: return "arnold";
        case ProfileType::retiree: return "retiree";
    }
    return "unknown";
}

std::optional<ProfileType> profile_from_string(std::string_view name) {
    for (const auto t : kAllProfiles) {
        if (to_string(t) == name) {
            return t;
        }
    }
    return std::nullopt;
}

std::string_view to_string(AcceptanceRule r) {
    switch (r) {
        case AcceptanceRule::lunch_or_idle: return "lunch_or_idle";
        case AcceptanceRule::idle_only: return "idle_only";
        case AcceptanceRule::always: return "always";
    }
    return "unknown";
}

std::optional<AcceptanceRule> acceptance_rule_from_string(std::string_view name) {
    for (const auto r : {AcceptanceRule::lunch_or_idle, AcceptanceRule::idle_only, AcceptanceRule::always}) {
        if (to_string(r) == name) {
            return r;
        }
    }
    return std::nullopt;
}

UserProfile default_profile(ProfileType type) {
    using A = Activity;
    UserProfile p;
    p.type = type;
    switch (type) {
        case ProfileType::workaholic:
            p.activities = {
                make(A::sleep, 23, 23, 6, 7, {A::work}, kEveryDay),
                make(A::breakfast, 7, 7.5, 0.25, 0.25, {A::work}, kEveryDay),
                make(A::lunch, 12, 12, 0.25, 0.25, {}, kEveryDay),
                make(A::dinner, 18, 20, 0.5, 1, {}, kEveryDay),
                make(A::work, 8, 9, 10, 11, {}, {1, 1, 1, 1, 1, 0.8, 0}),
                make(A::work_out, 19.5, 20.5, 0.5, 1, {}, kNever),
            };
            p.planner = {3.0, 21.0, 0.1};  // chronic planner
            p.acceptance_rule = AcceptanceRule::lunch_or_idle;
            p.fatigue_threshold = 2;
            p.second_workout_prob = 0.1;
            break;
        case ProfileType::arnold:
            p.activities = {
                make(A::sleep, 22, 23, 8, 9, {A::work}, kEveryDay),
                make(A::breakfast, 8, 9, 0.25, 0.25, {A::work}, kEveryDay),
                make(A::lunch, 12, 13.5, 0.25, 0.5, {}, kEveryDay),
                make(A::dinner, 19, 20.5, 0.5, 1, {}, kEveryDay),
                make(A::work, 9, 9.5, 8, 8, {}, {1, 1, 0, 1, 0, 0, 0}),
                make(A::work_out, 16, 21, 1, 1, {}, kNever),
            };
            p.planner = {0.0, 24.0, 0.1};  // mixed planner
            p.acceptance_rule = AcceptanceRule::always;
            p.fatigue_threshold = 4;
            p.second_workout_prob = 0.5;
            break;
        case ProfileType::retiree:
            p.activities = {
                make(A::sleep, 22, 23.5, 8, 10, {A::work}, kEveryDay),
                make(A::breakfast, 7, 10, 0.5, 0.75, {A::work}, kEveryDay),
                make(A::lunch, 12, 14, 0.5, 0.75, {}, kEveryDay),
                make(A::dinner, 18, 20, 0.5, 1, {}, kEveryDay),
                make(A::work, 8, 9, 8, 8, {}, kNever),
                make(A::work_out, 19, 21.5, 0.5, 1, {}, kNever),
            };
            p.planner = {0.0, 1.0, 0.1};  // spontaneous planner
            p.acceptance_rule = AcceptanceRule::idle_only;
            p.fatigue_threshold = 1;
            p.second_workout_prob = 0.0;
            break;
    }
    return p;
}

std::array<UserProfile, kProfileCount> default_profiles() {
    return {default_profile(ProfileType::workaholic), default_profile(ProfileType::arnold),
            default_profile(ProfileType::retiree)};
}

}  // namespace cbrl::sim
