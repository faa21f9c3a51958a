#include "cbrl/sim/schedule.hpp"

namespace cbrl::sim {

DayPlan generate_day_plan(const UserProfile& profile, int weekday, Rng& rng) {
    if (weekday < 0 || weekday >= kDaysPerWeek) {
        throw std::out_of_range("weekday must lie in [0, 6]");
    }
    DayPlan plan;
    plan.weekday = weekday;
    for (const auto a : kAllActivities) {
        const auto& spec = profile.spec(a);
        auto& item = plan[a];
        item.start = rng.uniform(spec.early_start, spec.late_start);
        item.duration = rng.uniform(spec.min_duration, spec.max_duration);
        item.active = rng.bernoulli(spec.prob_per_day[static_cast<std::size_t>(weekday)]);
    }
    return plan;
}

ActivityQueue clean_up_queue(ActivityQueue queue, Seconds t) {
    std::erase_if(queue, [t](const QueueEntry& e) { return e.end <= t; });
    return queue;
}

namespace {

bool queued(const ActivityQueue& queue, Activity a) {
    return std::any_of(queue.begin(), queue.end(), [a](const QueueEntry& e) { return e.activity == a; });
}

std::optional<Activity> preempting(const ActivityQueue& queue, Activity over, const UserProfile& profile) {
    const auto& priorities = profile.spec(over).priority_over_this;
    for (const auto& e : queue) {
        if (std::find(priorities.begin(), priorities.end(), e.activity) != priorities.end()) {
            return e.activity;
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<Activity> select_from_queue(const ActivityQueue& queue, std::optional<Activity> current,
                                          const UserProfile& profile) {
    if (queue.empty()) {
        return std::nullopt;
    }
    Activity chosen = (current && queued(queue, *current)) ? *current : queue.front().activity;
    // Bounded so that a cyclic priority table cannot loop forever.
    for (std::size_t hop = 0; hop < queue.size(); ++hop) {
        const auto next = preempting(queue, chosen, profile);
        if (!next) {
            break;
        }
        chosen = *next;
    }
    return chosen;
}

}  // namespace cbrl::sim
