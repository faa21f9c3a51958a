#include "cbrl/sim/user.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cbrl::sim {

void RewardParams::validate() const {
    if (!(acceptance > 0.0) || !(rejection < 0.0)) {
        throw std::invalid_argument("reward: acceptance must be positive and rejection negative");
    }
    if (completion_per_hour < 0.0 || fatigue_penalty_per_level < 0.0) {
        throw std::invalid_argument("reward: completion and fatigue scales must be non-negative");
    }
}

double effective_workout_duration(double base_hours, int fatigue, int threshold) {
    if (fatigue <= threshold) {
        return base_hours;
    }
    return base_hours / std::sqrt(static_cast<double>(fatigue));
}

double workout_completion_reward(double duration_hours, const RewardParams& params) {
    return params.completion_per_hour * duration_hours;
}

double fatigue_penalty(int fatigue, int threshold, const RewardParams& params) {
    return -params.fatigue_penalty_per_level * static_cast<double>(std::max(0, fatigue - threshold));
}

struct LiveHooks {
    SimUser& user;

    Seconds workout_length(double base_hours, Seconds start) const { return user.workout_length(base_hours, start); }

    void on_segment(const Segment& s) {
        if (s.activity) {
            user.hour_flags_[index_of(*s.activity)] = true;
        }
        if (user.recorder_ != nullptr) {
            user.recorder_->push_back(s);
        }
    }

    void on_expired(QueueEntry& e) {
        if (e.activity == Activity::work_out && !e.finalized) {
            user.finalize_workout(e);
        }
    }
};

namespace {

// Dry run of the rest of the day; collects idle stretches and leaves no trace.
struct ProjectionHooks {
    int fatigue;
    int threshold;
    std::vector<Segment> idle;

    Seconds workout_length(double base_hours, Seconds start) const {
        const Seconds len = hours_to_seconds(effective_workout_duration(base_hours, fatigue, threshold));
        return std::min(len, day_start(day_of(start) + 1) - start);
    }

    void on_segment(const Segment& s) {
        if (s.activity) {
            return;
        }
        if (!idle.empty() && idle.back().end == s.begin) {
            idle.back().end = s.end;
        } else {
            idle.push_back(s);
        }
    }

    void on_expired(QueueEntry&) {}
};

}  // namespace

SimUser::SimUser(int id, UserProfile profile, Rng rng, RewardParams rewards)
    : id_(id), profile_(std::move(profile)), rewards_(rewards), rng_(std::move(rng)) {
    profile_.validate();
    const double jitter = profile_.planner.t_plan_sd > 0.0 ? rng_.normal(0.0, profile_.planner.t_plan_sd) : 0.0;
    agent_t_plan_min_ = std::max(0.0, profile_.planner.t_plan_min + jitter);
}

void SimUser::begin_day(int day) {
    const DayPlan plan = generate_day_plan(profile_, weekday_of_day(day), rng_);
    begin_day(day, plan);
}

void SimUser::begin_day(int day, const DayPlan& plan) {
    if (day_open_) {
        throw std::logic_error("begin_day called while day " + std::to_string(day_) + " is still open");
    }
    if (!clock_started_) {
        runner_.reset_clock(day_start(day));
        clock_started_ = true;
    } else if (runner_.now() != day_start(day)) {
        throw std::logic_error("days must be simulated consecutively");
    }
    const Seconds start_of_day = day_start(day);
    for (const auto a : kAllActivities) {
        const auto& item = plan[a];
        if (item.active) {
            runner_.schedule(a, start_of_day + hours_to_seconds(item.start),
                             std::max<Seconds>(1, hours_to_seconds(item.duration)));
        }
    }
    plan_ = plan;
    day_ = day;
    day_open_ = true;
    next_hour_ = 0;
    accepted_today_ = 0;
}

Observation SimUser::observe() const {
    Observation o;
    o.hour = hour_of_day(runner_.now());
    o.weekday = weekday_of_day(day_of(runner_.now()));
    o.worked_out_today = workouts_today_ > 0;
    o.fatigue = fatigue_;
    o.last_hour = last_hour_flags_;
    return o;
}

HourOutcome SimUser::step_hour(bool send) {
    if (!day_open_ || next_hour_ >= kHoursPerDay) {
        throw std::logic_error("step_hour called outside an open day");
    }
    const Seconds t = day_start(day_) + static_cast<Seconds>(next_hour_) * kSecondsPerHour;
    hour_events_.clear();
    hour_flags_ = {};

    LiveHooks hooks{*this};
    runner_.tick(profile_, hooks);

    HourOutcome out;
    out.hour = next_hour_;
    out.sent = send;
    if (send) {
        out.accepted = handle_intervention(t);
        hour_events_.push_back(RewardEvent{id_, t, out.accepted ? RewardKind::acceptance : RewardKind::rejection,
                                           out.accepted ? rewards_.acceptance : rewards_.rejection});
        if (out.accepted && runner_.has_arrival_at(t)) {
            runner_.tick(profile_, hooks);
        }
    }
    runner_.advance(profile_, t + kSecondsPerHour, hooks);
    close_hour(t + kSecondsPerHour);

    last_hour_flags_ = hour_flags_;
    ++next_hour_;
    out.events = hour_events_;
    for (const auto& e : out.events) {
        out.reward += e.value;
    }
    return out;
}

bool SimUser::acceptance_rule_allows(Seconds t_send) const {
    if (profile_.acceptance_window) {
        const double h = seconds_to_hours(t_send - day_start(day_of(t_send)));
        if (h < profile_.acceptance_window->from_hour || h > profile_.acceptance_window->to_hour) {
            return false;
        }
    }
    const auto current = runner_.current();
    switch (profile_.acceptance_rule) {
        case AcceptanceRule::always: return true;
        case AcceptanceRule::idle_only: return !current.has_value();
        case AcceptanceRule::lunch_or_idle: return !current.has_value() || *current == Activity::lunch;
    }
    return false;
}

bool SimUser::handle_intervention(Seconds t_send) {
    if (!day_open_ || runner_.now() != t_send) {
        throw std::logic_error("interventions are handled at the current instant of an open day");
    }
    if (!acceptance_rule_allows(t_send)) {
        return false;
    }
    if (accepted_today_ > 0 && !rng_.bernoulli(profile_.second_workout_prob)) {
        return false;
    }
    const Seconds from = t_send + hours_to_seconds(agent_t_plan_min_);
    const Seconds to = from + hours_to_seconds(profile_.planner.t_plan_duration);
    const auto& workout = profile_.spec(Activity::work_out);
    const auto gap = find_idle_gap(from, to, hours_to_seconds(workout.min_duration));
    if (!gap) {
        return false;
    }
    const double base = rng_.uniform(workout.min_duration, workout.max_duration);
    runner_.schedule_workout(*gap, base);
    ++accepted_today_;
    return true;
}

std::optional<Seconds> SimUser::find_idle_gap(Seconds from, Seconds to, Seconds min_length) const {
    const Seconds midnight = day_start(day_of(runner_.now()) + 1);
    if (from >= midnight) {
        return std::nullopt;
    }
    ScheduleRunner projection = runner_;
    ProjectionHooks hooks{fatigue_, profile_.fatigue_threshold, {}};
    projection.advance(profile_, midnight, hooks);
    for (const auto& idle : hooks.idle) {
        const Seconds start = std::max(idle.begin, from);
        if (start > to) {
            break;
        }
        if (start + min_length <= idle.end) {
            return start;
        }
    }
    return std::nullopt;
}

void SimUser::queue_workout(Seconds start, double base_hours) {
    runner_.schedule_workout(start, base_hours);
    if (day_open_ && start == runner_.now()) {
        LiveHooks hooks{*this};
        runner_.tick(profile_, hooks);
    }
}

Seconds SimUser::workout_length(double base_hours, Seconds start) const {
    const double hours = effective_workout_duration(base_hours, fatigue_, profile_.fatigue_threshold);
    // A workout never runs past the midnight of the day it started.
    return std::min(hours_to_seconds(hours), day_start(day_of(start) + 1) - start);
}

void SimUser::finalize_workout(QueueEntry& entry) {
    entry.finalized = true;
    if (entry.performed <= 0) {
        return;
    }
    hour_events_.push_back(RewardEvent{id_, entry.end - 1, RewardKind::workout_completion,
                                       workout_completion_reward(seconds_to_hours(entry.performed), rewards_)});
    fatigue_ = std::min(kMaxFatigue, fatigue_ + 1);
    ++workouts_today_;
}

void SimUser::close_hour(Seconds boundary) {
    for (auto& e : runner_.queue()) {
        if (e.activity == Activity::work_out && !e.finalized && e.end <= boundary) {
            finalize_workout(e);
        }
    }
}

std::optional<RewardEvent> SimUser::end_day() {
    if (!day_open_) {
        throw std::logic_error("end_day called twice for day " + std::to_string(day_));
    }
    if (next_hour_ != kHoursPerDay) {
        throw std::logic_error("end_day called before all hours of the day were simulated");
    }
    day_open_ = false;
    if (workouts_today_ == 0) {
        fatigue_ = 0;
    } else {
        fatigue_ = std::min(fatigue_, kMaxFatigue);
    }
    workouts_today_ = 0;
    accepted_today_ = 0;
    const double penalty = fatigue_penalty(fatigue_, profile_.fatigue_threshold, rewards_);
    if (penalty < 0.0) {
        return RewardEvent{id_, day_start(day_ + 1) - 1, RewardKind::fatigue_penalty, penalty};
    }
    return std::nullopt;
}

DayResult run_day(SimUser& user, int day, const DayPlan& plan, std::span<const int> intervention_hours) {
    DayResult result;
    user.begin_day(day, plan);
    for (int h = 0; h < kHoursPerDay; ++h) {
        Experience e;
        e.state = user.observe();
        const bool send =
            std::find(intervention_hours.begin(), intervention_hours.end(), h) != intervention_hours.end();
        e.action = send ? 1 : 0;
        auto out = user.step_hour(send);
        e.reward = out.reward;
        result.events.insert(result.events.end(), out.events.begin(), out.events.end());
        if (h == kHoursPerDay - 1) {
            if (const auto penalty = user.end_day()) {
                e.reward += penalty->value;
                result.events.push_back(*penalty);
            }
        }
        e.next = user.observe();
        result.experiences.push_back(e);
    }
    return result;
}

}  // namespace cbrl::sim
