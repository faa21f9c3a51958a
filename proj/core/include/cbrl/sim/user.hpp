#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "cbrl/experience.hpp"
#include "cbrl/rng.hpp"
#include "cbrl/sim/profile.hpp"
#include "cbrl/sim/schedule.hpp"

namespace cbrl::sim {

inline constexpr int kMaxFatigue = 7;

enum class RewardKind { acceptance, rejection, workout_completion, fatigue_penalty };

struct RewardEvent {
    int user_id = 0;
    Seconds time = 0;
    RewardKind kind = RewardKind::acceptance;
    double value = 0.0;
};

/// Reward magnitudes. acceptance/rejection are fixed by the intervention model;
/// the completion scale and the fatigue penalty are tunable.
struct RewardParams {
    double acceptance = 1.0;
    double rejection = -0.5;
    double completion_per_hour = 2.0;
    double fatigue_penalty_per_level = 0.1;

    void validate() const;
    friend bool operator==(const RewardParams&, const RewardParams&) = default;
};

/// base / sqrt(fatigue) once fatigue exceeds the threshold, base otherwise.
double effective_workout_duration(double base_hours, int fatigue, int threshold);

/// completion_per_hour * duration; a 30 minute workout earns +1 by default.
double workout_completion_reward(double duration_hours, const RewardParams& params = {});

/// -fatigue_penalty_per_level * max(0, fatigue - threshold).
double fatigue_penalty(int fatigue, int threshold, const RewardParams& params = {});

struct HourOutcome {
    int hour = 0;
    bool sent = false;
    bool accepted = false;
    double reward = 0.0;
    std::vector<RewardEvent> events;
};

/// A simulated person following a profile's daily schedule and reacting to
/// interventions. The day is driven hour by hour:
///
///   begin_day(d); for h in 0..23 { observe(); step_hour(send); } end_day();
///
/// Queue entries (e.g. sleep that runs past midnight) carry over between days.
class SimUser {
public:
    /// Draws the agent's planning offset: t_plan_min + N(0, t_plan_sd), clamped at 0.
    SimUser(int id, UserProfile profile, Rng rng, RewardParams rewards = {});

    int id() const { return id_; }
    const UserProfile& profile() const { return profile_; }
    double agent_t_plan_min() const { return agent_t_plan_min_; }
    int fatigue() const { return fatigue_; }
    int workouts_today() const { return workouts_today_; }
    bool worked_out_today() const { return workouts_today_ > 0; }
    int accepted_today() const { return accepted_today_; }
    std::optional<Activity> current_activity() const { return runner_.current(); }
    const ActivityQueue& queue() const { return runner_.queue(); }
    const ScheduleRunner& schedule() const { return runner_; }
    Seconds now() const { return runner_.now(); }
    int day() const { return day_; }
    bool day_open() const { return day_open_; }
    const std::optional<DayPlan>& plan() const { return plan_; }

    /// Starts day `day`, drawing its plan from the user's own stream.
    void begin_day(int day);
    void begin_day(int day, const DayPlan& plan);

    Observation observe() const;

    /// Runs the hour starting at the current decision point. When `send` is set
    /// the intervention is evaluated at the first second of the hour.
    HourOutcome step_hour(bool send);

    /// Accept/reject a prompt at `t_send`, which must be the current instant
    /// with its tick already processed (step_hour does this). On acceptance a
    /// workout is queued at the earliest qualifying idle gap.
    bool handle_intervention(Seconds t_send);

    /// Inserts a workout that starts at `start` with undiminished length `base_hours`.
    void queue_workout(Seconds start, double base_hours);

    /// Closes the day: resets fatigue after a day without a workout and returns
    /// the fatigue penalty, if any. Calling it twice for one day throws.
    std::optional<RewardEvent> end_day();

    /// Earliest start of an idle stretch of at least `min_length` that begins
    /// inside [from, to] and ends by midnight, given the current plan.
    std::optional<Seconds> find_idle_gap(Seconds from, Seconds to, Seconds min_length) const;

    /// Every executed segment is appended here while set.
    void set_segment_recorder(std::vector<Segment>* recorder) { recorder_ = recorder; }

private:
    friend struct LiveHooks;

    void finalize_workout(QueueEntry& entry);
    void close_hour(Seconds boundary);
    bool acceptance_rule_allows(Seconds t_send) const;
    Seconds workout_length(double base_hours, Seconds start) const;

    int id_;
    UserProfile profile_;
    RewardParams rewards_;
    Rng rng_;
    double agent_t_plan_min_ = 0.0;

    int fatigue_ = 0;
    int workouts_today_ = 0;
    int accepted_today_ = 0;

    ScheduleRunner runner_;
    std::optional<DayPlan> plan_;
    int day_ = -1;
    bool day_open_ = false;
    int next_hour_ = 0;
    bool clock_started_ = false;

    std::array<bool, kActivityCount> last_hour_flags_{};
    std::array<bool, kActivityCount> hour_flags_{};
    std::vector<RewardEvent> hour_events_;
    std::vector<Segment>* recorder_ = nullptr;
};

struct DayResult {
    Trace experiences;  // 24 hourly transitions
    std::vector<RewardEvent> events;
};

/// Runs one full day with interventions at the listed hours. The last
/// experience's reward includes the end-of-day fatigue penalty.
DayResult run_day(SimUser& user, int day, const DayPlan& plan, std::span<const int> intervention_hours);

}  // namespace cbrl::sim
