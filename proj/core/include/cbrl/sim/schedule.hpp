#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cbrl/activity.hpp"
#include "cbrl/rng.hpp"
#include "cbrl/sim/profile.hpp"

namespace cbrl::sim {

struct PlannedActivity {
    double start = 0.0;     // hours of day
    double duration = 0.0;  // hours
    bool active = false;    // Bernoulli draw against the weekday probability
};

/// One day's concrete draw from a prototype schedule.
struct DayPlan {
    int weekday = 0;
    std::array<PlannedActivity, kActivityCount> items{};

    const PlannedActivity& operator[](Activity a) const { return items[index_of(a)]; }
    PlannedActivity& operator[](Activity a) { return items[index_of(a)]; }
};

/// Draws start ~ U[early, late], duration ~ U[min, max] and the active flag for
/// every activity, in kAllActivities order.
DayPlan generate_day_plan(const UserProfile& profile, int weekday, Rng& rng);

struct QueueEntry {
    Activity activity = Activity::sleep;
    Seconds start = 0;
    Seconds end = 0;  // exclusive
    std::uint64_t seq = 0;
    /// Seconds during which this entry was the current activity (workouts only).
    Seconds performed = 0;
    bool finalized = false;

    friend bool operator==(const QueueEntry&, const QueueEntry&) = default;
};

using ActivityQueue = std::vector<QueueEntry>;

/// Drops entries whose end is at or before t; the survivors keep their order.
ActivityQueue clean_up_queue(ActivityQueue queue, Seconds t);

/// Picks the activity performed while `queue` is live. The ongoing activity is
/// kept unless a queued activity is listed in its priority_over_this; an idle
/// user (or one whose activity has left the queue) takes the earliest-inserted
/// entry, subject to the same priority rule.
std::optional<Activity> select_from_queue(const ActivityQueue& queue, std::optional<Activity> current,
                                          const UserProfile& profile);

/// Half-open stretch of constant activity; an empty activity means idle.
struct Segment {
    Seconds begin = 0;
    Seconds end = 0;
    std::optional<Activity> activity;
};

/// An activity that joins the queue once the clock reaches `start`. Workout
/// arrivals keep their undiminished length in `base_hours` and are sized by
/// the hooks when they start, so fatigue is read at workout start.
struct Arrival {
    Activity activity = Activity::sleep;
    Seconds start = 0;
    Seconds duration = 0;
    bool sized_at_start = false;
    double base_hours = 0.0;
    std::uint64_t seq = 0;
};

/// Executes the planning loop on the one-second grid, jumping directly between
/// the instants where the queue can change. The activity selected at a tick
/// holds until the next queue change, so the produced segments are identical
/// to stepping every second.
///
/// Hooks must provide
///   Seconds workout_length(double base_hours, Seconds start);
///   void on_segment(const Segment&);
///   void on_expired(QueueEntry&);   // before an entry leaves the queue
class ScheduleRunner {
public:
    Seconds now() const { return now_; }
    std::optional<Activity> current() const { return current_; }
    const ActivityQueue& queue() const { return queue_; }
    ActivityQueue& queue() { return queue_; }
    const std::vector<Arrival>& arrivals() const { return arrivals_; }

    /// Only valid before anything has been scheduled.
    void reset_clock(Seconds t) {
        if (!queue_.empty() || !arrivals_.empty()) {
            throw std::logic_error("cannot move the clock of a running schedule");
        }
        now_ = t;
    }

    void schedule(Activity activity, Seconds start, Seconds duration) {
        insert({activity, start, duration, false, 0.0, next_seq_++});
    }

    void schedule_workout(Seconds start, double base_hours) {
        insert({Activity::work_out, start, 0, true, base_hours, next_seq_++});
    }

    bool has_arrival_at(Seconds t) const {
        return std::any_of(arrivals_.begin(), arrivals_.end(), [t](const Arrival& a) { return a.start == t; });
    }

    /// One iteration of the planning loop at the current instant.
    template <class Hooks>
    void tick(const UserProfile& profile, Hooks& hooks) {
        for (auto& e : queue_) {
            if (e.end <= now_) {
                hooks.on_expired(e);
            }
        }
        queue_ = clean_up_queue(std::move(queue_), now_);
        while (!arrivals_.empty() && arrivals_.front().start <= now_) {
            const Arrival a = arrivals_.front();
            arrivals_.erase(arrivals_.begin());
            if (a.start < now_) {
                throw std::logic_error("schedule arrival missed its start tick");
            }
            const Seconds length = a.sized_at_start ? hooks.workout_length(a.base_hours, a.start) : a.duration;
            queue_.push_back(QueueEntry{a.activity, a.start, a.start + std::max<Seconds>(length, 1), a.seq});
        }
        current_ = select_from_queue(queue_, current_, profile);
    }

    /// Runs from now() up to (not including) the tick at `target`. Assumes the
    /// tick at now() has been processed.
    template <class Hooks>
    void advance(const UserProfile& profile, Seconds target, Hooks& hooks) {
        while (now_ < target) {
            Seconds next = target;
            if (!arrivals_.empty()) {
                next = std::min(next, arrivals_.front().start);
            }
            for (const auto& e : queue_) {
                if (e.end > now_) {
                    next = std::min(next, e.end);
                }
            }
            if (current_ == Activity::work_out) {
                for (auto& e : queue_) {
                    if (e.activity == Activity::work_out && !e.finalized) {
                        e.performed += next - now_;
                        break;
                    }
                }
            }
            hooks.on_segment(Segment{now_, next, current_});
            now_ = next;
            if (now_ < target) {
                tick(profile, hooks);
            }
        }
    }

private:
    void insert(Arrival a) {
        if (a.start < now_) {
            throw std::invalid_argument("cannot schedule an activity in the past");
        }
        const auto pos = std::upper_bound(arrivals_.begin(), arrivals_.end(), a, [](const Arrival& x, const Arrival& y) {
            return x.start < y.start || (x.start == y.start && x.seq < y.seq);
        });
        arrivals_.insert(pos, a);
    }

    Seconds now_ = 0;
    std::optional<Activity> current_;
    ActivityQueue queue_;
    std::vector<Arrival> arrivals_;
    std::uint64_t next_seq_ = 0;
};

}  // namespace cbrl::sim
