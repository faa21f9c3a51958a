#include <gtest/gtest.h>

#include "cbrl/sim/schedule.hpp"

using namespace cbrl;
using namespace cbrl::sim;

namespace {

Seconds h(double hours) { return hours_to_seconds(hours); }

QueueEntry entry(Activity a, double start, double end, std::uint64_t seq = 0) {
    return QueueEntry{a, h(start), h(end), seq};
}

struct RecordingHooks {
    std::vector<Segment> segments;
    Seconds workout_length(double base_hours, Seconds) const { return hours_to_seconds(base_hours); }
    void on_segment(const Segment& s) { segments.push_back(s); }
    void on_expired(QueueEntry&) {}
};

struct Planned {
    Activity activity;
    Seconds start;
    Seconds end;
};

// Algorithm 1 stepped one second at a time.
std::vector<std::optional<Activity>> per_second(const std::vector<Planned>& plan, Seconds from, Seconds to,
                                                const UserProfile& profile) {
    std::vector<std::optional<Activity>> out;
    ActivityQueue queue;
    std::optional<Activity> current;
    for (Seconds t = from; t < to; ++t) {
        queue = clean_up_queue(std::move(queue), t);
        for (std::size_t i = 0; i < plan.size(); ++i) {
            if (plan[i].start == t) {
                queue.push_back(QueueEntry{plan[i].activity, plan[i].start, plan[i].end, i});
            }
        }
        current = select_from_queue(queue, current, profile);
        out.push_back(current);
    }
    return out;
}

std::vector<std::optional<Activity>> expand(const std::vector<Segment>& segments, Seconds from, Seconds to) {
    std::vector<std::optional<Activity>> out;
    Seconds t = from;
    for (const auto& s : segments) {
        EXPECT_EQ(s.begin, t) << "segments must tile the timeline";
        EXPECT_LT(s.begin, s.end);
        for (; t < s.end; ++t) {
            out.push_back(s.activity);
        }
    }
    EXPECT_EQ(t, to);
    return out;
}

}  // namespace

TEST(GenerateDayPlan, WorkaholicSleepStartIsFixed) {
    const auto p = default_profile(ProfileType::workaholic);
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const auto plan = generate_day_plan(p, i % 7, rng);
        EXPECT_EQ(plan[Activity::sleep].start, 23.0);
        EXPECT_GE(plan[Activity::sleep].duration, 6.0);
        EXPECT_LE(plan[Activity::sleep].duration, 7.0);
    }
}

TEST(GenerateDayPlan, RetireeNeverWorks) {
    const auto p = default_profile(ProfileType::retiree);
    Rng rng(4);
    for (int i = 0; i < 700; ++i) {
        EXPECT_FALSE(generate_day_plan(p, i % 7, rng)[Activity::work].active);
    }
}

TEST(GenerateDayPlan, DegenerateDurationIsExact) {
    const auto p = default_profile(ProfileType::arnold);
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        const auto plan = generate_day_plan(p, i % 7, rng);
        EXPECT_EQ(plan[Activity::work].duration, 8.0);
        EXPECT_EQ(plan[Activity::breakfast].duration, 0.25);
    }
}

TEST(GenerateDayPlan, DrawsStayInRangeAndRespectZeroProbabilityDays) {
    Rng rng(6);
    for (const auto& p : default_profiles()) {
        for (int i = 0; i < 700; ++i) {
            const int wd = i % 7;
            const auto plan = generate_day_plan(p, wd, rng);
            EXPECT_EQ(plan.weekday, wd);
            for (const auto a : kAllActivities) {
                const auto& s = p.spec(a);
                EXPECT_GE(plan[a].start, s.early_start);
                EXPECT_LE(plan[a].start, s.late_start);
                EXPECT_GE(plan[a].duration, s.min_duration);
                EXPECT_LE(plan[a].duration, s.max_duration);
                if (s.prob_per_day[static_cast<std::size_t>(wd)] == 0.0) {
                    EXPECT_FALSE(plan[a].active);
                }
                if (s.prob_per_day[static_cast<std::size_t>(wd)] == 1.0) {
                    EXPECT_TRUE(plan[a].active);
                }
            }
        }
    }
}

TEST(GenerateDayPlan, WorkaholicSaturdayFrequencyMatchesProbability) {
    const auto p = default_profile(ProfileType::workaholic);
    Rng rng(8);
    int active = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        active += generate_day_plan(p, 5, rng)[Activity::work].active ? 1 : 0;
    }
    // binomial sd is about 0.0028
    EXPECT_NEAR(active / static_cast<double>(n), 0.8, 0.015);
}

TEST(GenerateDayPlan, RejectsBadWeekday) {
    Rng rng(1);
    EXPECT_THROW(generate_day_plan(default_profile(ProfileType::arnold), 7, rng), std::out_of_range);
}

TEST(CleanUpQueue, Examples) {
    EXPECT_TRUE(clean_up_queue({}, 0).empty());
    EXPECT_TRUE(clean_up_queue({entry(Activity::work, 8, 18)}, h(19)).empty());
    const ActivityQueue q{entry(Activity::work, 8, 18, 0), entry(Activity::dinner, 18.5, 19.5, 1)};
    EXPECT_EQ(clean_up_queue(q, h(18.25)), (ActivityQueue{entry(Activity::dinner, 18.5, 19.5, 1)}));
    // the end instant itself is excluded
    EXPECT_TRUE(clean_up_queue({entry(Activity::work, 8, 18)}, h(18)).empty());
    EXPECT_EQ(clean_up_queue({entry(Activity::work, 8, 18)}, h(18) - 1).size(), 1u);
}

TEST(CleanUpQueue, KeepsOrderOfSurvivors) {
    const ActivityQueue q{entry(Activity::lunch, 12, 13, 0), entry(Activity::sleep, 0, 7, 1),
                          entry(Activity::work, 9, 17, 2), entry(Activity::breakfast, 7, 8, 3)};
    const auto out = clean_up_queue(q, h(10));
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].activity, Activity::lunch);
    EXPECT_EQ(out[1].activity, Activity::work);
}

TEST(SelectFromQueue, Examples) {
    const auto p = default_profile(ProfileType::workaholic);
    const ActivityQueue sleep_work{entry(Activity::sleep, 0, 10, 0), entry(Activity::work, 8, 18, 1)};
    EXPECT_EQ(select_from_queue(sleep_work, Activity::sleep, p), Activity::work);
    EXPECT_EQ(select_from_queue({}, std::nullopt, p), std::nullopt);
    EXPECT_EQ(select_from_queue({entry(Activity::lunch, 12, 13)}, std::nullopt, p), Activity::lunch);
}

TEST(SelectFromQueue, CurrentActivityContinues) {
    const auto p = default_profile(ProfileType::arnold);
    const ActivityQueue q{entry(Activity::dinner, 19, 20, 0), entry(Activity::work_out, 19.5, 20.5, 1)};
    EXPECT_EQ(select_from_queue(q, Activity::work_out, p), Activity::work_out);
    EXPECT_EQ(select_from_queue(q, Activity::dinner, p), Activity::dinner);
    // an idle user takes the earliest inserted entry
    EXPECT_EQ(select_from_queue(q, std::nullopt, p), Activity::dinner);
    // a finished activity is replaced by the front of the queue
    EXPECT_EQ(select_from_queue(q, Activity::lunch, p), Activity::dinner);
}

TEST(SelectFromQueue, FrontIsPreemptedByPriorityActivity) {
    const auto p = default_profile(ProfileType::workaholic);
    const ActivityQueue q{entry(Activity::breakfast, 7, 8, 0), entry(Activity::work, 8, 18, 1)};
    EXPECT_EQ(select_from_queue(q, std::nullopt, p), Activity::work);
}

TEST(ScheduleRunner, MatchesPerSecondLoop) {
    Rng rng(11);
    for (int trial = 0; trial < 24; ++trial) {
        const auto& profile = default_profiles()[static_cast<std::size_t>(trial % 3)];
        std::vector<Planned> plan;
        for (int day = 0; day < 2; ++day) {
            const auto dp = generate_day_plan(profile, (trial + day) % 7, rng);
            for (const auto a : kAllActivities) {
                if (dp[a].active) {
                    const Seconds s = day_start(day) + hours_to_seconds(dp[a].start);
                    plan.push_back({a, s, s + std::max<Seconds>(1, hours_to_seconds(dp[a].duration))});
                }
            }
            // a workout dropped at a random second, as an accepted prompt would
            const Seconds w = day_start(day) + static_cast<Seconds>(rng.index(86400));
            plan.push_back({Activity::work_out, w, w + 1800 + static_cast<Seconds>(rng.index(1800))});
        }
        std::stable_sort(plan.begin(), plan.end(), [](const Planned& a, const Planned& b) { return a.start < b.start; });

        ScheduleRunner runner;
        runner.reset_clock(0);
        for (const auto& e : plan) {
            runner.schedule(e.activity, e.start, e.end - e.start);
        }
        RecordingHooks hooks;
        runner.tick(profile, hooks);
        runner.advance(profile, day_start(2), hooks);

        const auto fast = expand(hooks.segments, 0, day_start(2));
        const auto slow = per_second(plan, 0, day_start(2), profile);
        ASSERT_EQ(fast.size(), slow.size());
        Seconds mismatches = 0;
        for (std::size_t t = 0; t < fast.size(); ++t) {
            mismatches += fast[t] != slow[t] ? 1 : 0;
        }
        EXPECT_EQ(mismatches, 0) << "trial " << trial;
    }
}

TEST(ScheduleRunner, SizedWorkoutsUseHookLengthAtStart) {
    const auto p = default_profile(ProfileType::arnold);
    ScheduleRunner runner;
    runner.reset_clock(0);
    runner.schedule_workout(h(16), 1.0);
    RecordingHooks hooks;
    runner.tick(p, hooks);
    runner.advance(p, h(18), hooks);
    ASSERT_EQ(hooks.segments.size(), 3u);
    EXPECT_EQ(hooks.segments[1].activity, Activity::work_out);
    EXPECT_EQ(hooks.segments[1].begin, h(16));
    EXPECT_EQ(hooks.segments[1].end, h(17));
}

TEST(ScheduleRunner, RejectsSchedulingInThePast) {
    ScheduleRunner runner;
    runner.reset_clock(100);
    EXPECT_THROW(runner.schedule(Activity::lunch, 50, 10), std::invalid_argument);
}
