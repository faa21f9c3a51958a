#include <gtest/gtest.h>

#include "cbrl/sim/profile.hpp"

using namespace cbrl;
using namespace cbrl::sim;

namespace {

using Probs = std::array<double, 7>;
constexpr Probs kAll{1, 1, 1, 1, 1, 1, 1};
constexpr Probs kNone{0, 0, 0, 0, 0, 0, 0};

void expect_spec(const UserProfile& p, Activity a, double early, double late, double min_d, double max_d,
                 bool work_priority, Probs probs) {
    const auto& s = p.spec(a);
    SCOPED_TRACE(std::string(to_string(p.type)) + "/" + std::string(to_string(a)));
    EXPECT_EQ(s.activity, a);
    EXPECT_EQ(s.early_start, early);
    EXPECT_EQ(s.late_start, late);
    EXPECT_EQ(s.min_duration, min_d);
    EXPECT_EQ(s.max_duration, max_d);
    if (work_priority) {
        EXPECT_EQ(s.priority_over_this, std::vector<Activity>{Activity::work});
    } else {
        EXPECT_TRUE(s.priority_over_this.empty());
    }
    EXPECT_EQ(s.prob_per_day, probs);
}

}  // namespace

// Values transcribed from the published profile table.
TEST(DefaultProfiles, WorkaholicMatchesTable) {
    const auto p = default_profile(ProfileType::workaholic);
    expect_spec(p, Activity::sleep, 23, 23, 6, 7, true, kAll);
    expect_spec(p, Activity::breakfast, 7, 7.5, 0.25, 0.25, true, kAll);
    expect_spec(p, Activity::lunch, 12, 12, 0.25, 0.25, false, kAll);
    expect_spec(p, Activity::dinner, 18, 20, 0.5, 1, false, kAll);
    expect_spec(p, Activity::work, 8, 9, 10, 11, false, {1, 1, 1, 1, 1, 0.8, 0});
    expect_spec(p, Activity::work_out, 19.5, 20.5, 0.5, 1, false, kNone);
    EXPECT_EQ(p.planner, (PlannerSpec{3, 21, 0.1}));
    EXPECT_EQ(p.acceptance_rule, AcceptanceRule::lunch_or_idle);
    EXPECT_EQ(p.fatigue_threshold, 2);
    EXPECT_EQ(p.second_workout_prob, 0.1);
    EXPECT_FALSE(p.acceptance_window);
}

TEST(DefaultProfiles, ArnoldMatchesTable) {
    const auto p = default_profile(ProfileType::arnold);
    expect_spec(p, Activity::sleep, 22, 23, 8, 9, true, kAll);
    expect_spec(p, Activity::breakfast, 8, 9, 0.25, 0.25, true, kAll);
    expect_spec(p, Activity::lunch, 12, 13.5, 0.25, 0.5, false, kAll);
    expect_spec(p, Activity::dinner, 19, 20.5, 0.5, 1, false, kAll);
    expect_spec(p, Activity::work, 9, 9.5, 8, 8, false, {1, 1, 0, 1, 0, 0, 0});
    expect_spec(p, Activity::work_out, 16, 21, 1, 1, false, kNone);
    EXPECT_EQ(p.planner, (PlannerSpec{0, 24, 0.1}));
    EXPECT_EQ(p.acceptance_rule, AcceptanceRule::always);
    EXPECT_EQ(p.fatigue_threshold, 4);
    EXPECT_EQ(p.second_workout_prob, 0.5);
}

TEST(DefaultProfiles, RetireeMatchesTable) {
    const auto p = default_profile(ProfileType::retiree);
    expect_spec(p, Activity::sleep, 22, 23.5, 8, 10, true, kAll);
    expect_spec(p, Activity::breakfast, 7, 10, 0.5, 0.75, true, kAll);
    expect_spec(p, Activity::lunch, 12, 14, 0.5, 0.75, false, kAll);
    expect_spec(p, Activity::dinner, 18, 20, 0.5, 1, false, kAll);
    expect_spec(p, Activity::work, 8, 9, 8, 8, false, kNone);
    expect_spec(p, Activity::work_out, 19, 21.5, 0.5, 1, false, kNone);
    EXPECT_EQ(p.planner, (PlannerSpec{0, 1, 0.1}));
    EXPECT_EQ(p.acceptance_rule, AcceptanceRule::idle_only);
    EXPECT_EQ(p.fatigue_threshold, 1);
    EXPECT_EQ(p.second_workout_prob, 0.0);
}

TEST(DefaultProfiles, AllValidateAndAreOrdered) {
    const auto all = default_profiles();
    for (std::size_t i = 0; i < all.size(); ++i) {
        EXPECT_EQ(all[i].type, kAllProfiles[i]);
        EXPECT_NO_THROW(all[i].validate());
    }
}

TEST(ProfileValidation, RejectsBrokenInvariants) {
    auto p = default_profile(ProfileType::arnold);
    p.spec(Activity::lunch).early_start = 14;
    EXPECT_THROW(p.validate(), std::invalid_argument);

    p = default_profile(ProfileType::arnold);
    p.spec(Activity::dinner).min_duration = 0;
    EXPECT_THROW(p.validate(), std::invalid_argument);

    p = default_profile(ProfileType::arnold);
    p.spec(Activity::dinner).min_duration = 2;
    EXPECT_THROW(p.validate(), std::invalid_argument);

    p = default_profile(ProfileType::arnold);
    p.spec(Activity::work).prob_per_day[3] = 1.5;
    EXPECT_THROW(p.validate(), std::invalid_argument);

    p = default_profile(ProfileType::arnold);
    p.fatigue_threshold = 8;
    EXPECT_THROW(p.validate(), std::invalid_argument);

    p = default_profile(ProfileType::arnold);
    p.second_workout_prob = -0.1;
    EXPECT_THROW(p.validate(), std::invalid_argument);

    p = default_profile(ProfileType::arnold);
    p.planner.t_plan_duration = 0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(ProfileNames, RoundTrip) {
    for (const auto t : kAllProfiles) {
        EXPECT_EQ(profile_from_string(to_string(t)), t);
    }
    for (const auto r : {AcceptanceRule::lunch_or_idle, AcceptanceRule::idle_only, AcceptanceRule::always}) {
        EXPECT_EQ(acceptance_rule_from_string(to_string(r)), r);
    }
    EXPECT_FALSE(profile_from_string("athlete"));
}
