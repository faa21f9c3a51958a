#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "cbrl/experiment/harness.hpp"

using namespace cbrl;
using namespace cbrl::experiment;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.seed = 5;
    c.users_per_profile = 3;
    c.learning_days = 12;
    c.clustering.restarts = 3;
    return c;
}

const WarmupResult& shared_warmup() {
    static const WarmupResult w = run_warmup(spawn_users(small_config()), small_config());
    return w;
}

}  // namespace

namespace cbrl::experiment {
void PrintTo(const RunSpec& spec, std::ostream* os) { *os << spec.id(); }
}  // namespace cbrl::experiment

TEST(Harness, SpawnedUsersAreInProfileBlocks) {
    const auto users = spawn_users(small_config());
    ASSERT_EQ(users.size(), 9u);
    for (std::size_t i = 0; i < users.size(); ++i) {
        EXPECT_EQ(users[i].id(), static_cast<int>(i));
        EXPECT_EQ(users[i].profile().type, sim::kAllProfiles[i / 3]);
    }
}

TEST(Harness, WarmupShapeAndPromptHours) {
    const auto& w = shared_warmup();
    ASSERT_EQ(w.traces.size(), 9u);
    for (std::size_t u = 0; u < w.traces.size(); ++u) {
        ASSERT_EQ(w.traces[u].size(), 7u * 24u);
        ASSERT_EQ(w.prompt_hours[u].size(), 7u);
        for (int d = 0; d < 7; ++d) {
            const int h = w.prompt_hours[u][static_cast<std::size_t>(d)];
            EXPECT_GE(h, 9);
            EXPECT_LE(h, 20);
            for (int hour = 0; hour < 24; ++hour) {
                const auto& e = w.traces[u][static_cast<std::size_t>(d * 24 + hour)];
                EXPECT_EQ(e.action, hour == h ? 1 : 0);
                EXPECT_EQ(e.state.hour, hour);
                EXPECT_EQ(e.state.weekday, d % 7);
            }
        }
        EXPECT_EQ(w.users[u].day(), 6);
    }
}

TEST(Harness, FullSizeWarmupHas99Traces) {
    const ExperimentConfig c;
    const auto w = run_warmup(spawn_users(c), c);
    EXPECT_EQ(w.traces.size(), 99u);
    for (const auto& t : w.traces) {
        EXPECT_EQ(t.size(), 168u);
    }
}

TEST(Harness, WarmupIsDeterministic) {
    const auto again = run_warmup(spawn_users(small_config()), small_config());
    EXPECT_EQ(again.traces, shared_warmup().traces);
    EXPECT_EQ(again.prompt_hours, shared_warmup().prompt_hours);
}

TEST(Harness, PartitionsPerStrategy) {
    const auto c = small_config();
    EXPECT_EQ(make_partition(cluster::Strategy::pooled, shared_warmup(), c).groups, 1u);
    EXPECT_EQ(make_partition(cluster::Strategy::separate, shared_warmup(), c).groups, 9u);
    EXPECT_EQ(make_partition(cluster::Strategy::grouped, shared_warmup(), c).groups, 3u);
    const auto a = make_partition(cluster::Strategy::cluster, shared_warmup(), c);
    const auto b = make_partition(cluster::Strategy::cluster, shared_warmup(), c);
    EXPECT_EQ(a.group_of_user, b.group_of_user);
    EXPECT_GE(a.groups, 2u);
}

class LearningRun : public ::testing::TestWithParam<RunSpec> {};

TEST_P(LearningRun, MetricsAgreeWithTraces) {
    const auto c = small_config();
    const auto spec = GetParam();
    const auto partition = make_partition(spec.strategy, shared_warmup(), c);
    const auto r = run_learning(shared_warmup(), partition, spec, c);
    ASSERT_EQ(r.metrics.size(), 12u);
    ASSERT_EQ(r.traces.size(), 9u);
    EXPECT_EQ(r.group_names.size(), partition.groups);
    double running = 0.0;
    for (std::size_t d = 0; d < r.metrics.size(); ++d) {
        const auto& m = r.metrics[d];
        EXPECT_EQ(m.day, static_cast<int>(d));
        double total = 0.0;
        int prompts = 0;
        for (std::size_t u = 0; u < 9; ++u) {
            ASSERT_EQ(r.traces[u].size(), 12u * 24u);
            double user_total = 0.0;
            for (int h = 0; h < 24; ++h) {
                const auto& e = r.traces[u][d * 24 + static_cast<std::size_t>(h)];
                user_total += e.reward;
                prompts += e.action;
            }
            EXPECT_NEAR(m.user_reward[u], user_total, 1e-9);
            total += user_total;
        }
        EXPECT_NEAR(m.average, total / 9.0, 1e-9);
        EXPECT_EQ(m.prompts, prompts);
        EXPECT_LE(m.acceptances, m.prompts);
        running += m.average;
        EXPECT_NEAR(m.cumulative, running / static_cast<double>(d + 1), 1e-9);
        for (std::size_t p = 0; p < 3; ++p) {
            const double sum = m.user_reward[3 * p] + m.user_reward[3 * p + 1] + m.user_reward[3 * p + 2];
            EXPECT_NEAR(m.profile_average[p], sum / 3.0, 1e-9);
        }
    }
    EXPECT_NEAR(average_daily_reward(r.metrics), running / 12.0, 1e-12);
    EXPECT_FALSE(r.policy.empty());
    // the warm-up users are copied, not advanced
    EXPECT_EQ(shared_warmup().users[0].day(), 6);
}

TEST_P(LearningRun, IsDeterministic) {
    const auto c = small_config();
    const auto spec = GetParam();
    const auto partition = make_partition(spec.strategy, shared_warmup(), c);
    const auto a = run_learning(shared_warmup(), partition, spec, c);
    const auto b = run_learning(shared_warmup(), partition, spec, c);
    EXPECT_EQ(a.traces, b.traces);
    EXPECT_EQ(a.policy, b.policy);
}

INSTANTIATE_TEST_SUITE_P(AllRuns, LearningRun, ::testing::ValuesIn(all_runs()),
                         [](const auto& info) {
                             auto id = info.param.id();
                             std::replace(id.begin(), id.end(), '-', '_');
                             return id;
                         });

TEST(Harness, ChainedTracesAcrossDays) {
    const auto c = small_config();
    const RunSpec spec{Learner::qlearning, cluster::Strategy::pooled};
    const auto r = run_learning(shared_warmup(), make_partition(spec.strategy, shared_warmup(), c), spec, c);
    for (const auto& t : r.traces) {
        EXPECT_EQ(t.front().state.weekday, 0);
        for (std::size_t i = 1; i < t.size(); ++i) {
            EXPECT_EQ(t[i].state, t[i - 1].next);
        }
    }
}

TEST(Harness, FailingRunDoesNotStopTheOthers) {
    auto c = small_config();
    c.runs = {RunSpec{Learner::qlearning, cluster::Strategy::pooled}, RunSpec{Learner::lspi, cluster::Strategy::pooled},
              RunSpec{Learner::lspi, cluster::Strategy::grouped}};
    ProtocolHooks hooks;
    std::vector<std::string> log;
    hooks.log = [&](std::string_view line) { log.emplace_back(line); };
    hooks.run_finished = [](const WarmupResult&, RunOutcome& o) {
        if (o.spec.learner == Learner::lspi && o.spec.strategy == cluster::Strategy::pooled) {
            throw std::runtime_error("disk full");
        }
    };
    const auto result = run_full_protocol(c, hooks);
    ASSERT_EQ(result.runs.size(), 3u);
    EXPECT_TRUE(result.runs[0].result.has_value());
    EXPECT_FALSE(result.runs[1].result.has_value());
    EXPECT_NE(result.runs[1].error.find("disk full"), std::string::npos);
    EXPECT_NE(result.runs[1].error.find("lspi-pooled"), std::string::npos);
    EXPECT_TRUE(result.runs[2].result.has_value());
    ASSERT_EQ(result.tests.size(), 1u);
    EXPECT_EQ(result.tests[0].setup_a, "qlearning-pooled");
    EXPECT_EQ(result.tests[0].setup_b, "lspi-grouped");
    EXPECT_FALSE(log.empty());
}

TEST(Harness, AverageOfEmptySeriesThrows) {
    EXPECT_THROW(average_daily_reward({}), std::invalid_argument);
}
