#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "cbrl/rl/features.hpp"
#include "cbrl/rl/qlearning.hpp"

using namespace cbrl;
using namespace cbrl::rl;

namespace {

Observation obs(int hour, int weekday = 0, int fatigue = 0, bool worked = false) {
    Observation o;
    o.hour = hour;
    o.weekday = weekday;
    o.fatigue = fatigue;
    o.worked_out_today = worked;
    return o;
}

Observation random_obs(Rng& rng) {
    Observation o;
    o.hour = rng.integer(0, 23);
    o.weekday = rng.integer(0, 6);
    o.worked_out_today = rng.bernoulli(0.5);
    o.fatigue = rng.integer(0, 7);
    for (auto& f : o.last_hour) {
        f = rng.bernoulli(0.3);
    }
    return o;
}

}  // namespace

TEST(Featurize, Examples) {
    auto o = obs(12, 3, 7, true);
    o.last_hour[index_of(Activity::lunch)] = true;
    const auto f = featurize(o);
    EXPECT_DOUBLE_EQ(f[0], 12.0 / 23.0);
    EXPECT_DOUBLE_EQ(f[1], 0.5);
    EXPECT_DOUBLE_EQ(f[2], 1.0);
    EXPECT_DOUBLE_EQ(f[3], 1.0);
    for (std::size_t i = 0; i < kActivityCount; ++i) {
        EXPECT_DOUBLE_EQ(f[4 + i], i == index_of(Activity::lunch) ? 1.0 : 0.0);
    }
    const auto zero = featurize(obs(0));
    EXPECT_TRUE(std::all_of(zero.begin(), zero.end(), [](double v) { return v == 0.0; }));
}

TEST(Featurize, RangeAndDomain) {
    Rng rng(1);
    for (int i = 0; i < 10000; ++i) {
        const auto f = featurize(random_obs(rng));
        for (const double v : f) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
    }
    EXPECT_THROW(featurize(obs(24)), std::out_of_range);
    EXPECT_THROW(featurize(obs(0, 0, 8)), std::out_of_range);
}

TEST(QUpdate, WorkedExample) {
    QTable t(Rng(1));
    const auto s = obs(10);
    const auto s2 = obs(11);
    t.set(s, 1, 0.5);
    t.set(s2, 0, 0.2);
    t.set(s2, 1, -0.3);
    q_update(t, Experience{s, 1, 1.0, s2}, 0.2, 0.95);
    EXPECT_NEAR(t.value(s, 1), 0.638, 1e-12);
}

TEST(QUpdate, RandomCasesMatchClosedForm) {
    Rng rng(2);
    QTable t(Rng(3));
    for (int i = 0; i < 100000; ++i) {
        const auto s = random_obs(rng);
        auto s2 = random_obs(rng);
        const int a = rng.integer(0, 1);
        const double q = rng.uniform(-5, 5);
        const double n0 = rng.uniform(-5, 5);
        const double n1 = rng.uniform(-5, 5);
        const double r = rng.uniform(-2, 3);
        const double alpha = rng.uniform(0, 1);
        const double gamma = rng.uniform(0, 1);
        t.set(s2, 0, n0);
        t.set(s2, 1, n1);
        t.set(s, a, q);
        const bool same = s.key() == s2.key();
        const double target_max = same ? std::max(a == 0 ? q : n0, a == 1 ? q : n1) : std::max(n0, n1);
        const double expected = q + alpha * (r + gamma * target_max - q);
        q_update(t, Experience{s, a, r, s2}, alpha, gamma);
        ASSERT_NEAR(t.value(s, a), expected, 1e-12);
    }
}

TEST(QUpdate, ScalesWithRewardsAndValues) {
    Rng rng(4);
    for (int i = 0; i < 1000; ++i) {
        const double c = rng.uniform(0.1, 10);
        const auto s = obs(1);
        const auto s2 = obs(2);
        const double q = rng.uniform(-1, 1), n0 = rng.uniform(-1, 1), n1 = rng.uniform(-1, 1), r = rng.uniform(-1, 1);
        QTable a(Rng(0)), b(Rng(0));
        a.set(s, 0, q);
        a.set(s2, 0, n0);
        a.set(s2, 1, n1);
        b.set(s, 0, c * q);
        b.set(s2, 0, c * n0);
        b.set(s2, 1, c * n1);
        q_update(a, Experience{s, 0, r, s2}, 0.3, 0.9);
        q_update(b, Experience{s, 0, c * r, s2}, 0.3, 0.9);
        EXPECT_NEAR(b.value(s, 0), c * a.value(s, 0), 1e-12);
    }
}

TEST(QInit, Ranges) {
    Rng rng(5);
    const int n = 100000;
    double m0 = 0, m1 = 0;
    for (int i = 0; i < n; ++i) {
        const double a = q_init(rng, 0);
        const double b = q_init(rng, 1);
        ASSERT_GE(a, 0.0);
        ASSERT_LE(a, 1.0);
        ASSERT_GE(b, -1.0);
        ASSERT_LE(b, 0.0);
        m0 += a;
        m1 += b;
    }
    EXPECT_NEAR(m0 / n, 0.5, 0.02);
    EXPECT_NEAR(m1 / n, -0.5, 0.02);
}

TEST(QTable, InitializesOnFirstTouchOnly) {
    QTable t(Rng(6));
    const auto s = obs(3);
    EXPECT_FALSE(t.contains(s));
    const auto first = t.values(s);
    EXPECT_TRUE(t.contains(s));
    EXPECT_EQ(t.values(s), first);
    EXPECT_EQ(t.size(), 1u);
    EXPECT_GT(first[0], first[1]);
}

TEST(ReplayBuffer, KeepsMostRecentInOrder) {
    ReplayBuffer buf(3);
    EXPECT_TRUE(buf.empty());
    for (int i = 0; i < 5; ++i) {
        buf.push(Experience{obs(i), 0, static_cast<double>(i), obs(i + 1)});
    }
    EXPECT_EQ(buf.size(), 3u);
    EXPECT_EQ(buf.capacity(), 3u);
    EXPECT_EQ(buf[0].reward, 2.0);
    EXPECT_EQ(buf[1].reward, 3.0);
    EXPECT_EQ(buf[2].reward, 4.0);
    EXPECT_THROW(buf[3], std::out_of_range);
}

TEST(ReplayBuffer, DefaultCapacity) {
    ReplayBuffer buf;
    for (int i = 0; i < 1000; ++i) {
        buf.push(Experience{obs(i % 24), 0, static_cast<double>(i), obs((i + 1) % 24)});
    }
    EXPECT_EQ(buf.size(), 250u);
    EXPECT_EQ(buf[0].reward, 750.0);
}

TEST(Replay, BackwardSweepPropagatesDiscountedSignal) {
    // chain s0 -> s1 -> s2 -> s3 with reward only on the last step
    QTable t(Rng(7));
    std::array<Observation, 4> s{obs(0), obs(1), obs(2), obs(3)};
    for (const auto& o : s) {
        t.set(o, 0, 0.0);
        t.set(o, 1, 0.0);
    }
    ReplayBuffer buf(10);
    buf.push(Experience{s[0], 0, 0.0, s[1]});
    buf.push(Experience{s[1], 0, 0.0, s[2]});
    buf.push(Experience{s[2], 0, 1.0, s[3]});
    replay_backward(t, buf, 1.0, 0.9);
    EXPECT_DOUBLE_EQ(t.value(s[2], 0), 1.0);
    EXPECT_DOUBLE_EQ(t.value(s[1], 0), 0.9);
    EXPECT_NEAR(t.value(s[0], 0), 0.81, 1e-15);
}

TEST(Replay, ForwardOrderWouldNotPropagate) {
    QTable t(Rng(7));
    std::array<Observation, 3> s{obs(0), obs(1), obs(2)};
    for (const auto& o : s) {
        t.set(o, 0, 0.0);
        t.set(o, 1, 0.0);
    }
    q_update(t, Experience{s[0], 0, 0.0, s[1]}, 1.0, 0.9);
    q_update(t, Experience{s[1], 0, 1.0, s[2]}, 1.0, 0.9);
    EXPECT_EQ(t.value(s[0], 0), 0.0);
}

TEST(Greedy, FirstWinsTies) {
    const std::array<double, 2> tie{0.3, 0.3};
    EXPECT_EQ(greedy_action(tie), 0);
    const std::array<double, 2> v{0.1, 0.3};
    EXPECT_EQ(greedy_action(v), 1);
}

TEST(EpsilonGreedy, ExtremesAndFrequency) {
    Rng rng(8);
    const std::array<double, 2> v{0.1, 0.3};
    for (int i = 0; i < 1000; ++i) {
        EXPECT_EQ(epsilon_greedy(v, 0.0, rng), 1);
    }
    int ones = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        ones += epsilon_greedy(v, 1.0, rng);
    }
    EXPECT_NEAR(ones / static_cast<double>(n), 0.5, 0.01);
    int zeros = 0;
    for (int i = 0; i < n; ++i) {
        zeros += epsilon_greedy(v, 0.1, rng) == 0 ? 1 : 0;
    }
    EXPECT_NEAR(zeros / static_cast<double>(n), 0.05, 0.005);
}
