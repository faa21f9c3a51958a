#include <benchmark/benchmark.h>

#include "cbrl/rl/features.hpp"
#include "cbrl/rl/lspi.hpp"
#include "cbrl/rl/qlearning.hpp"

using namespace cbrl;
using namespace cbrl::rl;

namespace {

Observation random_obs(Rng& rng) {
    Observation o;
    o.hour = rng.integer(0, 23);
    o.weekday = rng.integer(0, 6);
    o.worked_out_today = rng.bernoulli(0.5);
    o.fatigue = rng.integer(0, 3);
    o.last_hour[rng.index(kActivityCount)] = true;
    return o;
}

Experience random_experience(Rng& rng) {
    return Experience{random_obs(rng), rng.integer(0, 1), rng.uniform(-0.5, 3), random_obs(rng)};
}

Eigen::VectorXd features(const Observation& o) {
    const auto f = featurize(o);
    return Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
}

void BM_QUpdate(benchmark::State& state) {
    Rng rng(1);
    QTable table(Rng(2));
    std::vector<Experience> batch;
    for (int i = 0; i < 1024; ++i) {
        batch.push_back(random_experience(rng));
    }
    std::size_t i = 0;
    for (auto _ : state) {
        q_update(table, batch[i++ & 1023], 0.2, 0.95);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_QUpdate);

void BM_ReplaySweep(benchmark::State& state) {
    Rng rng(3);
    QTable table(Rng(4));
    ReplayBuffer buffer(250);
    for (int i = 0; i < 250; ++i) {
        buffer.push(random_experience(rng));
    }
    for (auto _ : state) {
        replay_backward(table, buffer, 0.2, 0.95);
    }
    state.SetItemsProcessed(state.iterations() * 250);
}
BENCHMARK(BM_ReplaySweep);

void BM_AccumulatorAdd(benchmark::State& state) {
    Rng rng(5);
    std::vector<Experience> batch;
    for (int i = 0; i < 4096; ++i) {
        batch.push_back(random_experience(rng));
    }
    LstdqAccumulator acc{ActionBlockedBasis(kFeatureCount)};
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& e = batch[i++ & 4095];
        acc.add(features(e.state), e.action, e.reward, e.next.key(), features(e.next));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AccumulatorAdd);

// One policy-iteration run over a pooled-size batch (99 users x N days).
void BM_Lspi(benchmark::State& state) {
    Rng rng(6);
    LstdqAccumulator acc{ActionBlockedBasis(kFeatureCount)};
    const auto samples = static_cast<int>(state.range(0));
    for (int i = 0; i < samples; ++i) {
        const auto e = random_experience(rng);
        acc.add(features(e.state), e.action, e.reward, e.next.key(), features(e.next));
    }
    LspiOptions options;
    for (auto _ : state) {
        benchmark::DoNotOptimize(lspi(acc, options));
    }
    state.counters["distinct_next"] = static_cast<double>(acc.distinct_next_states());
}
BENCHMARK(BM_Lspi)->Arg(99 * 24 * 7)->Arg(99 * 24 * 107)->Unit(benchmark::kMillisecond);

}  // namespace
