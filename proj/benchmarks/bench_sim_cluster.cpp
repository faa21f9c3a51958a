#include <benchmark/benchmark.h>

#include "cbrl/cluster/clustering.hpp"
#include "cbrl/sim/user.hpp"

using namespace cbrl;

namespace {

void BM_SimulatedDay(benchmark::State& state) {
    const auto type = sim::kAllProfiles[static_cast<std::size_t>(state.range(0))];
    sim::SimUser user(0, sim::default_profile(type), Rng(1));
    Rng prompts(2);
    int day = 0;
    for (auto _ : state) {
        user.begin_day(day++);
        for (int h = 0; h < kHoursPerDay; ++h) {
            benchmark::DoNotOptimize(user.step_hour(prompts.bernoulli(0.1)));
        }
        user.end_day();
    }
    state.SetLabel(std::string(sim::to_string(type)));
}
BENCHMARK(BM_SimulatedDay)->DenseRange(0, 2);

std::vector<cluster::TraceVector> blobs(std::size_t n, Rng& rng) {
    std::vector<cluster::TraceVector> pts;
    for (std::size_t i = 0; i < n; ++i) {
        cluster::TraceVector p(cluster::kTraceDimension);
        const double centre = static_cast<double>(i % 3);
        for (auto& v : p) {
            v = centre + rng.normal(0, 0.5);
        }
        pts.push_back(std::move(p));
    }
    return pts;
}

void BM_DistanceMatrix(benchmark::State& state) {
    Rng rng(3);
    const auto pts = blobs(99, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cluster::DistanceMatrix(pts));
    }
}
BENCHMARK(BM_DistanceMatrix)->Unit(benchmark::kMillisecond);

void BM_KMedoids(benchmark::State& state) {
    Rng rng(4);
    const cluster::DistanceMatrix d(blobs(99, rng));
    for (auto _ : state) {
        benchmark::DoNotOptimize(cluster::k_medoids(d, static_cast<std::size_t>(state.range(0)), rng));
    }
}
BENCHMARK(BM_KMedoids)->DenseRange(2, 8, 3);

void BM_SelectK(benchmark::State& state) {
    Rng rng(5);
    const cluster::DistanceMatrix d(blobs(99, rng));
    for (auto _ : state) {
        benchmark::DoNotOptimize(cluster::select_k(d, rng));
    }
}
BENCHMARK(BM_SelectK)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
