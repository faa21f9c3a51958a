#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace cbrl {

/// Seeded random stream.
///
/// Sub-streams are obtained with derive(): the root seed and a path of integer
/// labels are hashed into an independent engine seed, so adding a consumer of
/// randomness never shifts the draws seen by another one.
class Rng {
public:
    using engine_type = std::mt19937_64;

    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// lo + (hi - lo) * u. Returns lo exactly when lo == hi.
    double uniform(double lo, double hi);
    double normal(double mean, double stddev);
    /// True with probability p (u < p), so p = 0 never fires and p = 1 always does.
    bool bernoulli(double p);
    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n);
    /// Uniform integer in [lo, hi].
    int integer(int lo, int hi);

    engine_type& engine() { return engine_; }

private:
    engine_type engine_;
};

/// Labels for derived streams.
namespace stream {
inline constexpr std::uint64_t population = 1;
inline constexpr std::uint64_t warmup_schedule = 2;
inline constexpr std::uint64_t clustering = 3;
inline constexpr std::uint64_t exploration = 4;
inline constexpr std::uint64_t learner_init = 5;
}  // namespace stream

}  // namespace cbrl
