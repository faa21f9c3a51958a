#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cbrl/cluster/clustering.hpp"
#include "cbrl/sim/profile.hpp"
#include "cbrl/sim/user.hpp"

namespace cbrl::experiment {

enum class Learner { qlearning, lspi };
inline constexpr std::array<Learner, 2> kAllLearners{Learner::qlearning, Learner::lspi};

std::string_view to_string(Learner l);
std::optional<Learner> learner_from_string(std::string_view name);

/// One learner/strategy combination, written "<learner>-<strategy>".
struct RunSpec {
    Learner learner = Learner::lspi;
    cluster::Strategy strategy = cluster::Strategy::grouped;

    std::string id() const;
    /// Throws std::invalid_argument for an unknown id.
    static RunSpec parse(std::string_view id);
    friend bool operator==(const RunSpec&, const RunSpec&) = default;
};

/// The eight combinations, learners outermost.
std::vector<RunSpec> all_runs();

struct QLearningParams {
    double alpha = 0.2;
    /// alpha on learning day d is alpha * alpha_decay^d.
    double alpha_decay = 0.99;
    double gamma = 0.95;
    double epsilon = 0.05;
    std::size_t replay_capacity = 250;
    friend bool operator==(const QLearningParams&, const QLearningParams&) = default;
};

struct LspiParams {
    double gamma = 0.95;
    double epsilon = 0.01;
    int max_iterations = 20;
    double tolerance = 1e-5;
    double ridge = 1e-6;
    double rcond_threshold = 1e-12;
    friend bool operator==(const LspiParams&, const LspiParams&) = default;
};

struct ClusteringParams {
    std::size_t k_min = 2;
    std::size_t k_max = 8;
    int restarts = 10;
    int max_iter = 100;
    friend bool operator==(const ClusteringParams&, const ClusteringParams&) = default;
};

struct ExperimentConfig {
    std::uint64_t seed = 42;
    int users_per_profile = 33;
    int warmup_days = 7;
    int learning_days = 100;
    /// The warm-up prompt goes out at a uniformly drawn hour in this range.
    int warmup_first_hour = 9;
    int warmup_last_hour = 20;
    std::array<sim::UserProfile, sim::kProfileCount> profiles = sim::default_profiles();
    sim::RewardParams rewards;
    QLearningParams qlearning;
    LspiParams lspi;
    ClusteringParams clustering;
    std::vector<RunSpec> runs = all_runs();

    std::size_t user_count() const { return static_cast<std::size_t>(users_per_profile) * sim::kProfileCount; }

    /// Throws ConfigError describing the first violated constraint.
    void validate() const;
    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Pretty-printed JSON holding every field, so it can be fed back as a config.
std::string to_json(const ExperimentConfig& config);

/// Applies `text` as a JSON merge patch over the defaults. Unknown keys and
/// values of the wrong type are rejected. The result is validated.
ExperimentConfig config_from_json(std::string_view text);

/// Reads and parses a config file; throws ConfigError if it cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace cbrl::experiment
