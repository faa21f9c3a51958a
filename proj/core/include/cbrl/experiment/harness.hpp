#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cbrl/cluster/clustering.hpp"
#include "cbrl/experience.hpp"
#include "cbrl/experiment/config.hpp"
#include "cbrl/experiment/stats.hpp"
#include "cbrl/sim/user.hpp"

namespace cbrl::experiment {

/// users_per_profile users of each profile, ids in profile blocks
/// (workaholics first). Each user owns a stream derived from the seed and id.
std::vector<sim::SimUser> spawn_users(const ExperimentConfig& config);

struct WarmupResult {
    /// User state at the end of the warm-up.
    std::vector<sim::SimUser> users;
    std::vector<sim::ProfileType> profiles;
    /// One experience per user and hour.
    std::vector<Trace> traces;
    /// Prompt hour of each user on each warm-up day.
    std::vector<std::vector<int>> prompt_hours;
};

/// Runs the warm-up days with one prompt per user and day at an hour drawn
/// uniformly from [warmup_first_hour, warmup_last_hour].
WarmupResult run_warmup(std::vector<sim::SimUser> users, const ExperimentConfig& config);

/// Policy of one group of users.
class GroupLearner {
public:
    virtual ~GroupLearner() = default;
    virtual std::vector<double> action_values(const Observation& s) = 0;
    virtual double epsilon() const = 0;
    /// New experiences of the group's users for one hour, in user order.
    virtual void hour_update(std::span<const Experience> batch, int learning_day) = 0;
    virtual void end_of_day(int learning_day) = 0;
    virtual void export_policy(std::ostream& out, std::string_view group) const = 0;
    /// LSPI fits that stopped at the iteration cap.
    virtual int nonconverged_fits() const { return 0; }
};

/// Tabular Q-learning. Initialized by one backward replay over the warm-up
/// experiences; each hour applies the new experiences and then replays the
/// buffer backwards, with alpha * alpha_decay^learning_day.
std::unique_ptr<GroupLearner> make_tabular_learner(const QLearningParams& params, Rng init_rng,
                                                   std::span<const Experience> warmup);

/// LSPI over the action-blocked linear basis. Trained on the warm-up batch
/// and retrained at the end of every day on all of the group's experiences,
/// starting from the previous weights.
std::unique_ptr<GroupLearner> make_lspi_learner(const LspiParams& params, std::span<const Experience> warmup);

/// One learning day.
struct MetricsRecord {
    int day = 0;
    /// Reward summed over the day, per user.
    std::vector<double> user_reward;
    double average = 0.0;
    /// Running mean of `average` up to and including this day.
    double cumulative = 0.0;
    std::array<double, sim::kProfileCount> profile_average{};
    std::array<double, sim::kProfileCount> profile_cumulative{};
    int prompts = 0;
    int acceptances = 0;
};

/// Mean over days of the daily average. Throws on an empty series.
double average_daily_reward(std::span<const MetricsRecord> records);

struct RunResult {
    RunSpec spec;
    cluster::Partition partition;
    std::vector<std::string> group_names;
    /// Learning-phase experiences per user.
    std::vector<Trace> traces;
    std::vector<MetricsRecord> metrics;
    std::vector<sim::RewardEvent> events;
    /// Snapshot of every group's final policy.
    std::string policy;
    int nonconverged_fits = 0;
};

/// Raised for a learner failure, with the run, day and group in the message.
class RunError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Copies the warm-up users and runs the learning phase for one setup.
RunResult run_learning(const WarmupResult& warmup, const cluster::Partition& partition, RunSpec spec,
                       const ExperimentConfig& config);

/// The partition used by `strategy`. The cluster strategy draws from its own
/// stream derived from the seed, so both learners see the same clusters.
cluster::Partition make_partition(cluster::Strategy strategy, const WarmupResult& warmup,
                                  const ExperimentConfig& config);

struct PairwiseTest {
    std::string setup_a;
    std::string setup_b;
    double mean_a = 0.0;
    double mean_b = 0.0;
    WilcoxonResult test;
};

struct RunOutcome {
    RunSpec spec;
    std::optional<RunResult> result;
    std::string error;
};

struct ProtocolResult {
    WarmupResult warmup;
    std::vector<RunOutcome> runs;
    /// Every pair of completed runs, compared on their daily averages.
    std::vector<PairwiseTest> tests;
};

struct ProtocolHooks {
    std::function<void(std::string_view)> log;
    /// Called after each successful run, before the next one starts. May
    /// trim the result; an exception marks the run as failed.
    std::function<void(const WarmupResult&, RunOutcome&)> run_finished;
};

/// Warm-up once, then every configured run. A failing run is recorded with
/// its error and does not stop the others.
ProtocolResult run_full_protocol(const ExperimentConfig& config, const ProtocolHooks& hooks = {});

std::vector<PairwiseTest> pairwise_tests(std::span<const RunOutcome> runs);

}  // namespace cbrl::experiment
