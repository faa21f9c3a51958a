#include "cbrl/experiment/harness.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "cbrl/rl/features.hpp"
#include "cbrl/rl/lspi.hpp"
#include "cbrl/rl/policy_io.hpp"
#include "cbrl/rl/qlearning.hpp"

namespace cbrl::experiment {

namespace {

struct Step {
    Experience experience;
    bool accepted = false;
};

// One decision hour; the last hour of the day also closes it.
Step play_hour(sim::SimUser& user, int action, std::vector<sim::RewardEvent>* events) {
    Step out;
    Experience& e = out.experience;
    e.state = user.observe();
    e.action = action;
    const auto hour = user.step_hour(action == 1);
    out.accepted = hour.accepted;
    e.reward = hour.reward;
    if (events != nullptr) {
        events->insert(events->end(), hour.events.begin(), hour.events.end());
    }
    if (e.state.hour == kHoursPerDay - 1) {
        if (const auto penalty = user.end_day()) {
            e.reward += penalty->value;
            if (events != nullptr) {
                events->push_back(*penalty);
            }
        }
    }
    e.next = user.observe();
    return out;
}

Eigen::VectorXd feature_vector(const Observation& s) {
    const auto f = rl::featurize(s);
    return Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
}

class TabularLearner final : public GroupLearner {
public:
    TabularLearner(const QLearningParams& params, Rng init_rng, std::span<const Experience> warmup)
        : params_(params), table_(std::move(init_rng)), buffer_(params.replay_capacity) {
        for (auto it = warmup.rbegin(); it != warmup.rend(); ++it) {
            rl::q_update(table_, *it, params_.alpha, params_.gamma);
        }
        const std::size_t first = warmup.size() > buffer_.capacity() ? warmup.size() - buffer_.capacity() : 0;
        for (std::size_t i = first; i < warmup.size(); ++i) {
            buffer_.push(warmup[i]);
        }
    }

    std::vector<double> action_values(const Observation& s) override {
        const auto& v = table_.values(s);
        return {v.begin(), v.end()};
    }

    double epsilon() const override { return params_.epsilon; }

    void hour_update(std::span<const Experience> batch, int learning_day) override {
        const double alpha = params_.alpha * std::pow(params_.alpha_decay, learning_day);
        for (const auto& e : batch) {
            rl::q_update(table_, e, alpha, params_.gamma);
            buffer_.push(e);
        }
        rl::replay_backward(table_, buffer_, alpha, params_.gamma);
    }

    void end_of_day(int) override {}

    void export_policy(std::ostream& out, std::string_view group) const override {
        rl::write_qtable(out, group, table_);
    }

private:
    QLearningParams params_;
    rl::QTable table_;
    rl::ReplayBuffer buffer_;
};

class LspiLearner final : public GroupLearner {
public:
    LspiLearner(const LspiParams& params, std::span<const Experience> warmup)
        : params_(params), stats_(basis()), q_(basis()) {
        for (const auto& e : warmup) {
            add(e);
        }
        train();
    }

    std::vector<double> action_values(const Observation& s) override { return q_.values(feature_vector(s)); }

    double epsilon() const override { return params_.epsilon; }

    void hour_update(std::span<const Experience> batch, int) override {
        for (const auto& e : batch) {
            add(e);
        }
    }

    void end_of_day(int) override { train(); }

    void export_policy(std::ostream& out, std::string_view group) const override {
        rl::write_linear(out, group, q_.weights());
    }

    int nonconverged_fits() const override { return nonconverged_; }

private:
    static rl::ActionBlockedBasis basis() { return rl::ActionBlockedBasis(rl::kFeatureCount, kActionCount, true); }

    void add(const Experience& e) {
        stats_.add(feature_vector(e.state), e.action, e.reward, e.next.key(), feature_vector(e.next));
    }

    void train() {
        if (stats_.samples() == 0) {
            return;
        }
        rl::LspiOptions options;
        options.gamma = params_.gamma;
        options.max_iterations = params_.max_iterations;
        options.tolerance = params_.tolerance;
        options.solve.ridge = params_.ridge;
        options.solve.rcond_threshold = params_.rcond_threshold;
        const auto fit = rl::lspi(stats_, options, q_.weights());
        q_.set_weights(fit.w);
        if (!fit.converged) {
            ++nonconverged_;
        }
    }

    LspiParams params_;
    rl::LstdqAccumulator stats_;
    rl::LinearQ q_;
    int nonconverged_ = 0;
};

std::uint64_t learner_label(Learner l) { return static_cast<std::uint64_t>(l); }
std::uint64_t strategy_label(cluster::Strategy s) { return static_cast<std::uint64_t>(s); }

std::vector<std::string> group_names(const cluster::Partition& p, cluster::Strategy strategy,
                                     const std::vector<sim::ProfileType>& profiles) {
    const auto members = p.members();
    std::vector<std::string> names;
    for (std::size_t g = 0; g < p.groups; ++g) {
        switch (strategy) {
        case cluster::Strategy::pooled: names.emplace_back("all"); break;
        case cluster::Strategy::separate: names.push_back(fmt::format("user-{}", members[g].front())); break;
        case cluster::Strategy::cluster: names.push_back(fmt::format("cluster-{}", g)); break;
        case cluster::Strategy::grouped:
            names.emplace_back(sim::to_string(profiles[members[g].front()]));
            break;
        }
    }
    return names;
}

}  // namespace

std::vector<sim::SimUser> spawn_users(const ExperimentConfig& config) {
    std::vector<sim::SimUser> users;
    users.reserve(config.user_count());
    int id = 0;
    for (const auto& profile : config.profiles) {
        for (int i = 0; i < config.users_per_profile; ++i, ++id) {
            users.emplace_back(id, profile,
                               Rng::derive(config.seed, {stream::population, static_cast<std::uint64_t>(id)}),
                               config.rewards);
        }
    }
    return users;
}

WarmupResult run_warmup(std::vector<sim::SimUser> users, const ExperimentConfig& config) {
    WarmupResult w;
    w.users = std::move(users);
    const std::size_t n = w.users.size();
    w.traces.resize(n);
    w.prompt_hours.resize(n);
    std::vector<Rng> schedule;
    for (const auto& u : w.users) {
        w.profiles.push_back(u.profile().type);
        schedule.push_back(
            Rng::derive(config.seed, {stream::warmup_schedule, static_cast<std::uint64_t>(u.id())}));
    }
    for (int day = 0; day < config.warmup_days; ++day) {
        for (std::size_t u = 0; u < n; ++u) {
            auto& user = w.users[u];
            const int prompt = schedule[u].integer(config.warmup_first_hour, config.warmup_last_hour);
            w.prompt_hours[u].push_back(prompt);
            user.begin_day(day);
            for (int h = 0; h < kHoursPerDay; ++h) {
                w.traces[u].push_back(play_hour(user, h == prompt ? 1 : 0, nullptr).experience);
            }
        }
    }
    return w;
}

std::unique_ptr<GroupLearner> make_tabular_learner(const QLearningParams& params, Rng init_rng,
                                                   std::span<const Experience> warmup) {
    return std::make_unique<TabularLearner>(params, std::move(init_rng), warmup);
}

std::unique_ptr<GroupLearner> make_lspi_learner(const LspiParams& params, std::span<const Experience> warmup) {
    return std::make_unique<LspiLearner>(params, warmup);
}

double average_daily_reward(std::span<const MetricsRecord> records) {
    if (records.empty()) {
        throw std::invalid_argument("average_daily_reward: no records");
    }
    double sum = 0.0;
    for (const auto& r : records) {
        sum += r.average;
    }
    return sum / static_cast<double>(records.size());
}

cluster::Partition make_partition(cluster::Strategy strategy, const WarmupResult& warmup,
                                  const ExperimentConfig& config) {
    cluster::PartitionInputs in;
    in.users = warmup.users.size();
    in.profiles = warmup.profiles;
    std::vector<cluster::TraceVector> vectors;
    Rng rng = Rng::derive(config.seed, {stream::clustering});
    if (strategy == cluster::Strategy::cluster) {
        for (const auto& t : warmup.traces) {
            vectors.push_back(cluster::vectorize_trace(t, t.size()));
        }
        in.traces = vectors;
        in.rng = &rng;
        in.select = cluster::SelectKOptions{config.clustering.k_min, config.clustering.k_max,
                                            config.clustering.restarts, config.clustering.max_iter};
    }
    return cluster::partition_users(strategy, in);
}

RunResult run_learning(const WarmupResult& warmup, const cluster::Partition& partition, RunSpec spec,
                       const ExperimentConfig& config) {
    const std::string run_id = spec.id();
    std::vector<sim::SimUser> users = warmup.users;
    const std::size_t n = users.size();
    if (partition.group_of_user.size() != n) {
        throw RunError(fmt::format("run {}: partition does not cover the {} users", run_id, n));
    }

    RunResult result;
    result.spec = spec;
    result.partition = partition;
    result.group_names = group_names(partition, spec.strategy, warmup.profiles);
    result.traces.resize(n);

    const auto members = partition.members();
    const std::size_t steps = warmup.traces.empty() ? 0 : warmup.traces.front().size();
    std::vector<std::unique_ptr<GroupLearner>> learners;
    for (std::size_t g = 0; g < partition.groups; ++g) {
        std::vector<Experience> batch;
        batch.reserve(steps * members[g].size());
        for (std::size_t t = 0; t < steps; ++t) {
            for (const auto u : members[g]) {
                batch.push_back(warmup.traces[u][t]);
            }
        }
        try {
            if (spec.learner == Learner::qlearning) {
                learners.push_back(make_tabular_learner(
                    config.qlearning,
                    Rng::derive(config.seed, {stream::learner_init, learner_label(spec.learner),
                                              strategy_label(spec.strategy), static_cast<std::uint64_t>(g)}),
                    batch));
            } else {
                learners.push_back(make_lspi_learner(config.lspi, batch));
            }
        } catch (const std::exception& e) {
            throw RunError(fmt::format("run {}: initializing group {}: {}", run_id, result.group_names[g], e.what()));
        }
    }

    Rng explore = Rng::derive(config.seed, {stream::exploration, learner_label(spec.learner),
                                            strategy_label(spec.strategy)});
    double running = 0.0;
    std::array<double, sim::kProfileCount> profile_running{};
    std::array<std::size_t, sim::kProfileCount> profile_size{};
    for (const auto t : warmup.profiles) {
        ++profile_size[sim::index_of(t)];
    }

    std::vector<std::vector<Experience>> hour_batch(partition.groups);
    for (int d = 0; d < config.learning_days; ++d) {
        const int day = config.warmup_days + d;
        MetricsRecord rec;
        rec.day = d;
        rec.user_reward.assign(n, 0.0);
        for (auto& u : users) {
            u.begin_day(day);
        }
        for (int h = 0; h < kHoursPerDay; ++h) {
            for (auto& b : hour_batch) {
                b.clear();
            }
            for (std::size_t u = 0; u < n; ++u) {
                const auto g = static_cast<std::size_t>(partition.group_of_user[u]);
                auto& learner = *learners[g];
                const auto values = learner.action_values(users[u].observe());
                const int action = rl::epsilon_greedy(values, learner.epsilon(), explore);
                const Step step = play_hour(users[u], action, &result.events);
                rec.prompts += action;
                rec.acceptances += step.accepted ? 1 : 0;
                rec.user_reward[u] += step.experience.reward;
                result.traces[u].push_back(step.experience);
                hour_batch[g].push_back(step.experience);
            }
            for (std::size_t g = 0; g < learners.size(); ++g) {
                if (!hour_batch[g].empty()) {
                    learners[g]->hour_update(hour_batch[g], d);
                }
            }
        }
        for (std::size_t g = 0; g < learners.size(); ++g) {
            try {
                learners[g]->end_of_day(d);
            } catch (const std::exception& e) {
                throw RunError(fmt::format("run {}: day {} group {}: {}", run_id, d, result.group_names[g], e.what()));
            }
        }

        std::array<double, sim::kProfileCount> profile_sum{};
        double total = 0.0;
        for (std::size_t u = 0; u < n; ++u) {
            total += rec.user_reward[u];
            profile_sum[sim::index_of(warmup.profiles[u])] += rec.user_reward[u];
        }
        rec.average = total / static_cast<double>(n);
        running += rec.average;
        rec.cumulative = running / static_cast<double>(d + 1);
        for (std::size_t p = 0; p < sim::kProfileCount; ++p) {
            if (profile_size[p] > 0) {
                rec.profile_average[p] = profile_sum[p] / static_cast<double>(profile_size[p]);
                profile_running[p] += rec.profile_average[p];
                rec.profile_cumulative[p] = profile_running[p] / static_cast<double>(d + 1);
            }
        }
        result.metrics.push_back(std::move(rec));
    }

    std::ostringstream policy;
    for (std::size_t g = 0; g < learners.size(); ++g) {
        learners[g]->export_policy(policy, result.group_names[g]);
        result.nonconverged_fits += learners[g]->nonconverged_fits();
    }
    result.policy = policy.str();
    return result;
}

std::vector<PairwiseTest> pairwise_tests(std::span<const RunOutcome> runs) {
    std::vector<PairwiseTest> out;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        for (std::size_t j = i + 1; j < runs.size(); ++j) {
            if (!runs[i].result || !runs[j].result) {
                continue;
            }
            const auto& a = runs[i].result->metrics;
            const auto& b = runs[j].result->metrics;
            std::vector<double> xa, xb;
            for (const auto& r : a) {
                xa.push_back(r.average);
            }
            for (const auto& r : b) {
                xb.push_back(r.average);
            }
            if (xa.size() != xb.size() || xa.size() < 10) {
                continue;
            }
            out.push_back(PairwiseTest{runs[i].spec.id(), runs[j].spec.id(), average_daily_reward(a),
                                       average_daily_reward(b), wilcoxon_signed_rank(xa, xb)});
        }
    }
    return out;
}

ProtocolResult run_full_protocol(const ExperimentConfig& config, const ProtocolHooks& hooks) {
    config.validate();
    auto log = [&](const std::string& msg) {
        if (hooks.log) {
            hooks.log(msg);
        }
    };
    ProtocolResult out;
    log(fmt::format("warm-up: {} users, {} days", config.user_count(), config.warmup_days));
    out.warmup = run_warmup(spawn_users(config), config);

    std::optional<cluster::Partition> clusters;
    for (const auto& spec : config.runs) {
        RunOutcome outcome;
        outcome.spec = spec;
        log(fmt::format("run {}: starting", spec.id()));
        try {
            cluster::Partition partition;
            if (spec.strategy == cluster::Strategy::cluster) {
                if (!clusters) {
                    clusters = make_partition(spec.strategy, out.warmup, config);
                }
                partition = *clusters;
            } else {
                partition = make_partition(spec.strategy, out.warmup, config);
            }
            outcome.result = run_learning(out.warmup, partition, spec, config);
            if (hooks.run_finished) {
                hooks.run_finished(out.warmup, outcome);
            }
            log(fmt::format("run {}: average daily reward {}", spec.id(),
                            average_daily_reward(outcome.result->metrics)));
        } catch (const RunError& e) {
            outcome.result.reset();
            outcome.error = e.what();
            log(fmt::format("FAILED: {}", outcome.error));
        } catch (const std::exception& e) {
            outcome.result.reset();
            outcome.error = fmt::format("run {}: {}", spec.id(), e.what());
            log(fmt::format("FAILED: {}", outcome.error));
        }
        out.runs.push_back(std::move(outcome));
    }
    out.tests = pairwise_tests(out.runs);
    return out;
}

}  // namespace cbrl::experiment
