#include "cbrl/experiment/config.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace cbrl::experiment {

using nlohmann::json;

std::string_view to_string(Learner l) {
    switch (l) {
    case Learner::qlearning: return "qlearning";
    case Learner::lspi: return "lspi";
    }
    return "?";
}

std::optional<Learner> learner_from_string(std::string_view name) {
    for (const auto l : kAllLearners) {
        if (to_string(l) == name) {
            return l;
        }
    }
    return std::nullopt;
}

std::string RunSpec::id() const {
    return fmt::format("{}-{}", to_string(learner), cluster::to_string(strategy));
}

RunSpec RunSpec::parse(std::string_view id) {
    const auto dash = id.find('-');
    if (dash != std::string_view::npos) {
        const auto l = learner_from_string(id.substr(0, dash));
        const auto s = cluster::strategy_from_string(id.substr(dash + 1));
        if (l && s) {
            return RunSpec{*l, *s};
        }
    }
    throw std::invalid_argument(fmt::format("unknown run '{}' (expected <qlearning|lspi>-<pooled|separate|cluster|grouped>)", id));
}

std::vector<RunSpec> all_runs() {
    std::vector<RunSpec> out;
    for (const auto l : kAllLearners) {
        for (const auto s : cluster::kAllStrategies) {
            out.push_back(RunSpec{l, s});
        }
    }
    return out;
}

void ExperimentConfig::validate() const {
    auto require = [](bool ok, std::string_view what) {
        if (!ok) {
            throw ConfigError(std::string(what));
        }
    };
    require(users_per_profile >= 1, "users_per_profile must be positive");
    require(warmup_days >= 1, "warmup_days must be positive");
    require(learning_days >= 1, "learning_days must be positive");
    require(warmup_first_hour >= 0 && warmup_first_hour <= warmup_last_hour && warmup_last_hour <= 23,
            "warm-up hours must satisfy 0 <= first <= last <= 23");
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        require(profiles[i].type == sim::kAllProfiles[i], "profiles out of order");
        try {
            profiles[i].validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(fmt::format("profile {}: {}", sim::to_string(profiles[i].type), e.what()));
        }
    }
    try {
        rewards.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(fmt::format("rewards: {}", e.what()));
    }
    require(qlearning.alpha > 0.0 && qlearning.alpha <= 1.0, "qlearning.alpha must lie in (0, 1]");
    require(qlearning.alpha_decay > 0.0 && qlearning.alpha_decay <= 1.0, "qlearning.alpha_decay must lie in (0, 1]");
    require(qlearning.gamma >= 0.0 && qlearning.gamma < 1.0, "qlearning.gamma must lie in [0, 1)");
    require(qlearning.epsilon >= 0.0 && qlearning.epsilon <= 1.0, "qlearning.epsilon must lie in [0, 1]");
    require(qlearning.replay_capacity >= 1, "qlearning.replay_capacity must be positive");
    require(lspi.gamma >= 0.0 && lspi.gamma < 1.0, "lspi.gamma must lie in [0, 1)");
    require(lspi.epsilon >= 0.0 && lspi.epsilon <= 1.0, "lspi.epsilon must lie in [0, 1]");
    require(lspi.max_iterations >= 1, "lspi.max_iterations must be positive");
    require(lspi.tolerance > 0.0, "lspi.tolerance must be positive");
    require(lspi.ridge > 0.0, "lspi.ridge must be positive");
    require(lspi.rcond_threshold >= 0.0, "lspi.rcond_threshold must be non-negative");
    require(clustering.k_min >= 2 && clustering.k_min <= clustering.k_max, "clustering needs 2 <= k_min <= k_max");
    require(clustering.restarts >= 1, "clustering.restarts must be positive");
    require(clustering.max_iter >= 1, "clustering.max_iter must be positive");
    require(!runs.empty(), "at least one run must be selected");
    for (std::size_t i = 0; i < runs.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            require(!(runs[i] == runs[j]), fmt::format("run {} listed twice", runs[i].id()));
        }
    }
}

namespace {

json activity_json(const sim::ActivitySpec& a) {
    json prio = json::array();
    for (const auto p : a.priority_over_this) {
        prio.push_back(std::string(to_string(p)));
    }
    return json{{"early_start", a.early_start},   {"late_start", a.late_start},
                {"min_duration", a.min_duration}, {"max_duration", a.max_duration},
                {"sd_duration", a.sd_duration},   {"priority_over_this", prio},
                {"prob_per_day", a.prob_per_day}};
}

json profile_json(const sim::UserProfile& p) {
    json acts = json::object();
    for (const auto& a : p.activities) {
        acts[std::string(to_string(a.activity))] = activity_json(a);
    }
    json window = nullptr;
    if (p.acceptance_window) {
        window = json{{"from_hour", p.acceptance_window->from_hour}, {"to_hour", p.acceptance_window->to_hour}};
    }
    return json{{"activities", acts},
                {"planner",
                 {{"t_plan_min", p.planner.t_plan_min},
                  {"t_plan_duration", p.planner.t_plan_duration},
                  {"t_plan_sd", p.planner.t_plan_sd}}},
                {"acceptance_rule", std::string(to_string(p.acceptance_rule))},
                {"acceptance_window", window},
                {"fatigue_threshold", p.fatigue_threshold},
                {"second_workout_prob", p.second_workout_prob}};
}

json config_json(const ExperimentConfig& c) {
    json profiles = json::object();
    for (const auto& p : c.profiles) {
        profiles[std::string(to_string(p.type))] = profile_json(p);
    }
    json runs = json::array();
    for (const auto& r : c.runs) {
        runs.push_back(r.id());
    }
    return json{
        {"seed", c.seed},
        {"users_per_profile", c.users_per_profile},
        {"warmup_days", c.warmup_days},
        {"learning_days", c.learning_days},
        {"warmup_first_hour", c.warmup_first_hour},
        {"warmup_last_hour", c.warmup_last_hour},
        {"rewards",
         {{"acceptance", c.rewards.acceptance},
          {"rejection", c.rewards.rejection},
          {"completion_per_hour", c.rewards.completion_per_hour},
          {"fatigue_penalty_per_level", c.rewards.fatigue_penalty_per_level}}},
        {"qlearning",
         {{"alpha", c.qlearning.alpha},
          {"alpha_decay", c.qlearning.alpha_decay},
          {"gamma", c.qlearning.gamma},
          {"epsilon", c.qlearning.epsilon},
          {"replay_capacity", c.qlearning.replay_capacity}}},
        {"lspi",
         {{"gamma", c.lspi.gamma},
          {"epsilon", c.lspi.epsilon},
          {"max_iterations", c.lspi.max_iterations},
          {"tolerance", c.lspi.tolerance},
          {"ridge", c.lspi.ridge},
          {"rcond_threshold", c.lspi.rcond_threshold}}},
        {"clustering",
         {{"k_min", c.clustering.k_min},
          {"k_max", c.clustering.k_max},
          {"restarts", c.clustering.restarts},
          {"max_iter", c.clustering.max_iter}}},
        {"runs", runs},
        {"profiles", profiles},
    };
}

// Rejects keys of `patch` that the defaults do not have. acceptance_window
// is null by default and accepts an object.
void check_keys(const json& defaults, const json& patch, const std::string& path) {
    if (!patch.is_object() || !defaults.is_object()) {
        return;
    }
    for (const auto& [key, value] : patch.items()) {
        const std::string here = path.empty() ? key : path + "." + key;
        if (!defaults.contains(key)) {
            throw ConfigError(fmt::format("unknown config key '{}'", here));
        }
        check_keys(defaults.at(key), value, here);
    }
}

class Reader {
public:
    const json& at(const json& obj, const char* key, const std::string& path) const {
        if (!obj.is_object() || !obj.contains(key)) {
            throw ConfigError(fmt::format("missing config key '{}{}'", path, key));
        }
        return obj.at(key);
    }

    double number(const json& obj, const char* key, const std::string& path) const {
        const auto& v = at(obj, key, path);
        if (!v.is_number()) {
            throw ConfigError(fmt::format("'{}{}' must be a number", path, key));
        }
        return v.get<double>();
    }

    template <class Int>
    Int integer(const json& obj, const char* key, const std::string& path) const {
        const auto& v = at(obj, key, path);
        if (!v.is_number_integer()) {
            throw ConfigError(fmt::format("'{}{}' must be an integer", path, key));
        }
        if constexpr (std::is_unsigned_v<Int>) {
            if (v.is_number_unsigned()) {
                return v.get<Int>();
            }
            if (v.get<long long>() < 0) {
                throw ConfigError(fmt::format("'{}{}' must be non-negative", path, key));
            }
        }
        return v.get<Int>();
    }

    std::string string(const json& obj, const char* key, const std::string& path) const {
        const auto& v = at(obj, key, path);
        if (!v.is_string()) {
            throw ConfigError(fmt::format("'{}{}' must be a string", path, key));
        }
        return v.get<std::string>();
    }

};

sim::ActivitySpec read_activity(const Reader& r, const json& j, Activity a, const std::string& path) {
    sim::ActivitySpec s;
    s.activity = a;
    s.early_start = r.number(j, "early_start", path);
    s.late_start = r.number(j, "late_start", path);
    s.min_duration = r.number(j, "min_duration", path);
    s.max_duration = r.number(j, "max_duration", path);
    s.sd_duration = r.number(j, "sd_duration", path);
    const auto& prio = r.at(j, "priority_over_this", path);
    if (!prio.is_array()) {
        throw ConfigError(fmt::format("'{}priority_over_this' must be a list", path));
    }
    for (const auto& name : prio) {
        const auto other = name.is_string() ? activity_from_string(name.get<std::string>()) : std::nullopt;
        if (!other) {
            throw ConfigError(fmt::format("'{}priority_over_this' names an unknown activity", path));
        }
        s.priority_over_this.push_back(*other);
    }
    const auto& probs = r.at(j, "prob_per_day", path);
    if (!probs.is_array() || probs.size() != kDaysPerWeek) {
        throw ConfigError(fmt::format("'{}prob_per_day' must list 7 probabilities", path));
    }
    for (std::size_t d = 0; d < kDaysPerWeek; ++d) {
        if (!probs[d].is_number()) {
            throw ConfigError(fmt::format("'{}prob_per_day' must hold numbers", path));
        }
        s.prob_per_day[d] = probs[d].get<double>();
    }
    return s;
}

sim::UserProfile read_profile(const Reader& r, const json& j, sim::ProfileType type, const std::string& path) {
    sim::UserProfile p;
    p.type = type;
    const auto& acts = r.at(j, "activities", path);
    for (const auto a : kAllActivities) {
        const std::string name(to_string(a));
        p.activities[index_of(a)] = read_activity(r, r.at(acts, name.c_str(), path + "activities."), a,
                                                  path + "activities." + name + ".");
    }
    const auto& planner = r.at(j, "planner", path);
    p.planner.t_plan_min = r.number(planner, "t_plan_min", path + "planner.");
    p.planner.t_plan_duration = r.number(planner, "t_plan_duration", path + "planner.");
    p.planner.t_plan_sd = r.number(planner, "t_plan_sd", path + "planner.");
    const auto rule = sim::acceptance_rule_from_string(r.string(j, "acceptance_rule", path));
    if (!rule) {
        throw ConfigError(fmt::format("'{}acceptance_rule' must be lunch_or_idle, idle_only or always", path));
    }
    p.acceptance_rule = *rule;
    // a merge patch with null removes the key, which also means "no window"
    if (j.contains("acceptance_window") && !j.at("acceptance_window").is_null()) {
        const auto& window = j.at("acceptance_window");
        p.acceptance_window = sim::AcceptanceWindow{r.number(window, "from_hour", path + "acceptance_window."),
                                                    r.number(window, "to_hour", path + "acceptance_window.")};
    }
    p.fatigue_threshold = r.integer<int>(j, "fatigue_threshold", path);
    p.second_workout_prob = r.number(j, "second_workout_prob", path);
    return p;
}

ExperimentConfig read_config(const json& j) {
    const Reader r;
    ExperimentConfig c;
    c.seed = r.integer<std::uint64_t>(j, "seed", "");
    c.users_per_profile = r.integer<int>(j, "users_per_profile", "");
    c.warmup_days = r.integer<int>(j, "warmup_days", "");
    c.learning_days = r.integer<int>(j, "learning_days", "");
    c.warmup_first_hour = r.integer<int>(j, "warmup_first_hour", "");
    c.warmup_last_hour = r.integer<int>(j, "warmup_last_hour", "");

    const auto& rw = r.at(j, "rewards", "");
    c.rewards.acceptance = r.number(rw, "acceptance", "rewards.");
    c.rewards.rejection = r.number(rw, "rejection", "rewards.");
    c.rewards.completion_per_hour = r.number(rw, "completion_per_hour", "rewards.");
    c.rewards.fatigue_penalty_per_level = r.number(rw, "fatigue_penalty_per_level", "rewards.");

    const auto& q = r.at(j, "qlearning", "");
    c.qlearning.alpha = r.number(q, "alpha", "qlearning.");
    c.qlearning.alpha_decay = r.number(q, "alpha_decay", "qlearning.");
    c.qlearning.gamma = r.number(q, "gamma", "qlearning.");
    c.qlearning.epsilon = r.number(q, "epsilon", "qlearning.");
    c.qlearning.replay_capacity = r.integer<std::size_t>(q, "replay_capacity", "qlearning.");

    const auto& l = r.at(j, "lspi", "");
    c.lspi.gamma = r.number(l, "gamma", "lspi.");
    c.lspi.epsilon = r.number(l, "epsilon", "lspi.");
    c.lspi.max_iterations = r.integer<int>(l, "max_iterations", "lspi.");
    c.lspi.tolerance = r.number(l, "tolerance", "lspi.");
    c.lspi.ridge = r.number(l, "ridge", "lspi.");
    c.lspi.rcond_threshold = r.number(l, "rcond_threshold", "lspi.");

    const auto& k = r.at(j, "clustering", "");
    c.clustering.k_min = r.integer<std::size_t>(k, "k_min", "clustering.");
    c.clustering.k_max = r.integer<std::size_t>(k, "k_max", "clustering.");
    c.clustering.restarts = r.integer<int>(k, "restarts", "clustering.");
    c.clustering.max_iter = r.integer<int>(k, "max_iter", "clustering.");

    const auto& runs = r.at(j, "runs", "");
    if (!runs.is_array()) {
        throw ConfigError("'runs' must be a list of run ids");
    }
    c.runs.clear();
    for (const auto& id : runs) {
        if (!id.is_string()) {
            throw ConfigError("'runs' must be a list of run ids");
        }
        try {
            c.runs.push_back(RunSpec::parse(id.get<std::string>()));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }

    const auto& profiles = r.at(j, "profiles", "");
    for (const auto t : sim::kAllProfiles) {
        const std::string name(sim::to_string(t));
        c.profiles[sim::index_of(t)] =
            read_profile(r, r.at(profiles, name.c_str(), "profiles."), t, "profiles." + name + ".");
    }
    return c;
}

}  // namespace

std::string to_json(const ExperimentConfig& config) {
    return config_json(config).dump(2) + "\n";
}

ExperimentConfig config_from_json(std::string_view text) {
    json patch;
    try {
        patch = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
    }
    if (!patch.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    json merged = config_json(ExperimentConfig{});
    check_keys(merged, patch, "");
    merged.merge_patch(patch);
    ExperimentConfig c = read_config(merged);
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return config_from_json(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

}  // namespace cbrl::experiment
