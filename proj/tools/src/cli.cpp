#include "cbrl/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cbrl/cluster/clustering.hpp"
#include "cbrl/experiment/config.hpp"
#include "cbrl/experiment/harness.hpp"
#include "cbrl/experiment/output.hpp"
#include "cbrl/experiment/report.hpp"

namespace cbrl::cli {

namespace fs = std::filesystem;
using namespace cbrl::experiment;

namespace {

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    bool force = false;
    int verbosity = 0;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_path, "JSON config; fields not given keep their defaults");
    cmd->add_option("--seed", c.seed, "Override the config seed");
    cmd->add_option("--out", c.out_dir, "Output directory (default: $CBRL_OUTPUT_ROOT or results, plus seed-<seed>)");
    cmd->add_flag("--force", c.force, "Replace a non-empty output directory");
    cmd->add_flag("-v,--verbose", c.verbosity, "Report progress on stderr");
}

ExperimentConfig load(const Common& c) {
    ExperimentConfig config = c.config_path.empty() ? ExperimentConfig{} : load_config(c.config_path);
    if (c.seed) {
        config.seed = *c.seed;
    }
    return config;
}

fs::path output_dir(const Common& c, const ExperimentConfig& config) {
    if (!c.out_dir.empty()) {
        return c.out_dir;
    }
    const char* root = std::getenv("CBRL_OUTPUT_ROOT");
    const fs::path base = root != nullptr && *root != '\0' ? fs::path(root) : fs::path("results");
    return base / fmt::format("seed-{}", config.seed);
}

// Creates `dir`, refusing to touch a non-empty one unless forced.
void prepare_output(const fs::path& dir, bool force) {
    if (fs::exists(dir)) {
        if (!fs::is_directory(dir)) {
            throw UsageError(fmt::format("output path '{}' is not a directory", dir.string()));
        }
        if (!fs::is_empty(dir)) {
            if (!force) {
                throw UsageError(
                    fmt::format("output directory '{}' is not empty; pass --force to replace it", dir.string()));
            }
            const auto target = fs::weakly_canonical(dir);
            const auto cwd = fs::current_path();
            if (target == target.root_path() || cwd.string().rfind(target.string(), 0) == 0) {
                throw UsageError(fmt::format("refusing to clear '{}'", dir.string()));
            }
            fs::remove_all(dir);
        }
    }
    fs::create_directories(dir);
}

int cmd_run(const Common& c, const std::vector<std::string>& only, std::ostream& out, std::ostream& err) {
    ExperimentConfig config = load(c);
    if (!only.empty()) {
        config.runs.clear();
        for (const auto& id : only) {
            try {
                config.runs.push_back(RunSpec::parse(id));
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
        }
    }
    config.validate();
    const fs::path dir = output_dir(c, config);
    prepare_output(dir, c.force);

    ProtocolHooks hooks;
    if (c.verbosity > 0) {
        hooks.log = [&err](std::string_view msg) { err << msg << '\n' << std::flush; };
    }
    hooks.run_finished = [&](const WarmupResult& warmup, RunOutcome& o) {
        write_run(dir / o.spec.id(), warmup, *o.result, config.warmup_days);
        // traces are on disk; keep only what the summary needs
        o.result->traces = {};
        o.result->events = {};
    };
    const ProtocolResult result = run_full_protocol(config, hooks);
    write_protocol_summary(dir, config, result);

    int failed = 0;
    for (const auto& r : result.runs) {
        if (r.result) {
            out << fmt::format("{:<20} {}\n", r.spec.id(), average_daily_reward(r.result->metrics));
        } else {
            ++failed;
            err << "error: " << r.error << '\n';
        }
    }
    out << "results written to " << dir.string() << '\n';
    return failed == 0 ? kExitOk : kExitRunFailure;
}

int cmd_warmup(const Common& c, std::ostream& out, std::ostream& err) {
    ExperimentConfig config = load(c);
    config.validate();
    const fs::path dir = output_dir(c, config);
    prepare_output(dir, c.force);
    if (c.verbosity > 0) {
        err << fmt::format("warm-up: {} users, {} days\n", config.user_count(), config.warmup_days);
    }
    const WarmupResult warmup = run_warmup(spawn_users(config), config);
    {
        std::ofstream f(dir / "traces.csv", std::ios::binary);
        write_traces_csv(f, "warmup", warmup.profiles, warmup.traces, 0);
        if (!f) {
            throw std::runtime_error("failed writing " + (dir / "traces.csv").string());
        }
    }
    std::ofstream(dir / "config.json", std::ios::binary) << to_json(config);
    out << "warm-up traces written to " << (dir / "traces.csv").string() << '\n';
    return kExitOk;
}

int cmd_cluster(const Common& c, const std::string& traces_path, int days, const std::string& run_id,
                std::ostream& out, std::ostream& err) {
    ExperimentConfig config = load(c);
    config.validate();
    if (days < 1) {
        throw UsageError("--days must be positive");
    }
    std::ifstream in(traces_path, std::ios::binary);
    if (!in) {
        throw UsageError(fmt::format("cannot read trace file '{}'", traces_path));
    }
    TraceTable table;
    try {
        table = read_traces_csv(in, run_id);
    } catch (const std::exception& e) {
        throw UsageError(fmt::format("{}: {}", traces_path, e.what()));
    }
    if (table.traces.size() < 3) {
        throw UsageError(fmt::format("{}: need traces of at least 3 users, found {}", traces_path,
                                     table.traces.size()));
    }
    const std::size_t steps = static_cast<std::size_t>(days) * kHoursPerDay;
    std::vector<cluster::TraceVector> vectors;
    for (std::size_t u = 0; u < table.traces.size(); ++u) {
        const auto& t = table.traces[u];
        if (t.size() < steps) {
            throw UsageError(fmt::format("{}: user {} has {} hours, fewer than {}", traces_path, table.user_ids[u],
                                         t.size(), steps));
        }
        vectors.push_back(cluster::vectorize_trace(std::span(t).first(steps), steps));
    }
    const fs::path dir = output_dir(c, config);
    prepare_output(dir, c.force);
    if (c.verbosity > 0) {
        err << fmt::format("clustering {} users over {} hours\n", vectors.size(), steps);
    }
    Rng rng = Rng::derive(config.seed, {stream::clustering});
    const cluster::DistanceMatrix d(vectors);
    auto assignment = cluster::select_k(
        d, rng,
        cluster::SelectKOptions{config.clustering.k_min, config.clustering.k_max, config.clustering.restarts,
                                config.clustering.max_iter});
    {
        std::ofstream f(dir / "clusters.csv", std::ios::binary);
        f << "user_id,true_profile,cluster_label,silhouette_overall\n";
        for (std::size_t u = 0; u < vectors.size(); ++u) {
            f << fmt::format("{},{},{},{}\n", table.user_ids[u], sim::to_string(table.profiles[u]),
                             assignment.labels[u], assignment.silhouette);
        }
    }
    out << fmt::format("k = {}, silhouette = {}\n", assignment.k, assignment.silhouette);
    out << "clusters written to " << (dir / "clusters.csv").string() << '\n';
    return kExitOk;
}

int cmd_report(const std::string& results_dir, std::ostream& out) {
    const auto files = write_report(results_dir);
    for (const auto& f : files) {
        out << f.string() << '\n';
    }
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cluster-based reinforcement learning for activity interventions"};
    app.name("cbrl");
    app.require_subcommand(1);

    Common run_opts;
    std::vector<std::string> only;
    auto* run = app.add_subcommand("run", "Warm-up followed by the configured learning runs");
    add_common(run, run_opts);
    run->add_option("--only", only, "Restrict to <learner>-<strategy>, e.g. lspi-grouped (repeatable)");

    Common warm_opts;
    auto* warm = app.add_subcommand("warmup-only", "Simulate the warm-up phase and export its traces");
    add_common(warm, warm_opts);

    Common cluster_opts;
    std::string traces_path;
    int days = 7;
    std::string run_id;
    auto* clus = app.add_subcommand("cluster", "Cluster users from an exported traces.csv");
    add_common(clus, cluster_opts);
    clus->add_option("--traces", traces_path, "traces.csv to read")->required();
    clus->add_option("--days", days, "Number of leading days per user to cluster on");
    clus->add_option("--run-id", run_id, "Only use rows of this run_id");

    std::string results_dir;
    auto* rep = app.add_subcommand("report", "Export plot-ready series from a results directory");
    rep->add_option("results", results_dir, "Results directory written by `run`")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*run) {
            return cmd_run(run_opts, only, out, err);
        }
        if (*warm) {
            return cmd_warmup(warm_opts, out, err);
        }
        if (*clus) {
            return cmd_cluster(cluster_opts, traces_path, days, run_id, out, err);
        }
        return cmd_report(results_dir, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ReportError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRunFailure;
    }
}

}  // namespace cbrl::cli
