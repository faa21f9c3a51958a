#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cbrl/experiment/config.hpp"
#include "cbrl/experiment/harness.hpp"

namespace cbrl::experiment {

// CSV layouts. Numbers use the shortest representation that reads back to
// the same double.
//
// traces.csv    run_id,user_id,profile,day,hour,f0..f9,action,reward
// metrics.csv   day,setup,avg_daily_reward,cumulative_avg,avg_<profile>...,
//               cumulative_<profile>...,prompts,acceptances
// clusters.csv  user_id,true_profile,cluster_label,silhouette_overall
// stats.csv     setup_a,setup_b,mean_a,mean_b,w_plus,w_minus,n,z,p_value
// summary.csv   setup,learner,strategy,status,groups,avg_daily_reward,
//               final_cumulative,avg_<profile>...,nonconverged_fits,error

/// Rows of all users, each in chronological order. `first_day` is the day
/// index of each trace's first entry.
void write_traces_csv(std::ostream& out, std::string_view run_id, std::span<const sim::ProfileType> profiles,
                      std::span<const Trace> traces, int first_day, bool header = true);
void write_metrics_csv(std::ostream& out, std::string_view setup, std::span<const MetricsRecord> records);
void write_clusters_csv(std::ostream& out, std::span<const sim::ProfileType> profiles,
                        const cluster::Partition& partition);
void write_stats_csv(std::ostream& out, std::span<const PairwiseTest> tests);
void write_summary_csv(std::ostream& out, std::span<const RunOutcome> runs);

/// Splits one CSV line; quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_csv_line(const std::string& line);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Throws std::runtime_error for a missing column.
    std::size_t column(std::string_view name) const;
};

/// Throws std::runtime_error on a ragged row.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

/// Per-user traces recovered from a traces.csv, users in ascending id order.
struct TraceTable {
    std::vector<int> user_ids;
    std::vector<sim::ProfileType> profiles;
    std::vector<Trace> traces;
};

/// Rebuilds the observations from the feature columns. Only the rows of
/// `run_id` are used when it is non-empty. next states link consecutive rows.
TraceTable read_traces_csv(std::istream& in, std::string_view run_id = {});

/// Writes the warm-up and learning traces, metrics, clusters and policy of
/// one run into `dir`.
void write_run(const std::filesystem::path& dir, const WarmupResult& warmup, const RunResult& run,
               int warmup_days);

/// Writes config.json, stats.csv and summary.csv into `dir`.
void write_protocol_summary(const std::filesystem::path& dir, const ExperimentConfig& config,
                            const ProtocolResult& result);

/// The column prefix used for a profile in metrics and summaries.
std::string profile_column(std::string_view prefix, sim::ProfileType t);

}  // namespace cbrl::experiment
