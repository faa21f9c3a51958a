#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbrl::experiment {

class ReportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Turns a results directory into long-format plot data under
/// `<results>/report`:
///
///   fig1_average_daily_reward.csv  day,setup,metric,value (one bar per setup)
///   cumulative_lspi.csv            day,setup,metric,value
///   cumulative_qlearning.csv       day,setup,metric,value
///   per_profile.csv                day,setup,metric,value
///   cluster_composition.csv        setup,cluster_label,profile,users
///
/// Only the CSV files of the runs are read. Throws ReportError listing the
/// expected files when no run output is found or a run lacks a file.
/// Returns the written paths.
std::vector<std::filesystem::path> write_report(const std::filesystem::path& results_dir);

}  // namespace cbrl::experiment
