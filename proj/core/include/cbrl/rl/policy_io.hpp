#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cbrl/observation.hpp"
#include "cbrl/rl/qlearning.hpp"

namespace cbrl::rl {

// Line-oriented policy snapshots. Group names must not contain whitespace.
//
//   linear <group> <dim> <w_0> ... <w_dim-1>
//   q <group> <hour> <weekday> <worked_out> <fatigue> <flags> <action> <value>
//
// <flags> is six 0/1 characters in activity order. Lines starting with '#'
// are comments. Numbers are written in shortest round-trip form.

struct LinearSnapshot {
    std::string group;
    Eigen::VectorXd weights;
};

struct QRow {
    std::string group;
    Observation state;
    int action = 0;
    double value = 0.0;
};

struct PolicySnapshot {
    std::vector<LinearSnapshot> linear;
    std::vector<QRow> tabular;
};

void write_linear(std::ostream& out, std::string_view group, const Eigen::VectorXd& weights);
/// Rows ordered by state key, then action.
void write_qtable(std::ostream& out, std::string_view group, const QTable& table);

/// Throws std::runtime_error naming the offending line.
PolicySnapshot read_policy(std::istream& in);

}  // namespace cbrl::rl
