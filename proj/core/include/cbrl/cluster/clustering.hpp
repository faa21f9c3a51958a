#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cbrl/experience.hpp"
#include "cbrl/rng.hpp"
#include "cbrl/sim/profile.hpp"

namespace cbrl::cluster {

inline constexpr std::size_t kTraceSteps = 7 * 24;
/// Ten normalized features followed by the hourly reward.
inline constexpr std::size_t kStepWidth = 11;
inline constexpr std::size_t kTraceDimension = kTraceSteps * kStepWidth;

using TraceVector = std::vector<double>;

/// Concatenates featurize(state) and the reward of each step in order.
/// Throws std::invalid_argument unless the trace has exactly `steps` entries.
TraceVector vectorize_trace(std::span<const Experience> trace, std::size_t steps = kTraceSteps);

/// Throws std::invalid_argument on a dimension mismatch.
double euclidean(std::span<const double> a, std::span<const double> b);

/// Symmetric pairwise Euclidean distances.
class DistanceMatrix {
public:
    explicit DistanceMatrix(std::span<const TraceVector> points);
    /// Takes an n x n row-major matrix as is.
    DistanceMatrix(std::size_t n, std::vector<double> values);

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }

private:
    std::size_t n_ = 0;
    std::vector<double> d_;
};

struct ClusterAssignment {
    std::size_t k = 0;
    /// Cluster of each point; cluster c has medoid medoids[c].
    std::vector<int> labels;
    /// Point indices, ascending.
    std::vector<std::size_t> medoids;
    /// Sum of distances from each point to its medoid.
    double cost = 0.0;
    /// Cost after each assignment step.
    std::vector<double> cost_history;
    int iterations = 0;
    /// Mean silhouette of the final labels; 0 when k = 1.
    double silhouette = 0.0;
};

/// Alternating k-medoids: seed k distinct medoids uniformly, then repeat
/// (assign every point to its nearest medoid, lowest index on ties) and
/// (move each medoid to the member with the smallest total distance to its
/// cluster, keeping the current one on ties) until the medoids stop
/// changing or max_iter rounds have run. Requires 1 <= k <= n.
ClusterAssignment k_medoids(const DistanceMatrix& d, std::size_t k, Rng& rng, int max_iter = 100);

/// Mean silhouette. Singleton members score 0, as do points with a = b = 0.
/// Throws std::invalid_argument for fewer than two clusters or an empty one.
double silhouette(const DistanceMatrix& d, std::span<const int> labels);

struct SelectKOptions {
    std::size_t k_min = 2;
    std::size_t k_max = 8;
    int restarts = 10;
    int max_iter = 100;
};

/// For every k in range keeps the lowest-cost of `restarts` runs and returns
/// the one with the highest silhouette; the smaller k wins ties. k_max is
/// capped at n - 1.
ClusterAssignment select_k(const DistanceMatrix& d, Rng& rng, const SelectKOptions& options = {});

enum class Strategy { pooled, separate, cluster, grouped };
inline constexpr std::array<Strategy, 4> kAllStrategies{Strategy::pooled, Strategy::separate, Strategy::cluster,
                                                        Strategy::grouped};

std::string_view to_string(Strategy s);
std::optional<Strategy> strategy_from_string(std::string_view name);

struct Partition {
    /// Group of each user, 0..groups-1.
    std::vector<int> group_of_user;
    std::size_t groups = 0;
    /// Set for the cluster strategy.
    std::optional<ClusterAssignment> clusters;

    /// Users of each group in ascending id order.
    std::vector<std::vector<std::size_t>> members() const;
};

struct PartitionInputs {
    std::size_t users = 0;
    /// Required by the cluster strategy.
    std::span<const TraceVector> traces;
    /// Required by the grouped strategy.
    std::span<const sim::ProfileType> profiles;
    /// Required by the cluster strategy.
    Rng* rng = nullptr;
    SelectKOptions select;
};

/// pooled: one group; separate: one group per user; cluster: select_k over
/// the traces; grouped: one group per profile present, in profile order.
/// Throws std::invalid_argument when the strategy's inputs are missing.
Partition partition_users(Strategy strategy, const PartitionInputs& in);

struct PurityReport {
    /// Majority-profile share of each cluster.
    std::vector<double> cluster_purity;
    std::vector<sim::ProfileType> cluster_majority;
    /// Majority counts summed over clusters, divided by the number of users.
    double overall_purity = 0.0;
    /// Share of same-profile user pairs that land in one cluster; empty when
    /// the profile has fewer than two users.
    std::array<std::optional<double>, sim::kProfileCount> co_clustering{};
    /// Chance that two distinct users picked at random share a cluster.
    double random_pair_baseline = 0.0;
};

PurityReport cluster_purity(std::span<const int> labels, std::span<const sim::ProfileType> profiles);

}  // namespace cbrl::cluster
