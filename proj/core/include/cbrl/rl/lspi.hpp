#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace cbrl::rl {

/// phi(s, a): the state features plus an optional constant, copied into the
/// block of action a; all other blocks are zero.
class ActionBlockedBasis {
public:
    explicit ActionBlockedBasis(std::size_t feature_dim, std::size_t actions = 2, bool bias = true);

    std::size_t feature_dim() const { return feature_dim_; }
    std::size_t actions() const { return actions_; }
    bool bias() const { return bias_; }
    std::size_t block_size() const { return feature_dim_ + (bias_ ? 1 : 0); }
    std::size_t dimension() const { return actions_ * block_size(); }

    /// [x; 1] (or x without the bias).
    Eigen::VectorXd block(const Eigen::VectorXd& x) const;
    Eigen::VectorXd operator()(const Eigen::VectorXd& x, int action) const;

private:
    std::size_t feature_dim_;
    std::size_t actions_;
    bool bias_;
};

/// Q(s, a) = w . phi(s, a).
class LinearQ {
public:
    explicit LinearQ(ActionBlockedBasis basis);
    LinearQ(ActionBlockedBasis basis, Eigen::VectorXd weights);

    const ActionBlockedBasis& basis() const { return basis_; }
    const Eigen::VectorXd& weights() const { return w_; }
    void set_weights(Eigen::VectorXd w);

    double value(const Eigen::VectorXd& x, int action) const;
    std::vector<double> values(const Eigen::VectorXd& x) const;
    /// Arg-max with the lowest action winning ties.
    int greedy(const Eigen::VectorXd& x) const;

private:
    ActionBlockedBasis basis_;
    Eigen::VectorXd w_;
};

/// A sample for least-squares evaluation. `weight` lets an enumerated batch
/// carry transition probabilities instead of duplicated samples.
struct Transition {
    Eigen::VectorXd x;
    int action = 0;
    double reward = 0.0;
    Eigen::VectorXd x_next;
    double weight = 1.0;
};

using Policy = std::function<int(const Eigen::VectorXd&)>;

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolveOptions {
    /// Added to the diagonal when A is singular or badly conditioned.
    double ridge = 1e-6;
    /// Reciprocal condition number below which the ridge is applied.
    double rcond_threshold = 1e-12;
};

struct LstdqSolution {
    Eigen::VectorXd w;
    bool ridge_used = false;
};

/// Solves A w = b, falling back to (A + ridge I) w = b when A is rank
/// deficient. Throws SolverError if no finite, consistent solution results.
LstdqSolution solve_lstdq_system(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const SolveOptions& options);

/// Reference LSTDQ: A = sum phi(s,a) (phi(s,a) - gamma phi(s', pi(s')))^T,
/// b = sum phi(s,a) r, built sample by sample.
LstdqSolution lstdq(std::span<const Transition> samples, const ActionBlockedBasis& basis, const Policy& policy,
                    double gamma, const SolveOptions& options = {});

/// Sufficient statistics for repeated LSTDQ solves over a growing batch.
///
/// The policy-independent part of A and all of b are summed once. The
/// policy-dependent part only needs, per distinct next state, the summed
/// block features of the samples that led there, so a solve costs
/// O(distinct next states) instead of O(samples).
class LstdqAccumulator {
public:
    explicit LstdqAccumulator(ActionBlockedBasis basis);

    /// `next_key` identifies x_next; equal keys must mean equal features.
    void add(const Eigen::VectorXd& x, int action, double reward, std::uint64_t next_key,
             const Eigen::VectorXd& x_next, double weight = 1.0);

    const ActionBlockedBasis& basis() const { return basis_; }
    std::size_t samples() const { return samples_; }
    std::size_t distinct_next_states() const { return index_.size(); }

    /// Evaluates the greedy policy of `q`.
    LstdqSolution solve(const LinearQ& q, double gamma, const SolveOptions& options = {}) const;

    /// The assembled system for the greedy policy of `q`.
    std::pair<Eigen::MatrixXd, Eigen::VectorXd> system(const LinearQ& q, double gamma) const;

private:
    ActionBlockedBasis basis_;
    Eigen::MatrixXd c_;
    Eigen::VectorXd b_;
    /// Per action k: sum over samples taking k of [x; 1][x'; 1]^T, i.e. the
    /// cross term as if every next state chose action 0.
    std::vector<Eigen::MatrixXd> base_cross_;
    /// Column j holds [x'; 1] of the j-th distinct next state.
    std::vector<double> next_blocks_;
    /// Per action k, column j: summed [x; 1] of samples taking k that led to
    /// next state j.
    std::vector<std::vector<double>> sums_;
    std::unordered_map<std::uint64_t, std::size_t> index_;
    std::size_t samples_ = 0;
};

struct LspiOptions {
    double gamma = 0.95;
    int max_iterations = 20;
    double tolerance = 1e-5;
    SolveOptions solve;
};

struct LspiResult {
    Eigen::VectorXd w;
    int iterations = 0;
    bool converged = false;
    bool ridge_used = false;
};

/// Policy iteration with LSTDQ evaluation, starting from the greedy policy of
/// `initial` (zero weights when absent, i.e. never intervene). Stops once
/// ||w_t - w_{t-1}||_2 < tolerance or after max_iterations evaluations.
LspiResult lspi(std::span<const Transition> samples, const ActionBlockedBasis& basis, const LspiOptions& options,
                const std::optional<Eigen::VectorXd>& initial = std::nullopt);
LspiResult lspi(const LstdqAccumulator& stats, const LspiOptions& options,
                const std::optional<Eigen::VectorXd>& initial = std::nullopt);

}  // namespace cbrl::rl
