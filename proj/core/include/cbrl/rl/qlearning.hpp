#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "cbrl/experience.hpp"
#include "cbrl/rng.hpp"

namespace cbrl::rl {

/// Optimistic start for "do nothing": U[0,1] for action 0, U[-1,0] for action 1.
double q_init(Rng& rng, int action);

/// Tabular Q-function keyed by the raw integer observation. A state's two
/// values are drawn with q_init the first time the state is touched.
class QTable {
public:
    using Values = std::array<double, kActionCount>;

    explicit QTable(Rng init_rng) : rng_(std::move(init_rng)) {}

    /// Initializes the state on first touch.
    Values& values(const Observation& s);
    double value(const Observation& s, int action) { return values(s)[static_cast<std::size_t>(action)]; }
    void set(const Observation& s, int action, double v);

    bool contains(const Observation& s) const { return q_.contains(s.key()); }
    std::size_t size() const { return q_.size(); }

    /// Entries ordered by key, for export.
    std::map<std::uint32_t, Values> sorted_entries() const;

private:
    std::unordered_map<std::uint32_t, Values> q_;
    Rng rng_;
};

/// Q(s,i) += alpha * (r + gamma * max_i' Q(s',i') - Q(s,i)).
void q_update(QTable& table, const Experience& e, double alpha, double gamma);

/// Fixed-capacity FIFO of the most recent experiences.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 250);

    void push(const Experience& e);
    std::size_t size() const { return size_; }
    std::size_t capacity() const { return items_.size(); }
    bool empty() const { return size_ == 0; }
    /// i = 0 is the oldest retained experience.
    const Experience& operator[](std::size_t i) const;

private:
    std::vector<Experience> items_;
    std::size_t head_ = 0;  // slot of the oldest entry
    std::size_t size_ = 0;
};

/// One update per buffered experience, newest first.
void replay_backward(QTable& table, const ReplayBuffer& buffer, double alpha, double gamma);

/// Index of the largest value; the first one wins ties.
int greedy_action(std::span<const double> values);

/// Uniformly random action with probability epsilon, greedy otherwise.
int epsilon_greedy(std::span<const double> values, double epsilon, Rng& rng);

}  // namespace cbrl::rl
