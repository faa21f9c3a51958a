#include "cbrl/rl/qlearning.hpp"

#include <algorithm>
#include <stdexcept>

namespace cbrl::rl {

double q_init(Rng& rng, int action) {
    if (action == 0) {
        return rng.uniform(0.0, 1.0);
    }
    if (action == 1) {
        return rng.uniform(-1.0, 0.0);
    }
    throw std::out_of_range("q_init: action must be 0 or 1");
}

QTable::Values& QTable::values(const Observation& s) {
    const auto [it, inserted] = q_.try_emplace(s.key());
    if (inserted) {
        for (int a = 0; a < kActionCount; ++a) {
            it->second[static_cast<std::size_t>(a)] = q_init(rng_, a);
        }
    }
    return it->second;
}

void QTable::set(const Observation& s, int action, double v) {
    values(s)[static_cast<std::size_t>(action)] = v;
}

std::map<std::uint32_t, QTable::Values> QTable::sorted_entries() const {
    return {q_.begin(), q_.end()};
}

void q_update(QTable& table, const Experience& e, double alpha, double gamma) {
    const auto& next = table.values(e.next);
    const double best_next = *std::max_element(next.begin(), next.end());
    auto& q = table.values(e.state)[static_cast<std::size_t>(e.action)];
    q += alpha * (e.reward + gamma * best_next - q);
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : items_(capacity) {
    if (capacity == 0) {
        throw std::invalid_argument("replay buffer capacity must be positive");
    }
}

void ReplayBuffer::push(const Experience& e) {
    if (size_ < items_.size()) {
        items_[(head_ + size_) % items_.size()] = e;
        ++size_;
    } else {
        items_[head_] = e;
        head_ = (head_ + 1) % items_.size();
    }
}

const Experience& ReplayBuffer::operator[](std::size_t i) const {
    if (i >= size_) {
        throw std::out_of_range("replay buffer index");
    }
    return items_[(head_ + i) % items_.size()];
}

void replay_backward(QTable& table, const ReplayBuffer& buffer, double alpha, double gamma) {
    for (std::size_t i = buffer.size(); i-- > 0;) {
        q_update(table, buffer[i], alpha, gamma);
    }
}

int greedy_action(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("greedy_action: no actions");
    }
    std::size_t best = 0;
    for (std::size_t a = 1; a < values.size(); ++a) {
        if (values[a] > values[best]) {
            best = a;
        }
    }
    return static_cast<int>(best);
}

int epsilon_greedy(std::span<const double> values, double epsilon, Rng& rng) {
    if (epsilon < 0.0 || epsilon > 1.0) {
        throw std::invalid_argument("epsilon must lie in [0, 1]");
    }
    if (rng.uniform() < epsilon) {
        return static_cast<int>(rng.index(values.size()));
    }
    return greedy_action(values);
}

}  // namespace cbrl::rl
