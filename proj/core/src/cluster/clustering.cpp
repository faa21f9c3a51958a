#include "cbrl/cluster/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cbrl/rl/features.hpp"

namespace cbrl::cluster {

TraceVector vectorize_trace(std::span<const Experience> trace, std::size_t steps) {
    if (trace.size() != steps) {
        throw std::invalid_argument("trace has " + std::to_string(trace.size()) + " steps, expected " +
                                    std::to_string(steps));
    }
    TraceVector v;
    v.reserve(steps * kStepWidth);
    for (const auto& e : trace) {
        const auto f = rl::featurize(e.state);
        v.insert(v.end(), f.begin(), f.end());
        v.push_back(e.reward);
    }
    return v;
}

double euclidean(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("euclidean: dimension mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

DistanceMatrix::DistanceMatrix(std::span<const TraceVector> points) : n_(points.size()), d_(n_ * n_, 0.0) {
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double v = euclidean(points[i], points[j]);
            d_[i * n_ + j] = v;
            d_[j * n_ + i] = v;
        }
    }
}

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> values) : n_(n), d_(std::move(values)) {
    if (d_.size() != n * n) {
        throw std::invalid_argument("distance matrix must be n x n");
    }
}

namespace {

// Returns the cost.
double assign(const DistanceMatrix& d, const std::vector<std::size_t>& medoids, std::vector<int>& labels) {
    const std::size_t n = d.size();
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        double best_d = d(i, medoids[0]);
        for (std::size_t c = 1; c < medoids.size(); ++c) {
            if (d(i, medoids[c]) < best_d) {
                best_d = d(i, medoids[c]);
                best = c;
            }
        }
        labels[i] = static_cast<int>(best);
        cost += best_d;
    }
    // a medoid always belongs to its own cluster, even when a duplicate point
    // serves as an earlier medoid
    for (std::size_t c = 0; c < medoids.size(); ++c) {
        labels[medoids[c]] = static_cast<int>(c);
    }
    return cost;
}

}  // namespace

ClusterAssignment k_medoids(const DistanceMatrix& d, std::size_t k, Rng& rng, int max_iter) {
    const std::size_t n = d.size();
    if (k == 0 || k > n) {
        throw std::invalid_argument("k_medoids needs 1 <= k <= n (k = " + std::to_string(k) +
                                    ", n = " + std::to_string(n) + ")");
    }
    if (max_iter < 1) {
        throw std::invalid_argument("k_medoids needs max_iter >= 1");
    }

    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::swap(pool[i], pool[i + rng.index(n - i)]);
    }
    ClusterAssignment out;
    out.k = k;
    out.medoids.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(out.medoids.begin(), out.medoids.end());
    out.labels.assign(n, 0);

    for (int it = 1; it <= max_iter; ++it) {
        out.cost = assign(d, out.medoids, out.labels);
        out.cost_history.push_back(out.cost);
        out.iterations = it;

        std::vector<std::size_t> next = out.medoids;
        for (std::size_t c = 0; c < k; ++c) {
            auto total = [&](std::size_t candidate) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    if (out.labels[j] == static_cast<int>(c)) {
                        s += d(candidate, j);
                    }
                }
                return s;
            };
            double best = total(next[c]);
            for (std::size_t i = 0; i < n; ++i) {
                if (out.labels[i] == static_cast<int>(c) && i != next[c]) {
                    const double s = total(i);
                    if (s < best) {
                        best = s;
                        next[c] = i;
                    }
                }
            }
        }
        std::sort(next.begin(), next.end());
        if (next == out.medoids) {
            break;
        }
        out.medoids = std::move(next);
        if (it == max_iter) {
            out.cost = assign(d, out.medoids, out.labels);
            out.cost_history.push_back(out.cost);
        }
    }
    if (k >= 2) {
        out.silhouette = silhouette(d, out.labels);
    }
    return out;
}

double silhouette(const DistanceMatrix& d, std::span<const int> labels) {
    const std::size_t n = d.size();
    if (labels.size() != n) {
        throw std::invalid_argument("silhouette: one label per point required");
    }
    if (n == 0) {
        throw std::invalid_argument("silhouette: no points");
    }
    const int k = *std::max_element(labels.begin(), labels.end()) + 1;
    if (*std::min_element(labels.begin(), labels.end()) < 0) {
        throw std::invalid_argument("silhouette: negative label");
    }
    if (k < 2) {
        throw std::invalid_argument("silhouette needs at least two clusters");
    }
    std::vector<std::size_t> count(static_cast<std::size_t>(k), 0);
    for (const int l : labels) {
        ++count[static_cast<std::size_t>(l)];
    }
    if (std::find(count.begin(), count.end(), 0) != count.end()) {
        throw std::invalid_argument("silhouette: empty cluster");
    }

    double total = 0.0;
    std::vector<double> sums(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i) {
        const auto own = static_cast<std::size_t>(labels[i]);
        if (count[own] == 1) {
            continue;
        }
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            sums[static_cast<std::size_t>(labels[j])] += d(i, j);
        }
        const double a = sums[own] / static_cast<double>(count[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < sums.size(); ++c) {
            if (c != own) {
                b = std::min(b, sums[c] / static_cast<double>(count[c]));
            }
        }
        const double m = std::max(a, b);
        if (m > 0.0) {
            total += (b - a) / m;
        }
    }
    return total / static_cast<double>(n);
}

ClusterAssignment select_k(const DistanceMatrix& d, Rng& rng, const SelectKOptions& options) {
    const std::size_t n = d.size();
    const std::size_t k_max = std::min(options.k_max, n - 1);
    if (n < 3 || options.k_min < 2 || options.k_min > k_max) {
        throw std::invalid_argument("select_k: need 2 <= k_min <= min(k_max, n - 1)");
    }
    if (options.restarts < 1) {
        throw std::invalid_argument("select_k needs at least one restart");
    }
    std::optional<ClusterAssignment> best;
    for (std::size_t k = options.k_min; k <= k_max; ++k) {
        std::optional<ClusterAssignment> best_k;
        for (int r = 0; r < options.restarts; ++r) {
            auto a = k_medoids(d, k, rng, options.max_iter);
            if (!best_k || a.cost < best_k->cost) {
                best_k = std::move(a);
            }
        }
        if (!best || best_k->silhouette > best->silhouette) {
            best = std::move(best_k);
        }
    }
    return *best;
}

std::string_view to_string(Strategy s) {
    switch (s) {
    case Strategy::pooled: return "pooled";
    case Strategy::separate: return "separate";
    case Strategy::cluster: return "cluster";
    case Strategy::grouped: return "grouped";
    }
    return "?";
}

std::optional<Strategy> strategy_from_string(std::string_view name) {
    for (const auto s : kAllStrategies) {
        if (to_string(s) == name) {
            return s;
        }
    }
    return std::nullopt;
}

std::vector<std::vector<std::size_t>> Partition::members() const {
    std::vector<std::vector<std::size_t>> out(groups);
    for (std::size_t u = 0; u < group_of_user.size(); ++u) {
        out[static_cast<std::size_t>(group_of_user[u])].push_back(u);
    }
    return out;
}

Partition partition_users(Strategy strategy, const PartitionInputs& in) {
    Partition p;
    const std::size_t n = in.users;
    if (n == 0) {
        throw std::invalid_argument("partition_users: no users");
    }
    switch (strategy) {
    case Strategy::pooled:
        p.group_of_user.assign(n, 0);
        p.groups = 1;
        break;
    case Strategy::separate:
        p.group_of_user.resize(n);
        std::iota(p.group_of_user.begin(), p.group_of_user.end(), 0);
        p.groups = n;
        break;
    case Strategy::cluster: {
        if (in.traces.size() != n || in.rng == nullptr) {
            throw std::invalid_argument("cluster strategy needs one trace per user and a random stream");
        }
        const DistanceMatrix d(in.traces);
        auto a = select_k(d, *in.rng, in.select);
        p.group_of_user = a.labels;
        p.groups = a.k;
        p.clusters = std::move(a);
        break;
    }
    case Strategy::grouped: {
        if (in.profiles.size() != n) {
            throw std::invalid_argument("grouped strategy needs the profile of every user");
        }
        std::array<int, sim::kProfileCount> group{};
        group.fill(-1);
        for (const auto t : in.profiles) {
            group[sim::index_of(t)] = 0;
        }
        int next = 0;
        for (auto& g : group) {
            if (g == 0) {
                g = next++;
            }
        }
        for (const auto t : in.profiles) {
            p.group_of_user.push_back(group[sim::index_of(t)]);
        }
        p.groups = static_cast<std::size_t>(next);
        break;
    }
    }
    return p;
}

PurityReport cluster_purity(std::span<const int> labels, std::span<const sim::ProfileType> profiles) {
    if (labels.size() != profiles.size() || labels.empty()) {
        throw std::invalid_argument("cluster_purity: labels and profiles must align");
    }
    const std::size_t n = labels.size();
    const auto k = static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end()) + 1);
    std::vector<std::array<std::size_t, sim::kProfileCount>> counts(k, std::array<std::size_t, sim::kProfileCount>{});
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] < 0) {
            throw std::invalid_argument("cluster_purity: negative label");
        }
        ++counts[static_cast<std::size_t>(labels[i])][sim::index_of(profiles[i])];
    }

    PurityReport r;
    std::size_t majority_total = 0;
    double pair_same = 0.0;
    for (const auto& c : counts) {
        const std::size_t size = std::accumulate(c.begin(), c.end(), std::size_t{0});
        const auto it = std::max_element(c.begin(), c.end());
        r.cluster_majority.push_back(sim::kAllProfiles[static_cast<std::size_t>(it - c.begin())]);
        r.cluster_purity.push_back(size == 0 ? 0.0 : static_cast<double>(*it) / static_cast<double>(size));
        majority_total += *it;
        pair_same += static_cast<double>(size) * static_cast<double>(size > 0 ? size - 1 : 0);
    }
    r.overall_purity = static_cast<double>(majority_total) / static_cast<double>(n);
    r.random_pair_baseline = n < 2 ? 0.0 : pair_same / (static_cast<double>(n) * static_cast<double>(n - 1));

    for (std::size_t p = 0; p < sim::kProfileCount; ++p) {
        double members = 0.0;
        double together = 0.0;
        for (const auto& c : counts) {
            const auto m = static_cast<double>(c[p]);
            members += m;
            together += m * (m - 1.0);
        }
        if (members >= 2.0) {
            r.co_clustering[p] = together / (members * (members - 1.0));
        }
    }
    return r;
}

}  // namespace cbrl::cluster
