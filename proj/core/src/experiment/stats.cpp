#include "cbrl/experiment/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace cbrl::experiment {

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("wilcoxon: samples must be paired");
    }
    if (a.size() < 10) {
        throw std::invalid_argument("wilcoxon: at least 10 pairs required");
    }
    std::vector<double> d;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        if (diff != 0.0) {
            d.push_back(diff);
        }
    }
    WilcoxonResult r;
    r.n = d.size();
    if (d.empty()) {
        return r;
    }

    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return std::abs(d[i]) < std::abs(d[j]); });

    double tie_term = 0.0;  // sum of t^3 - t over tie groups
    for (std::size_t lo = 0; lo < order.size();) {
        std::size_t hi = lo + 1;
        while (hi < order.size() && std::abs(d[order[hi]]) == std::abs(d[order[lo]])) {
            ++hi;
        }
        const double rank = 0.5 * static_cast<double>(lo + 1 + hi);
        for (std::size_t i = lo; i < hi; ++i) {
            (d[order[i]] > 0.0 ? r.w_plus : r.w_minus) += rank;
        }
        const auto t = static_cast<double>(hi - lo);
        tie_term += t * t * t - t;
        lo = hi;
    }

    const auto n = static_cast<double>(r.n);
    const double mean = n * (n + 1.0) / 4.0;
    const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if (var <= 0.0) {
        return r;
    }
    r.z = (r.w_plus - mean) / std::sqrt(var);
    r.p = std::min(1.0, std::erfc(std::abs(r.z) / std::sqrt(2.0)));
    return r;
}

}  // namespace cbrl::experiment
