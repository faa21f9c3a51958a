#pragma once

#include <cstddef>
#include <span>

namespace cbrl::experiment {

struct WilcoxonResult {
    /// Rank sums of the positive and negative differences a - b.
    double w_plus = 0.0;
    double w_minus = 0.0;
    /// Pairs left after dropping zero differences.
    std::size_t n = 0;
    double z = 0.0;
    /// Two-sided, normal approximation with tie correction.
    double p = 1.0;
};

/// Paired signed-rank test of a against b. Zero differences are dropped and
/// tied magnitudes get their average rank. When every difference is zero the
/// result is w_plus = w_minus = 0 and p = 1. Throws std::invalid_argument on
/// unequal lengths or fewer than 10 pairs.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

}  // namespace cbrl::experiment
