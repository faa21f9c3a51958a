#include "cbrl/rl/features.hpp"

namespace cbrl::rl {

FeatureVector featurize(const Observation& obs) {
    obs.validate();
    FeatureVector f{};
    f[0] = static_cast<double>(obs.hour) / 23.0;
    f[1] = static_cast<double>(obs.weekday) / 6.0;
    f[2] = obs.worked_out_today ? 1.0 : 0.0;
    f[3] = static_cast<double>(obs.fatigue) / 7.0;
    for (std::size_t i = 0; i < kActivityCount; ++i) {
        f[4 + i] = obs.last_hour[i] ? 1.0 : 0.0;
    }
    return f;
}

}  // namespace cbrl::rl
