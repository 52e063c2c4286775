#pragma once

#include <algorithm>
#include <cmath>

#include "bolusrl/errors.hpp"

namespace bolusrl {

// Negative squared blood-glucose risk index. The log-transformed curve is
// zero at 112.5 mg/dL and climbs symmetrically (in risk space) toward the
// hypo and hyper reference levels, where the penalty reaches about -100.
struct RewardParams {
    double c1 = 1.509;
    double c2 = 1.084;
    double c3 = 5.381;
    double scale = 1.0;      // positive multiplier on the penalty
    double bg_floor = 10.0;  // readings clamped into [bg_floor, bg_cap]
    double bg_cap = 600.0;

    void validate() const {
        if (!(scale > 0)) throw invalid_input_error("reward scale must be > 0");
    }
};

// reward(BG) = -scale * 10 * (c1 * ((ln BG)^c2 - c3))^2, BG clamped first.
inline double risk_reward(double bg, const RewardParams& params = {}) {
    if (!std::isfinite(bg)) throw invalid_input_error("non-finite BG reading");
    const double clamped = std::clamp(bg, params.bg_floor, params.bg_cap);
    const double f = params.c1 * (std::pow(std::log(clamped), params.c2) - params.c3);
    return -params.scale * 10.0 * f * f;
}

} // namespace bolusrl
