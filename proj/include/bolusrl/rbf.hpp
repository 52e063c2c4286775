#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bolusrl/errors.hpp"

namespace bolusrl {

// One axis of Gaussian bases with centers spaced uniformly over [lo, hi].
// sigma is fixed so each basis evaluates to exactly `overlap` at the
// adjacent center: sigma = spacing / sqrt(2 ln(1/overlap)).
struct RbfAxis {
    double lo = 0;
    double hi = 0;
    int B = 0;
    double overlap = 0;
    double spacing = 0;
    double sigma = 0;

    RbfAxis() = default;
    RbfAxis(double lo_, double hi_, int basis_count, double p) {
        if (basis_count < 2) throw invalid_input_error("basis count must be >= 2");
        if (!(p > 0 && p < 1)) throw invalid_input_error("overlap p must be in (0, 1)");
        if (!(hi_ > lo_)) throw invalid_input_error("axis range must be nonempty");
        lo = lo_;
        hi = hi_;
        B = basis_count;
        overlap = p;
        spacing = (hi - lo) / (B - 1);
        sigma = spacing / std::sqrt(2.0 * std::log(1.0 / p));
    }

    double center(int b) const { return lo + spacing * b; }

    // phi_b(x) for clamped x; every value lies in (0, 1].
    void evaluate(double x, std::vector<double>& phi) const {
        const double xc = std::clamp(x, lo, hi);
        phi.resize(B);
        const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
        for (int b = 0; b < B; ++b) {
            const double d = xc - center(b);
            phi[b] = std::exp(-d * d * inv2s2);
        }
    }

    std::vector<double> evaluate(double x) const {
        std::vector<double> phi;
        evaluate(x, phi);
        return phi;
    }
};

// B x B tensor grid over the (BG, INS) plane.
struct FeatureGrid {
    RbfAxis bg;
    RbfAxis ins;

    FeatureGrid() = default;
    FeatureGrid(int B, double p, double bg_lo = 40.0, double bg_hi = 600.0,
                double ins_max = 30.0)
        : bg(bg_lo, bg_hi, B, p), ins(0.0, ins_max, B, p) {}

    int basis_count() const { return bg.B; }
    std::size_t feature_count() const {
        return static_cast<std::size_t>(bg.B) * ins.B;
    }
};

// Row-major (bg_basis * B + ins_basis) tensor-product features.
inline std::vector<double> features(double bg_reading, double ins_units,
                                    const FeatureGrid& grid) {
    const auto phi_bg = grid.bg.evaluate(bg_reading);
    const auto phi_ins = grid.ins.evaluate(ins_units);
    std::vector<double> out(grid.feature_count());
    std::size_t k = 0;
    for (int b = 0; b < grid.bg.B; ++b)
        for (int b2 = 0; b2 < grid.ins.B; ++b2) out[k++] = phi_bg[b] * phi_ins[b2];
    return out;
}

// Uniform dose grid used for max/argmax over the action dimension.
inline std::vector<double> action_grid(const FeatureGrid& grid, int size) {
    if (size < 2) throw invalid_input_error("action grid size must be >= 2");
    std::vector<double> a(size);
    for (int j = 0; j < size; ++j)
        a[j] = grid.ins.lo + (grid.ins.hi - grid.ins.lo) * j / (size - 1);
    return a;
}

} // namespace bolusrl
