#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "bolusrl/errors.hpp"
#include "bolusrl/patient.hpp"
#include "bolusrl/rng.hpp"
#include "bolusrl/scenario.hpp"
#include "bolusrl/text.hpp"

namespace bolusrl {

constexpr double kStepMinutes = 3.0;   // raw stream cadence
constexpr int kStepsPerDay = 480;      // 1440 / 3
constexpr double kBgFloor = 10.0;      // mg/dL clamp
constexpr double kBgCeil = 600.0;

// Instantaneous simulator state. Glucose G, remote insulin action X, plasma
// insulin I, gut carbohydrate chain Q1->Q2 (mg), subcutaneous insulin chain
// S1->S2 (mU), clock t (min).
struct SimState {
    double G = 0;
    double X = 0;
    double I = 0;
    double Q1 = 0;
    double Q2 = 0;
    double S1 = 0;
    double S2 = 0;
    double t = 0;

    bool finite() const {
        return std::isfinite(G) && std::isfinite(X) && std::isfinite(I) &&
               std::isfinite(Q1) && std::isfinite(Q2) && std::isfinite(S1) &&
               std::isfinite(S2) && std::isfinite(t);
    }
};

// Fasting equilibrium: exact fixed point when basal_rate = 0.
inline SimState equilibrium_state(const VirtualPatient& p) {
    SimState s;
    s.G = p.Gb;
    s.X = 0;
    s.I = p.Ib;
    s.Q1 = s.Q2 = 0;
    s.S1 = s.S2 = 0;
    s.t = 0;
    return s;
}

using Derivatives = std::array<double, 7>; // dG dX dI dQ1 dQ2 dS1 dS2

// Minimal-model glucose kinetics with two-compartment subcutaneous insulin
// absorption and two-compartment gut absorption. bolus_rate in mU/min
// (pump basal included by the caller), cho_rate in mg/min.
inline Derivatives ode_derivatives(const SimState& s, const VirtualPatient& p,
                                   double bolus_rate, double cho_rate) {
    if (!s.finite())
        throw invalid_state_error("non-finite simulator state");
    if (!std::isfinite(bolus_rate) || !std::isfinite(cho_rate))
        throw invalid_state_error("non-finite input rate");
    const double u = bolus_rate + p.basal_mU_per_min();
    Derivatives d;
    d[5] = u - s.S1 / p.tau_I;                          // dS1
    d[6] = (s.S1 - s.S2) / p.tau_I;                     // dS2
    d[2] = -p.n * (s.I - p.Ib) + s.S2 / (p.tau_I * p.V_I); // dI
    d[1] = -p.p2 * s.X + p.p3 * (s.I - p.Ib);           // dX
    d[3] = cho_rate - s.Q1 / p.tau_m;                   // dQ1
    d[4] = (s.Q1 - s.Q2) / p.tau_m;                     // dQ2
    d[0] = -p.p1 * (s.G - p.Gb) - s.X * s.G +
           p.f_bio * s.Q2 / (p.tau_m * p.V_g);          // dG
    return d;
}

namespace detail {

inline SimState offset(const SimState& s, const Derivatives& d, double h) {
    SimState r = s;
    r.G += h * d[0];
    r.X += h * d[1];
    r.I += h * d[2];
    r.Q1 += h * d[3];
    r.Q2 += h * d[4];
    r.S1 += h * d[5];
    r.S2 += h * d[6];
    return r;
}

} // namespace detail

// One classical RK4 step. Impulse inputs (bolus units, CHO grams) are spread
// uniformly over the step as constant rates. Clamps are applied after the
// step: G into [10, 600], compartment masses to >= 0.
inline SimState integrate_step(const SimState& s, const VirtualPatient& p,
                               double bolus_units, double cho_grams,
                               double dt = kStepMinutes) {
    if (!(dt > 0)) throw invalid_input_error("dt must be > 0");
    const double bolus_rate = bolus_units * 1000.0 / dt; // U -> mU/min
    const double cho_rate = cho_grams * 1000.0 / dt;     // g -> mg/min

    const Derivatives k1 = ode_derivatives(s, p, bolus_rate, cho_rate);
    const Derivatives k2 = ode_derivatives(detail::offset(s, k1, dt / 2), p, bolus_rate, cho_rate);
    const Derivatives k3 = ode_derivatives(detail::offset(s, k2, dt / 2), p, bolus_rate, cho_rate);
    const Derivatives k4 = ode_derivatives(detail::offset(s, k3, dt), p, bolus_rate, cho_rate);

    Derivatives sum;
    for (int i = 0; i < 7; ++i) sum[i] = (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]) / 6.0;
    SimState r = detail::offset(s, sum, dt);
    r.t = s.t + dt;

    r.G = std::clamp(r.G, kBgFloor, kBgCeil);
    r.X = std::max(r.X, 0.0);
    r.I = std::max(r.I, 0.0);
    r.Q1 = std::max(r.Q1, 0.0);
    r.Q2 = std::max(r.Q2, 0.0);
    r.S1 = std::max(r.S1, 0.0);
    r.S2 = std::max(r.S2, 0.0);
    return r;
}

// One row of the 3-minute raw stream: the BG reading at t and the inputs
// delivered during [t, t+3).
struct StepRecord {
    double t = 0;   // min
    double BG = 0;  // mg/dL
    double CHO = 0; // g delivered this step
    double INS = 0; // bolus units delivered this step
};

struct Trajectory {
    int patient_id = 0;
    std::uint64_t seed = 0;
    std::vector<StepRecord> records;

    std::size_t T() const { return records.size(); }
};

// Step index (within a multi-day run) whose [3k, 3k+3) window contains the
// given meal time on the given day.
inline std::size_t meal_step_index(int day, int time_of_day) {
    return static_cast<std::size_t>(day) * kStepsPerDay +
           static_cast<std::size_t>(time_of_day) / 3;
}

// Extra simulator knobs. Meter noise is multiplicative Gaussian on the BG
// *reading* (recorded and shown to the policy), never on the true state;
// off by default and for every shipped configuration.
struct SimOptions {
    double meter_noise_sigma = 0.0;
};

// Run a meal scenario for `days` days from the fasting equilibrium. At each
// meal step the policy is queried with (meal_id, pre-meal BG reading) and the
// returned bolus is injected during that step together with the meal CHO.
// Deterministic given (patient, scenario, policy, seed).
template <typename PolicyFn>
Trajectory run_scenario(const VirtualPatient& patient, const MealScenario& scenario,
                        PolicyFn&& policy, int days, std::uint64_t seed,
                        const SimOptions& opts = {}) {
    if (days < 1) throw invalid_input_error("days must be >= 1");
    scenario.validate();

    Trajectory traj;
    traj.patient_id = patient.id;
    traj.seed = seed;
    traj.records.reserve(static_cast<std::size_t>(days) * kStepsPerDay);

    Rng noise_rng(seed);
    SimState state = equilibrium_state(patient);

    const int meals = scenario.meals_per_day();
    for (int day = 0; day < days; ++day) {
        int next_meal = 0;
        for (int k = 0; k < kStepsPerDay; ++k) {
            const std::size_t step = static_cast<std::size_t>(day) * kStepsPerDay + k;
            double reading = state.G;
            if (opts.meter_noise_sigma > 0) {
                reading *= 1.0 + opts.meter_noise_sigma * noise_rng.gaussian();
                reading = std::clamp(reading, kBgFloor, kBgCeil);
            }

            double cho = 0, ins = 0;
            if (next_meal < meals &&
                meal_step_index(day, scenario.events[next_meal].time_of_day) == step) {
                const MealEvent& ev = scenario.events[next_meal];
                cho = ev.grams;
                ins = policy(ev.meal_id, reading);
                if (!std::isfinite(ins) || ins < 0)
                    throw policy_output_error(
                        "policy returned invalid dose " + format_double(ins) +
                        " for meal_id " + std::to_string(ev.meal_id));
                ++next_meal;
            }

            traj.records.push_back({state.t, reading, cho, ins});
            state = integrate_step(state, patient, ins, cho);
        }
    }
    return traj;
}

// Raw-stream CSV export, one row per 3-minute step.
inline std::string trajectory_to_csv(const Trajectory& traj) {
    std::string out = "t_min,BG,CHO,INS\n";
    for (const auto& r : traj.records) {
        out += format_double(r.t);
        out += ',';
        out += format_double(r.BG);
        out += ',';
        out += format_double(r.CHO);
        out += ',';
        out += format_double(r.INS);
        out += '\n';
    }
    return out;
}

} // namespace bolusrl
