#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bolusrl/simulator.hpp"
#include "bolusrl/summarize.hpp"

namespace bolusrl {

// Reporting bins over the clamped [40, 600] range.
constexpr std::array<double, 6> kBinEdges = {40.0, 70.0, 112.5, 180.0, 350.0, 600.0};

struct ProfileSlot {
    double mean = 0;
    double p10 = 0;
    double p90 = 0;
};

// Distribution of BG readings plus the average daily profile for one policy.
struct EvalReport {
    std::string policy_label;
    int patient_id = 0;
    int days = 0;
    std::array<double, 5> bin_fractions{};      // [40,70) ... [350,600]
    double mean_reward = 0;                      // per meal
    double hypo_fraction = 0;                    // readings below 70
    std::vector<ProfileSlot> daily_profile;      // 480 slots
    std::map<int, double> mean_dose_per_meal;    // units, by meal_id
};

namespace detail {

// Linear-interpolation quantile of an unsorted sample.
inline double quantile(std::vector<double> xs, double q) {
    std::sort(xs.begin(), xs.end());
    if (xs.size() == 1) return xs[0];
    const double rank = q * static_cast<double>(xs.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(rank);
    const double frac = rank - static_cast<double>(lo);
    if (lo + 1 >= xs.size()) return xs.back();
    return xs[lo] + frac * (xs[lo + 1] - xs[lo]);
}

} // namespace detail

// Bin fractions, daily profile, per-meal reward and dose statistics over a
// completed run.
inline EvalReport report_from_trajectory(const Trajectory& traj,
                                         const MealScenario& scenario,
                                         const RewardOptions& reward = {},
                                         const std::string& label = "") {
    const std::size_t T = traj.T();
    if (T == 0 || T % kStepsPerDay != 0)
        throw alignment_error("trajectory length is not a whole number of days");
    const int days = static_cast<int>(T / kStepsPerDay);

    EvalReport rep;
    rep.policy_label = label;
    rep.patient_id = traj.patient_id;
    rep.days = days;

    std::array<std::size_t, 5> counts{};
    std::size_t hypo = 0;
    for (const auto& r : traj.records) {
        const double bg = std::clamp(r.BG, kBinEdges.front(), kBinEdges.back());
        std::size_t bin = 4;
        for (std::size_t b = 0; b + 1 < kBinEdges.size(); ++b) {
            if (bg < kBinEdges[b + 1] || b == 4) {
                bin = b;
                break;
            }
        }
        ++counts[bin];
        if (bg < 70.0) ++hypo;
    }
    for (std::size_t b = 0; b < counts.size(); ++b)
        rep.bin_fractions[b] = static_cast<double>(counts[b]) / static_cast<double>(T);
    rep.hypo_fraction = static_cast<double>(hypo) / static_cast<double>(T);

    rep.daily_profile.resize(kStepsPerDay);
    std::vector<double> slot_values(days);
    for (int s = 0; s < kStepsPerDay; ++s) {
        double sum = 0;
        for (int d = 0; d < days; ++d) {
            const double bg = traj.records[static_cast<std::size_t>(d) * kStepsPerDay + s].BG;
            slot_values[d] = bg;
            sum += bg;
        }
        rep.daily_profile[s].mean = sum / days;
        rep.daily_profile[s].p10 = detail::quantile(slot_values, 0.10);
        rep.daily_profile[s].p90 = detail::quantile(slot_values, 0.90);
    }

    const auto transitions = summarize_to_meals(traj, scenario, reward);
    double reward_sum = 0;
    std::map<int, double> dose_sum;
    std::map<int, std::size_t> dose_count;
    for (const auto& t : transitions) {
        reward_sum += t.reward;
        dose_sum[t.meal_id] += t.INS;
        ++dose_count[t.meal_id];
    }
    rep.mean_reward = reward_sum / static_cast<double>(transitions.size());
    for (const auto& [id, sum] : dose_sum)
        rep.mean_dose_per_meal[id] = sum / static_cast<double>(dose_count[id]);
    return rep;
}

template <typename PolicyFn>
EvalReport evaluate_policy(const VirtualPatient& patient, const MealScenario& scenario,
                           PolicyFn&& policy, int days, std::uint64_t seed,
                           const RewardOptions& reward = {}, const SimOptions& sim = {},
                           const std::string& label = "") {
    const Trajectory traj =
        run_scenario(patient, scenario, std::forward<PolicyFn>(policy), days, seed, sim);
    return report_from_trajectory(traj, scenario, reward, label);
}

inline std::string bins_to_csv(const EvalReport& rep) {
    std::string out = "bin_lo,bin_hi,fraction\n";
    for (std::size_t b = 0; b < rep.bin_fractions.size(); ++b) {
        out += format_double(kBinEdges[b]);
        out += ',';
        out += format_double(kBinEdges[b + 1]);
        out += ',';
        out += format_double(rep.bin_fractions[b]);
        out += '\n';
    }
    return out;
}

inline std::string profile_to_csv(const EvalReport& rep) {
    std::string out = "minute_of_day,mean_BG,p10_BG,p90_BG\n";
    for (std::size_t s = 0; s < rep.daily_profile.size(); ++s) {
        out += std::to_string(3 * s);
        out += ',';
        out += format_double(rep.daily_profile[s].mean);
        out += ',';
        out += format_double(rep.daily_profile[s].p10);
        out += ',';
        out += format_double(rep.daily_profile[s].p90);
        out += '\n';
    }
    return out;
}

} // namespace bolusrl
