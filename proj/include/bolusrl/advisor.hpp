#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "bolusrl/errors.hpp"
#include "bolusrl/patient.hpp"
#include "bolusrl/scenario.hpp"
#include "bolusrl/simulator.hpp"
#include "bolusrl/summarize.hpp"
#include "bolusrl/text.hpp"

namespace bolusrl {

// Coefficients of the standard two-term bolus formula.
struct AdvisorParams {
    double CIR = 0;       // grams covered per unit
    double CF = 0;        // mg/dL lowered per unit
    double BG_target = 0; // mg/dL

    void validate() const {
        std::vector<std::string> v;
        if (!(CIR > 0)) v.push_back("CIR must be > 0");
        if (!(CF > 0)) v.push_back("CF must be > 0");
        if (!(BG_target > 40 && BG_target < 300))
            v.push_back("BG_target must be in (40, 300)");
        if (!v.empty()) throw config_error(std::move(v));
    }
};

// dose = CHO/CIR + max(BG - target, 0)/CF
inline double bolus_dose(double cho, double bg, const AdvisorParams& params) {
    if (cho < 0) throw invalid_input_error("CHO must be >= 0");
    if (!std::isfinite(cho) || !std::isfinite(bg))
        throw invalid_input_error("non-finite bolus input");
    return cho / params.CIR + std::max(bg - params.BG_target, 0.0) / params.CF;
}

// Dose range explored by the random data-collection policy: the advisor
// formula evaluated at the extreme coefficient bounds, target 112.5.
inline std::pair<double, double> exploration_bounds(double cho, double bg) {
    const double lo = bolus_dose(cho, bg, {30.0, 2.8, 112.5});
    const double hi = bolus_dose(cho, bg, {3.0, 0.4, 112.5});
    return {lo, hi};
}

// Exhaustive calibration grid over the coefficient search bounds.
struct CalibrationGrid {
    std::vector<double> CIR_values;
    std::vector<double> CF_values;
    std::vector<double> target_values;
    int eval_days = 14;

    static std::vector<double> linspace(double lo, double hi, int count) {
        std::vector<double> v;
        if (count == 1) {
            v.push_back(lo);
            return v;
        }
        for (int i = 0; i < count; ++i)
            v.push_back(lo + (hi - lo) * i / (count - 1));
        return v;
    }

    // 10 x 10 x 6 points over CIR [3,30], CF [0.4,2.8], target [100,150].
    static CalibrationGrid defaults() {
        CalibrationGrid g;
        g.CIR_values = linspace(3.0, 30.0, 10);
        g.CF_values = linspace(0.4, 2.8, 10);
        g.target_values = linspace(100.0, 150.0, 6);
        return g;
    }

    void validate() const {
        std::vector<std::string> v;
        auto ascending = [&](const std::vector<double>& vals, const char* name) {
            if (vals.empty()) v.push_back(std::string(name) + " values must be nonempty");
            for (std::size_t i = 1; i < vals.size(); ++i)
                if (!(vals[i] > vals[i - 1]))
                    v.push_back(std::string(name) + " values must be ascending");
        };
        ascending(CIR_values, "CIR");
        ascending(CF_values, "CF");
        ascending(target_values, "BG_target");
        if (eval_days < 1) v.push_back("eval_days must be >= 1");
        if (!v.empty()) throw config_error(std::move(v));
    }

    std::size_t size() const {
        return CIR_values.size() * CF_values.size() * target_values.size();
    }
};

struct CandidateScore {
    AdvisorParams params;
    double mean_reward = -std::numeric_limits<double>::infinity();
    double total_insulin = std::numeric_limits<double>::infinity();
};

struct CalibrationResult {
    AdvisorParams best;
    double mean_reward = 0;
    std::vector<CandidateScore> scores; // in grid order
};

// Mean per-meal reward of the advisor policy over an eval_days run.
inline CandidateScore score_advisor_candidate(const VirtualPatient& patient,
                                              const MealScenario& scenario,
                                              const AdvisorParams& params,
                                              int eval_days, std::uint64_t seed,
                                              const RewardOptions& reward = {}) {
    CandidateScore score;
    score.params = params;
    try {
        auto policy = [&](int meal_id, double bg) {
            return bolus_dose(scenario.cho_for(meal_id), bg, params);
        };
        const Trajectory traj = run_scenario(patient, scenario, policy, eval_days, seed);
        const auto transitions = summarize_to_meals(traj, scenario, reward);
        double sum = 0, insulin = 0;
        for (const auto& t : transitions) sum += t.reward;
        for (const auto& r : traj.records) insulin += r.INS;
        score.mean_reward = sum / static_cast<double>(transitions.size());
        score.total_insulin = insulin;
    } catch (const error&) {
        score.mean_reward = -std::numeric_limits<double>::infinity();
    }
    return score;
}

// Exhaustive search over the Cartesian product. Candidates are independent
// and evaluated concurrently; the winner is the max mean reward, ties broken
// by lowest total insulin delivered, then by grid order.
inline CalibrationResult calibrate_grid_search(const VirtualPatient& patient,
                                               const MealScenario& scenario,
                                               const CalibrationGrid& grid,
                                               std::uint64_t seed,
                                               const RewardOptions& reward = {}) {
    grid.validate();
    std::vector<AdvisorParams> candidates;
    candidates.reserve(grid.size());
    for (double cir : grid.CIR_values)
        for (double cf : grid.CF_values)
            for (double target : grid.target_values)
                candidates.push_back({cir, cf, target});

    std::vector<CandidateScore> scores(candidates.size());
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(hw, candidates.size()));
    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            scores[i] = score_advisor_candidate(patient, scenario, candidates[i],
                                                grid.eval_days, seed, reward);
    };
    if (workers <= 1) {
        run_range(0, candidates.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (candidates.size() + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(candidates.size(), begin + chunk);
            if (begin < end) pool.emplace_back(run_range, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i].mean_reward > scores[best].mean_reward ||
            (scores[i].mean_reward == scores[best].mean_reward &&
             scores[i].total_insulin < scores[best].total_insulin))
            best = i;
    }

    CalibrationResult result;
    result.best = scores[best].params;
    result.mean_reward = scores[best].mean_reward;
    result.scores = std::move(scores);
    return result;
}

// Report CSV, one row per candidate, sorted by mean reward descending.
inline std::string calibration_to_csv(const CalibrationResult& result) {
    std::vector<CandidateScore> sorted = result.scores;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const CandidateScore& a, const CandidateScore& b) {
                         return a.mean_reward > b.mean_reward;
                     });
    std::string out = "CIR,CF,BG_target,mean_reward\n";
    for (const auto& s : sorted) {
        out += format_double(s.params.CIR);
        out += ',';
        out += format_double(s.params.CF);
        out += ',';
        out += format_double(s.params.BG_target);
        out += ',';
        out += format_double(s.mean_reward);
        out += '\n';
    }
    return out;
}

} // namespace bolusrl
