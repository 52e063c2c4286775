#pragma once

#include <cstddef>
#include <vector>

#include "bolusrl/errors.hpp"
#include "bolusrl/reward.hpp"
#include "bolusrl/scenario.hpp"
#include "bolusrl/simulator.hpp"
#include "bolusrl/transition.hpp"

namespace bolusrl {

// How a transition's reward is attributed.
//   kNextPreMeal: risk of the *next* pre-meal reading, so the Bellman target
//                 credits the injection with its consequence.
//   kIntervalMean: mean risk over every 3-minute sample in (t, t_next],
//                  which also charges excursions between readings.
enum class RewardAggregate { kNextPreMeal, kIntervalMean };

struct RewardOptions {
    RewardParams params;
    RewardAggregate aggregate = RewardAggregate::kNextPreMeal;
};

// Collapse a raw 3-minute stream into one Transition per meal occurrence.
// The chain is circular: the final meal of the run links back to the first
// recorded meal, standing in for the unrecorded next morning.
inline std::vector<Transition> summarize_to_meals(const Trajectory& traj,
                                                  const MealScenario& scenario,
                                                  const RewardOptions& reward = {}) {
    scenario.validate();
    const std::size_t T = traj.T();
    if (T == 0 || T % kStepsPerDay != 0)
        throw alignment_error("trajectory length is not a whole number of days");
    const int days = static_cast<int>(T / kStepsPerDay);
    const int meals = scenario.meals_per_day();

    struct Occurrence {
        std::size_t step;
        int meal_id;
    };
    std::vector<Occurrence> occ;
    occ.reserve(static_cast<std::size_t>(days) * meals);
    for (int day = 0; day < days; ++day) {
        for (const auto& ev : scenario.events) {
            const std::size_t step = meal_step_index(day, ev.time_of_day);
            if (step >= T || traj.records[step].CHO != ev.grams)
                throw alignment_error("no meal of " + format_double(ev.grams) +
                                      " g at expected step " + std::to_string(step));
            occ.push_back({step, ev.meal_id});
        }
    }

    std::vector<Transition> out;
    out.reserve(occ.size());
    for (std::size_t i = 0; i < occ.size(); ++i) {
        const auto& cur = occ[i];
        const auto& next = occ[(i + 1) % occ.size()];
        const auto& rec = traj.records[cur.step];

        Transition tr;
        tr.t_index = cur.step;
        tr.meal_id = cur.meal_id;
        tr.BG = rec.BG;
        tr.CHO = rec.CHO;
        tr.INS = rec.INS;
        tr.next_meal_id = next.meal_id;
        tr.next_BG = traj.records[next.step].BG;

        if (reward.aggregate == RewardAggregate::kNextPreMeal) {
            tr.reward = risk_reward(tr.next_BG, reward.params);
        } else {
            // Mean risk over the samples in (step, next_step], circularly.
            double sum = 0;
            std::size_t count = 0;
            for (std::size_t k = (cur.step + 1) % T; ; k = (k + 1) % T) {
                sum += risk_reward(traj.records[k].BG, reward.params);
                ++count;
                if (k == next.step) break;
            }
            tr.reward = sum / static_cast<double>(count);
        }
        out.push_back(tr);
    }
    return out;
}

} // namespace bolusrl
