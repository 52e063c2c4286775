#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bolusrl/policy.hpp"
#include "bolusrl/simulator.hpp"
#include "bolusrl/summarize.hpp"

namespace bolusrl {

struct ExplorationDataset {
    Trajectory trajectory;
    std::vector<Transition> transitions;
};

// Random-dose data collection: run the scenario for `days` days with doses
// sampled uniformly inside the advisor-bracketed range at each meal, then
// summarize the raw stream to pre-meal transitions.
inline ExplorationDataset generate_exploration_dataset(
    const VirtualPatient& patient, const MealScenario& scenario, int days,
    std::uint64_t seed, const RewardOptions& reward = {},
    const SimOptions& sim = {}) {
    UniformExplorerPolicy explorer(seed, scenario);
    ExplorationDataset out;
    out.trajectory = run_scenario(patient, scenario, explorer, days, seed, sim);
    out.transitions = summarize_to_meals(out.trajectory, scenario, reward);
    return out;
}

} // namespace bolusrl
