#pragma once

#include <cstdint>
#include <functional>

#include "bolusrl/advisor.hpp"
#include "bolusrl/qmodel.hpp"
#include "bolusrl/rng.hpp"
#include "bolusrl/scenario.hpp"

namespace bolusrl {

// A policy maps (meal_id, pre-meal BG reading) to an insulin dose.
using PolicyFn = std::function<double(int meal_id, double bg)>;

// Standard advisor formula with the scenario's CHO plan.
class BaselineAdvisorPolicy {
public:
    BaselineAdvisorPolicy(AdvisorParams params, MealScenario scenario)
        : params_(params), scenario_(std::move(scenario)) {}

    double operator()(int meal_id, double bg) const {
        return bolus_dose(scenario_.cho_for(meal_id), bg, params_);
    }

    const AdvisorParams& params() const { return params_; }

private:
    AdvisorParams params_;
    MealScenario scenario_;
};

// Greedy policy over a trained Q model.
class GreedyQPolicy {
public:
    GreedyQPolicy(QModel model, int action_grid_size = 121)
        : model_(std::move(model)),
          table_(model_.grid, action_grid_size) {}

    double operator()(int meal_id, double bg) const {
        std::vector<double> values;
        detail::action_values(model_, meal_id, bg, table_, values);
        return table_.doses[detail::argmax_lowest_dose(values)];
    }

    const QModel& model() const { return model_; }

private:
    QModel model_;
    detail::ActionFeatureTable table_;
};

// Doses drawn uniformly from the advisor-bracketed exploration range.
// Stateful: consumes one draw per meal, deterministic for a given seed.
class UniformExplorerPolicy {
public:
    UniformExplorerPolicy(std::uint64_t seed, MealScenario scenario)
        : rng_(seed), scenario_(std::move(scenario)) {}

    double operator()(int meal_id, double bg) {
        const auto [lo, hi] = exploration_bounds(scenario_.cho_for(meal_id), bg);
        return rng_.uniform(lo, hi);
    }

private:
    Rng rng_;
    MealScenario scenario_;
};

} // namespace bolusrl
