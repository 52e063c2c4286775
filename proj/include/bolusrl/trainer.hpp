#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "bolusrl/errors.hpp"
#include "bolusrl/qmodel.hpp"
#include "bolusrl/rng.hpp"
#include "bolusrl/transition.hpp"

namespace bolusrl {

struct TrainConfig {
    FeatureGrid grid{8, 0.2};
    double gamma = 0.9;
    double learning_rate = 0.01; // base rate; decays as 1/sqrt(update index)
    std::size_t replay_capacity = 50000;
    std::size_t batch_size = 64;
    std::size_t freeze_period = 500;   // updates between frozen refreshes
    std::size_t total_updates = 200000;
    int action_grid_size = 121;
    std::uint64_t seed = 0;

    std::vector<std::string> violations() const {
        std::vector<std::string> v;
        // gamma = 0 (no bootstrapping) is allowed; it degenerates to
        // one-step regression and is useful for diagnostics.
        if (!(gamma >= 0 && gamma < 1)) v.push_back("gamma must be in [0, 1)");
        if (!(learning_rate > 0)) v.push_back("learning_rate must be > 0");
        if (replay_capacity == 0) v.push_back("replay_capacity must be positive");
        if (batch_size == 0) v.push_back("batch_size must be positive");
        if (freeze_period == 0) v.push_back("freeze_period must be positive");
        if (total_updates == 0) v.push_back("total_updates must be positive");
        if (action_grid_size < 2) v.push_back("action_grid_size must be >= 2");
        return v;
    }

    void validate() const {
        auto v = violations();
        if (!v.empty()) throw config_error(std::move(v));
    }
};

struct TdStats {
    double sum_abs_td_error = 0;
    std::size_t applied = 0;
    std::size_t skipped = 0;
};

namespace detail {

// One pass of sequential single-sample TD steps over a batch. Targets come
// from the frozen model only; the live model supplies the current estimate
// and receives the gradient step eta * delta * phi.
inline TdStats td_update_impl(QModel& model, const QModel& frozen,
                              const std::vector<Transition>& batch,
                              const std::vector<std::size_t>* indices,
                              double eta, double gamma,
                              const ActionFeatureTable& table) {
    TdStats stats;
    const std::size_t count = indices ? indices->size() : batch.size();
    if (count == 0) throw invalid_input_error("empty training batch");

    std::vector<double> action_q;
    const int B = model.grid.basis_count();
    std::vector<double> phi_bg, phi_ins;

    for (std::size_t k = 0; k < count; ++k) {
        const Transition& tr = batch[indices ? (*indices)[k] : k];

        action_values(frozen, tr.next_meal_id, tr.next_BG, table, action_q);
        double best_next = action_q[0];
        for (double v : action_q) best_next = std::max(best_next, v);
        const double target = tr.reward + gamma * best_next;
        if (!std::isfinite(target)) {
            ++stats.skipped;
            continue;
        }

        model.grid.bg.evaluate(tr.BG, phi_bg);
        model.grid.ins.evaluate(tr.INS, phi_ins);
        auto& a = model.coeffs(tr.meal_id);
        double q = 0;
        for (int b = 0; b < B; ++b) {
            const double* row = a.data() + static_cast<std::size_t>(b) * B;
            for (int b2 = 0; b2 < B; ++b2) q += row[b2] * phi_bg[b] * phi_ins[b2];
        }
        const double delta = target - q;
        const double step = eta * delta;
        for (int b = 0; b < B; ++b) {
            double* row = a.data() + static_cast<std::size_t>(b) * B;
            const double w = step * phi_bg[b];
            for (int b2 = 0; b2 < B; ++b2) row[b2] += w * phi_ins[b2];
        }
        stats.sum_abs_td_error += std::abs(delta);
        ++stats.applied;
    }

    if (stats.skipped * 100 > count)
        throw training_error("more than 1% of batch targets were non-finite (" +
                             std::to_string(stats.skipped) + "/" +
                             std::to_string(count) + ")");
    return stats;
}

} // namespace detail

// Apply one TD pass over a batch at the configured base learning rate.
inline TdStats td_update(QModel& model, const QModel& frozen,
                         const std::vector<Transition>& batch,
                         const TrainConfig& config) {
    config.validate();
    const detail::ActionFeatureTable table(frozen.grid, config.action_grid_size);
    return detail::td_update_impl(model, frozen, batch, nullptr,
                                  config.learning_rate, config.gamma, table);
}

struct TrainCurvePoint {
    std::size_t update_index = 0;
    double mean_abs_td_error = 0;
};

struct TrainResult {
    QModel model;
    std::vector<TrainCurvePoint> curve; // one point per 1000 updates
};

inline std::string train_curve_to_csv(const std::vector<TrainCurvePoint>& curve) {
    std::string out = "update_index,mean_abs_td_error\n";
    for (const auto& p : curve)
        out += std::to_string(p.update_index) + "," +
               format_double(p.mean_abs_td_error) + "\n";
    return out;
}

namespace detail {

inline double mean_abs_alpha(const QModel& model) {
    double sum = 0;
    std::size_t count = 0;
    for (const auto& [_, a] : model.alpha) {
        for (double x : a) sum += std::abs(x);
        count += a.size();
    }
    return count ? sum / static_cast<double>(count) : 0.0;
}

} // namespace detail

// Offline training loop: a replay buffer is filled from the dataset by
// uniform sampling with replacement, then total_updates batches are drawn
// from it. The frozen target copy refreshes every freeze_period updates and
// the step size decays as learning_rate / sqrt(k).
inline TrainResult train(const std::vector<Transition>& dataset,
                         const TrainConfig& config) {
    config.validate();
    if (dataset.size() < config.batch_size)
        throw invalid_input_error("dataset smaller than one batch");

    std::set<int> id_set;
    for (const auto& t : dataset) {
        id_set.insert(t.meal_id);
        id_set.insert(t.next_meal_id);
    }
    const std::vector<int> ids(id_set.begin(), id_set.end());

    Rng rng(config.seed);
    std::vector<Transition> buffer;
    buffer.reserve(config.replay_capacity);
    for (std::size_t i = 0; i < config.replay_capacity; ++i)
        buffer.push_back(dataset[rng.below(dataset.size())]);

    TrainResult result;
    result.model = QModel::zeros(config.grid, ids);
    QModel frozen = result.model;
    const detail::ActionFeatureTable table(config.grid, config.action_grid_size);

    std::vector<std::size_t> batch(config.batch_size);
    double window_error = 0;
    std::size_t window_applied = 0;
    for (std::size_t k = 1; k <= config.total_updates; ++k) {
        for (auto& idx : batch) idx = rng.below(buffer.size());
        const double eta = config.learning_rate / std::sqrt(static_cast<double>(k));
        const TdStats stats = detail::td_update_impl(result.model, frozen, buffer,
                                                     &batch, eta, config.gamma, table);
        window_error += stats.sum_abs_td_error;
        window_applied += stats.applied;

        if (k % config.freeze_period == 0) frozen = result.model;

        if (k % 1000 == 0 || k == config.total_updates) {
            result.curve.push_back(
                {k, window_applied ? window_error / window_applied : 0.0});
            window_error = 0;
            window_applied = 0;
            const double scale = detail::mean_abs_alpha(result.model);
            if (scale > 1e6)
                throw divergence_error("mean |alpha| exceeded 1e6 at update " +
                                       std::to_string(k));
        }
    }
    return result;
}

} // namespace bolusrl
