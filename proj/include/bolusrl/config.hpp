#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bolusrl/advisor.hpp"
#include "bolusrl/errors.hpp"
#include "bolusrl/patient.hpp"
#include "bolusrl/scenario.hpp"
#include "bolusrl/simulator.hpp"
#include "bolusrl/summarize.hpp"
#include "bolusrl/text.hpp"
#include "bolusrl/trainer.hpp"

namespace bolusrl {

// Flat `section.key = value` text, '#' comments, no ordering requirements.
class KeyValueFile {
public:
    static KeyValueFile parse_lines(const std::vector<std::string>& lines) {
        KeyValueFile kv;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            const int lineno = static_cast<int>(i) + 1;
            std::string s = lines[i];
            const auto hash = s.find('#');
            if (hash != std::string::npos) s = s.substr(0, hash);
            s = trim(s);
            if (s.empty()) continue;
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw parse_error("expected key = value", lineno);
            const std::string key = trim(s.substr(0, eq));
            if (key.empty()) throw parse_error("empty key", lineno);
            kv.entries_[key] = {trim(s.substr(eq + 1)), lineno};
        }
        return kv;
    }

    static KeyValueFile load(const std::string& path) {
        return parse_lines(read_lines(path));
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    std::optional<std::string> get(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        return it->second.value;
    }

    void set(const std::string& key, const std::string& value) {
        entries_[key] = {value, 0};
    }

    const std::map<std::string, std::pair<std::string, int>>& raw() const {
        return entries_;
    }

private:
    std::map<std::string, std::pair<std::string, int>> entries_;
};

// Everything one experiment needs: patient, meal plan, calibration grid,
// training setup, reward options and explicit seeds.
struct ExperimentConfig {
    std::string patient_file;
    int patient_id = 1;
    MealScenario scenario;
    std::string out_dir;

    CalibrationGrid calibration = CalibrationGrid::defaults();
    int explore_days = 365;
    int eval_days = 45;

    TrainConfig train; // seed filled from seeds.train
    RewardOptions reward;
    SimOptions sim;

    std::uint64_t seed_calibrate = 0;
    std::uint64_t seed_explore = 0;
    std::uint64_t seed_train = 0;
    std::uint64_t seed_eval = 0;

    std::optional<std::string> train_dataset; // standalone `train` input
    std::string eval_policy = "baseline";     // `evaluate`: baseline | model
    std::optional<std::string> eval_model;

    VirtualPatient load_patient() const {
        return find_patient(load_patients(patient_file), patient_id);
    }
};

namespace detail {

class ConfigReader {
public:
    ConfigReader(const KeyValueFile& kv, std::vector<std::string>& violations)
        : kv_(kv), violations_(violations) {}

    double number(const std::string& key, double fallback) {
        seen_.insert(key);
        const auto v = kv_.get(key);
        if (!v) return fallback;
        try {
            return parse_double(*v, 0);
        } catch (const error&) {
            violations_.push_back(key + ": not a number ('" + *v + "')");
            return fallback;
        }
    }

    long integer(const std::string& key, long fallback) {
        seen_.insert(key);
        const auto v = kv_.get(key);
        if (!v) return fallback;
        try {
            return parse_long(*v, 0);
        } catch (const error&) {
            violations_.push_back(key + ": not an integer ('" + *v + "')");
            return fallback;
        }
    }

    std::string text(const std::string& key, const std::string& fallback) {
        seen_.insert(key);
        const auto v = kv_.get(key);
        return v ? *v : fallback;
    }

    std::optional<std::string> optional_text(const std::string& key) {
        seen_.insert(key);
        return kv_.get(key);
    }

    std::string required_text(const std::string& key) {
        seen_.insert(key);
        const auto v = kv_.get(key);
        if (!v || v->empty()) {
            violations_.push_back(key + ": required key is missing");
            return "";
        }
        return *v;
    }

    long required_integer(const std::string& key) {
        seen_.insert(key);
        const auto v = kv_.get(key);
        if (!v) {
            violations_.push_back(key + ": required key is missing");
            return 0;
        }
        try {
            return parse_long(*v, 0);
        } catch (const error&) {
            violations_.push_back(key + ": not an integer ('" + *v + "')");
            return 0;
        }
    }

    void check(bool ok, const std::string& key, const std::string& message) {
        if (!ok) violations_.push_back(key + ": " + message);
    }

    void reject_unknown_keys() {
        for (const auto& [key, _] : kv_.raw())
            if (!seen_.count(key)) violations_.push_back(key + ": unknown key");
    }

private:
    const KeyValueFile& kv_;
    std::vector<std::string>& violations_;
    std::set<std::string> seen_;
};

} // namespace detail

struct ConfigLoadResult {
    ExperimentConfig config;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// Read and validate a full experiment configuration. Every violation is
// collected (not just the first) so the CLI can report them all at once.
inline ConfigLoadResult read_experiment_config(const KeyValueFile& kv) {
    ConfigLoadResult result;
    auto& v = result.violations;
    detail::ConfigReader r(kv, v);
    ExperimentConfig& c = result.config;

    c.patient_file = r.required_text("patient.file");
    if (!c.patient_file.empty()) {
        if (!std::filesystem::exists(c.patient_file)) {
            v.push_back("patient.file: file does not exist: " + c.patient_file);
        } else {
            try {
                load_patients(c.patient_file);
            } catch (const error& e) {
                v.push_back(std::string("patient.file: ") + e.what());
            }
        }
    }
    c.patient_id = static_cast<int>(r.required_integer("patient.id"));
    if (!c.patient_file.empty() && std::filesystem::exists(c.patient_file)) {
        try {
            find_patient(load_patients(c.patient_file), c.patient_id);
        } catch (const error&) {
            v.push_back("patient.id: no such patient in " + c.patient_file);
        }
    }

    const std::string meals = r.required_text("scenario.meals");
    if (!meals.empty()) {
        try {
            c.scenario = parse_scenario(meals);
        } catch (const error& e) {
            v.push_back(std::string("scenario.meals: ") + e.what());
        }
    }

    c.out_dir = r.required_text("out.dir");

    const double cir_lo = r.number("calibration.cir_lo", 3.0);
    const double cir_hi = r.number("calibration.cir_hi", 30.0);
    const long cir_n = r.integer("calibration.cir_count", 10);
    const double cf_lo = r.number("calibration.cf_lo", 0.4);
    const double cf_hi = r.number("calibration.cf_hi", 2.8);
    const long cf_n = r.integer("calibration.cf_count", 10);
    const double tg_lo = r.number("calibration.target_lo", 100.0);
    const double tg_hi = r.number("calibration.target_hi", 150.0);
    const long tg_n = r.integer("calibration.target_count", 6);
    r.check(cir_lo > 0 && cir_hi >= cir_lo, "calibration.cir_lo", "need 0 < lo <= hi");
    r.check(cf_lo > 0 && cf_hi >= cf_lo, "calibration.cf_lo", "need 0 < lo <= hi");
    r.check(tg_lo > 40 && tg_hi >= tg_lo && tg_hi < 300, "calibration.target_lo",
            "need 40 < lo <= hi < 300");
    r.check(cir_n >= 1 && cf_n >= 1 && tg_n >= 1, "calibration.cir_count",
            "grid counts must be >= 1");
    if (v.empty()) {
        c.calibration.CIR_values = CalibrationGrid::linspace(cir_lo, cir_hi, static_cast<int>(cir_n));
        c.calibration.CF_values = CalibrationGrid::linspace(cf_lo, cf_hi, static_cast<int>(cf_n));
        c.calibration.target_values = CalibrationGrid::linspace(tg_lo, tg_hi, static_cast<int>(tg_n));
    }
    c.calibration.eval_days = static_cast<int>(r.integer("calibration.eval_days", 14));
    r.check(c.calibration.eval_days >= 1, "calibration.eval_days", "must be >= 1");

    c.explore_days = static_cast<int>(r.integer("explore.days", 365));
    r.check(c.explore_days >= 1, "explore.days", "must be >= 1");
    c.eval_days = static_cast<int>(r.integer("eval.days", 45));
    r.check(c.eval_days >= 1, "eval.days", "must be >= 1");

    const long B = r.integer("features.basis_count", 8);
    const double p = r.number("features.overlap", 0.2);
    const double bg_lo = r.number("features.bg_lo", 40.0);
    const double bg_hi = r.number("features.bg_hi", 600.0);
    const double ins_max = r.number("features.ins_max", 30.0);
    r.check(B >= 2, "features.basis_count", "must be >= 2");
    r.check(p > 0 && p < 1, "features.overlap", "must be in (0, 1)");
    r.check(bg_hi > bg_lo, "features.bg_lo", "need bg_lo < bg_hi");
    r.check(ins_max > 0, "features.ins_max", "must be > 0");
    if (v.empty())
        c.train.grid = FeatureGrid(static_cast<int>(B), p, bg_lo, bg_hi, ins_max);

    c.train.gamma = r.number("train.gamma", 0.9);
    c.train.learning_rate = r.number("train.learning_rate", 0.01);
    c.train.replay_capacity = static_cast<std::size_t>(r.integer("train.replay_capacity", 50000));
    c.train.batch_size = static_cast<std::size_t>(r.integer("train.batch_size", 64));
    c.train.freeze_period = static_cast<std::size_t>(r.integer("train.freeze_period", 500));
    c.train.total_updates = static_cast<std::size_t>(r.integer("train.total_updates", 200000));
    c.train.action_grid_size = static_cast<int>(r.integer("train.action_grid_size", 121));
    for (const auto& msg : c.train.violations()) v.push_back("train: " + msg);

    c.reward.params.scale = r.number("reward.scale", 1.0);
    r.check(c.reward.params.scale > 0, "reward.scale", "must be > 0");
    const std::string aggregate = r.text("reward.aggregate", "next");
    if (aggregate == "next") {
        c.reward.aggregate = RewardAggregate::kNextPreMeal;
    } else if (aggregate == "interval") {
        c.reward.aggregate = RewardAggregate::kIntervalMean;
    } else {
        v.push_back("reward.aggregate: must be 'next' or 'interval'");
    }

    c.sim.meter_noise_sigma = r.number("sim.meter_noise", 0.0);
    r.check(c.sim.meter_noise_sigma >= 0, "sim.meter_noise", "must be >= 0");

    c.seed_calibrate = static_cast<std::uint64_t>(r.required_integer("seed.calibrate"));
    c.seed_explore = static_cast<std::uint64_t>(r.required_integer("seed.explore"));
    c.seed_train = static_cast<std::uint64_t>(r.required_integer("seed.train"));
    c.seed_eval = static_cast<std::uint64_t>(r.required_integer("seed.eval"));
    c.train.seed = c.seed_train;

    c.train_dataset = r.optional_text("train.dataset");
    if (c.train_dataset && !std::filesystem::exists(*c.train_dataset))
        v.push_back("train.dataset: file does not exist: " + *c.train_dataset);

    c.eval_policy = r.text("eval.policy", "baseline");
    if (c.eval_policy != "baseline" && c.eval_policy != "model")
        v.push_back("eval.policy: must be 'baseline' or 'model'");
    c.eval_model = r.optional_text("eval.model");
    if (c.eval_policy == "model" && !c.eval_model)
        v.push_back("eval.model: required when eval.policy = model");
    if (c.eval_model && !std::filesystem::exists(*c.eval_model))
        v.push_back("eval.model: file does not exist: " + *c.eval_model);

    r.reject_unknown_keys();
    return result;
}

inline ConfigLoadResult load_experiment_config(const std::string& path) {
    return read_experiment_config(KeyValueFile::load(path));
}

} // namespace bolusrl
