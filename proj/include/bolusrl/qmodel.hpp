#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "bolusrl/errors.hpp"
#include "bolusrl/rbf.hpp"
#include "bolusrl/text.hpp"

namespace bolusrl {

// Linear state-action value model: one B x B coefficient matrix per meal_id
// over the tensor RBF grid. Coefficients are stored row-major, matching
// features().
struct QModel {
    FeatureGrid grid;
    std::map<int, std::vector<double>> alpha;

    static QModel zeros(const FeatureGrid& grid, const std::vector<int>& meal_ids) {
        QModel m;
        m.grid = grid;
        for (int id : meal_ids)
            m.alpha[id] = std::vector<double>(grid.feature_count(), 0.0);
        return m;
    }

    const std::vector<double>& coeffs(int meal_id) const {
        auto it = alpha.find(meal_id);
        if (it == alpha.end())
            throw lookup_error("unknown meal_id " + std::to_string(meal_id));
        return it->second;
    }

    std::vector<double>& coeffs(int meal_id) {
        auto it = alpha.find(meal_id);
        if (it == alpha.end())
            throw lookup_error("unknown meal_id " + std::to_string(meal_id));
        return it->second;
    }

    std::vector<int> meal_ids() const {
        std::vector<int> ids;
        for (const auto& [id, _] : alpha) ids.push_back(id);
        return ids;
    }
};

inline double q_value(const QModel& model, int meal_id, double bg, double ins) {
    const auto& a = model.coeffs(meal_id);
    const auto phi = features(bg, ins, model.grid);
    double q = 0;
    for (std::size_t k = 0; k < phi.size(); ++k) q += a[k] * phi[k];
    return q;
}

namespace detail {

// phi^INS evaluated at every action-grid point, row j = grid dose j.
struct ActionFeatureTable {
    std::vector<double> doses;
    std::vector<std::vector<double>> phi; // [j][ins_basis]

    ActionFeatureTable() = default;
    ActionFeatureTable(const FeatureGrid& grid, int size) {
        doses = action_grid(grid, size);
        phi.resize(doses.size());
        for (std::size_t j = 0; j < doses.size(); ++j)
            grid.ins.evaluate(doses[j], phi[j]);
    }
};

// q over the action grid for fixed (meal_id, BG):
//   v_j = sum_b' u[b'] phi^INS_j[b'],  u[b'] = sum_b alpha[b][b'] phi^BG[b].
inline void action_values(const QModel& model, int meal_id, double bg,
                          const ActionFeatureTable& table, std::vector<double>& out) {
    const auto& a = model.coeffs(meal_id);
    const int B = model.grid.basis_count();
    std::vector<double> phi_bg;
    model.grid.bg.evaluate(bg, phi_bg);

    std::vector<double> u(B, 0.0);
    for (int b = 0; b < B; ++b) {
        const double w = phi_bg[b];
        const double* row = a.data() + static_cast<std::size_t>(b) * B;
        for (int b2 = 0; b2 < B; ++b2) u[b2] += w * row[b2];
    }

    out.resize(table.doses.size());
    for (std::size_t j = 0; j < table.doses.size(); ++j) {
        const auto& phi_ins = table.phi[j];
        double v = 0;
        for (int b2 = 0; b2 < B; ++b2) v += u[b2] * phi_ins[b2];
        out[j] = v;
    }
}

inline std::size_t argmax_lowest_dose(const std::vector<double>& values) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < values.size(); ++j)
        if (values[j] > values[best]) best = j; // ties keep the lower dose
    return best;
}

} // namespace detail

// Dose on the uniform action grid maximizing Q; ties resolve to the lowest
// dose (insulin overdose is the dangerous direction).
inline double greedy_action(const QModel& model, int meal_id, double bg,
                            int action_grid_size) {
    const detail::ActionFeatureTable table(model.grid, action_grid_size);
    std::vector<double> values;
    detail::action_values(model, meal_id, bg, table, values);
    return table.doses[detail::argmax_lowest_dose(values)];
}

inline double max_q_over_actions(const QModel& model, int meal_id, double bg,
                                 int action_grid_size) {
    const detail::ActionFeatureTable table(model.grid, action_grid_size);
    std::vector<double> values;
    detail::action_values(model, meal_id, bg, table, values);
    return values[detail::argmax_lowest_dose(values)];
}

// Model file: a header with the grid geometry and meal ids, then one
// `meal_id,b,b_prime,alpha` row per coefficient.
inline std::string model_to_string(const QModel& model) {
    if (model.alpha.empty())
        throw invalid_input_error("refusing to save a model with no meal_ids");
    std::string out;
    out += "qmodel v1\n";
    out += "B=" + std::to_string(model.grid.basis_count()) + "\n";
    out += "p=" + format_double(model.grid.bg.overlap) + "\n";
    out += "bg_lo=" + format_double(model.grid.bg.lo) + "\n";
    out += "bg_hi=" + format_double(model.grid.bg.hi) + "\n";
    out += "ins_lo=" + format_double(model.grid.ins.lo) + "\n";
    out += "ins_hi=" + format_double(model.grid.ins.hi) + "\n";
    std::string ids;
    for (int id : model.meal_ids()) {
        if (!ids.empty()) ids += ",";
        ids += std::to_string(id);
    }
    out += "meal_ids=" + ids + "\n";
    out += "meal_id,b,b_prime,alpha\n";
    const int B = model.grid.basis_count();
    for (const auto& [id, a] : model.alpha) {
        for (int b = 0; b < B; ++b)
            for (int b2 = 0; b2 < B; ++b2)
                out += std::to_string(id) + "," + std::to_string(b) + "," +
                       std::to_string(b2) + "," +
                       format_double(a[static_cast<std::size_t>(b) * B + b2]) + "\n";
    }
    return out;
}

inline void save_model(const QModel& model, const std::string& path) {
    write_file(path, model_to_string(model));
}

inline QModel model_from_lines(const std::vector<std::string>& lines) {
    std::size_t i = 0;
    auto next_line = [&]() -> const std::string& {
        if (i >= lines.size()) throw parse_error("unexpected end of model file",
                                                 static_cast<int>(lines.size()));
        return lines[i++];
    };
    auto expect_kv = [&](const std::string& key) {
        const int lineno = static_cast<int>(i) + 1;
        const auto& line = next_line();
        const auto eq = line.find('=');
        if (eq == std::string::npos || trim(line.substr(0, eq)) != key)
            throw parse_error("expected '" + key + "=...'", lineno);
        return trim(line.substr(eq + 1));
    };

    if (trim(next_line()) != "qmodel v1") throw parse_error("bad model header", 1);
    const int B = static_cast<int>(parse_long(expect_kv("B"), 2));
    const double p = parse_double(expect_kv("p"), 3);
    const double bg_lo = parse_double(expect_kv("bg_lo"), 4);
    const double bg_hi = parse_double(expect_kv("bg_hi"), 5);
    const double ins_lo = parse_double(expect_kv("ins_lo"), 6);
    const double ins_hi = parse_double(expect_kv("ins_hi"), 7);
    if (ins_lo != 0.0) throw parse_error("ins_lo must be 0", 6);
    const std::string ids_text = expect_kv("meal_ids");
    if (trim(next_line()) != "meal_id,b,b_prime,alpha")
        throw parse_error("missing coefficient header row", static_cast<int>(i));

    QModel model;
    model.grid = FeatureGrid(B, p, bg_lo, bg_hi, ins_hi);
    std::vector<int> ids;
    for (const auto& s : split(ids_text, ','))
        ids.push_back(static_cast<int>(parse_long(s, 8)));
    if (ids.empty()) throw parse_error("empty meal_ids", 8);
    model = QModel::zeros(model.grid, ids);

    std::size_t rows = 0;
    const std::size_t expected = ids.size() * model.grid.feature_count();
    for (; i < lines.size(); ++i) {
        const int lineno = static_cast<int>(i) + 1;
        if (trim(lines[i]).empty()) continue;
        const auto f = split(lines[i], ',');
        if (f.size() != 4) throw parse_error("expected 4 fields", lineno);
        const int id = static_cast<int>(parse_long(f[0], lineno));
        const int b = static_cast<int>(parse_long(f[1], lineno));
        const int b2 = static_cast<int>(parse_long(f[2], lineno));
        if (b < 0 || b >= B || b2 < 0 || b2 >= B)
            throw parse_error("basis index out of range", lineno);
        model.coeffs(id)[static_cast<std::size_t>(b) * B + b2] =
            parse_double(f[3], lineno);
        ++rows;
    }
    if (rows != expected)
        throw parse_error("expected " + std::to_string(expected) +
                              " coefficient rows, found " + std::to_string(rows),
                          static_cast<int>(lines.size()));
    return model;
}

inline QModel load_model(const std::string& path) {
    return model_from_lines(read_lines(path));
}

} // namespace bolusrl
