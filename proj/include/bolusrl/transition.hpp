#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bolusrl/errors.hpp"
#include "bolusrl/text.hpp"

namespace bolusrl {

// One pre-meal observation: the unit of training data. States chain meal to
// meal, dinner linking to the following breakfast.
struct Transition {
    std::size_t t_index = 0; // raw-stream step index of the meal
    int meal_id = 0;
    double BG = 0;   // pre-meal reading, mg/dL
    double CHO = 0;  // g
    double INS = 0;  // units taken
    double reward = 0;
    int next_meal_id = 0;
    double next_BG = 0;
};

inline std::string transitions_to_csv(const std::vector<Transition>& ts) {
    std::string out = "t_index,ID_meal,BG,CHO,INS,reward,next_ID_meal,next_BG\n";
    for (const auto& t : ts) {
        out += std::to_string(t.t_index);
        out += ',';
        out += std::to_string(t.meal_id);
        out += ',';
        out += format_double(t.BG);
        out += ',';
        out += format_double(t.CHO);
        out += ',';
        out += format_double(t.INS);
        out += ',';
        out += format_double(t.reward);
        out += ',';
        out += std::to_string(t.next_meal_id);
        out += ',';
        out += format_double(t.next_BG);
        out += '\n';
    }
    return out;
}

inline std::vector<Transition> transitions_from_csv_lines(const std::vector<std::string>& lines) {
    if (lines.empty() || trim(lines[0]) != "t_index,ID_meal,BG,CHO,INS,reward,next_ID_meal,next_BG")
        throw parse_error("bad transitions CSV header", 1);
    std::vector<Transition> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const int lineno = static_cast<int>(i) + 1;
        if (trim(lines[i]).empty()) continue;
        const auto f = split(lines[i], ',');
        if (f.size() != 8) throw parse_error("expected 8 fields", lineno);
        Transition t;
        t.t_index = static_cast<std::size_t>(parse_long(f[0], lineno));
        t.meal_id = static_cast<int>(parse_long(f[1], lineno));
        t.BG = parse_double(f[2], lineno);
        t.CHO = parse_double(f[3], lineno);
        t.INS = parse_double(f[4], lineno);
        t.reward = parse_double(f[5], lineno);
        t.next_meal_id = static_cast<int>(parse_long(f[6], lineno));
        t.next_BG = parse_double(f[7], lineno);
        out.push_back(t);
    }
    return out;
}

inline std::vector<Transition> load_transitions_csv(const std::string& path) {
    return transitions_from_csv_lines(read_lines(path));
}

} // namespace bolusrl
