#pragma once

#include <string>
#include <vector>

#include "bolusrl/errors.hpp"
#include "bolusrl/text.hpp"

namespace bolusrl {

// One planned meal of the day. meal_id is the 0-based position in the plan.
struct MealEvent {
    int time_of_day = 0; // minutes since midnight
    double grams = 0;    // CHO grams
    int meal_id = 0;
};

// Deterministic daily meal plan, repeated every simulated day.
struct MealScenario {
    std::vector<MealEvent> events;

    void validate() const {
        if (events.empty()) throw invalid_input_error("meal scenario must be nonempty");
        int prev_time = -1;
        for (std::size_t i = 0; i < events.size(); ++i) {
            const auto& e = events[i];
            if (e.time_of_day < 0 || e.time_of_day >= 1440)
                throw invalid_input_error("meal time_of_day out of [0, 1440)");
            if (e.time_of_day <= prev_time)
                throw invalid_input_error("meal times must be strictly increasing");
            if (!(e.grams >= 0)) throw invalid_input_error("meal grams must be >= 0");
            if (e.meal_id != static_cast<int>(i))
                throw invalid_input_error("meal_ids must be 0,1,2,... in time order");
            prev_time = e.time_of_day;
        }
    }

    double cho_for(int meal_id) const {
        for (const auto& e : events)
            if (e.meal_id == meal_id) return e.grams;
        throw lookup_error("unknown meal_id " + std::to_string(meal_id));
    }

    int meals_per_day() const { return static_cast<int>(events.size()); }
};

// 6:00 50 g breakfast, 12:00 60 g lunch, 15:00 15 g snack, 20:00 80 g dinner.
inline MealScenario default_scenario() {
    MealScenario s;
    s.events = {{360, 50.0, 0}, {720, 60.0, 1}, {900, 15.0, 2}, {1200, 80.0, 3}};
    s.validate();
    return s;
}

// Parse "360:50, 720:60, 900:15, 1200:80" (time_min:grams). Ids follow order.
inline MealScenario parse_scenario(const std::string& text, int line = 1) {
    MealScenario s;
    int id = 0;
    for (const auto& part : split(text, ',')) {
        const auto fields = split(trim(part), ':');
        if (fields.size() != 2) throw parse_error("expected time:grams in meal list", line);
        MealEvent e;
        e.time_of_day = static_cast<int>(parse_long(fields[0], line));
        e.grams = parse_double(fields[1], line);
        e.meal_id = id++;
        s.events.push_back(e);
    }
    s.validate();
    return s;
}

inline std::string scenario_to_string(const MealScenario& s) {
    std::string out;
    for (const auto& e : s.events) {
        if (!out.empty()) out += ",";
        out += std::to_string(e.time_of_day) + ":" + format_double(e.grams);
    }
    return out;
}

} // namespace bolusrl
