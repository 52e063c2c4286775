#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "bolusrl/errors.hpp"
#include "bolusrl/text.hpp"

namespace bolusrl {

// Physiological parameters of one simulated adult, plus the clinical
// reference values (CIR, CF, basal) that come with the physiology.
//
// Fasting equilibrium: with no meals and basal_rate = 0 the state
// (G=Gb, X=0, I=Ib, S1=S2=Q1=Q2=0) is an exact fixed point of the dynamics;
// plasma insulin relaxes to Ib on its own, i.e. the background delivery that
// offsets clearance at Ib is folded into the relaxation term. basal_rate is
// additional pump basal on top of that and shifts the equilibrium if nonzero.
struct VirtualPatient {
    int id = 0;
    double Gb = 0;         // fasting basal glucose, mg/dL
    double Ib = 0;         // basal plasma insulin, mU/L
    double p1 = 0;         // glucose effectiveness, 1/min
    double p2 = 0;         // insulin-action decay, 1/min
    double p3 = 0;         // insulin-action gain, per (mU/L) per min^2
    double tau_I = 0;      // subcutaneous insulin absorption time constant, min
    double V_I = 0;        // insulin distribution volume, L
    double n = 0;          // plasma insulin clearance, 1/min
    double tau_m = 0;      // meal absorption time constant, min
    double f_bio = 0;      // carbohydrate bioavailability, (0,1]
    double V_g = 0;        // glucose distribution volume, dL
    double ref_CIR = 0;    // reference carbohydrate-to-insulin ratio, g/U
    double ref_CF = 0;     // reference correction factor, mg/dL per U
    double basal_rate = 0; // constant pump basal, U/h

    std::vector<std::string> violations() const {
        std::vector<std::string> v;
        auto positive = [&](double x, const char* name) {
            if (!(x > 0) || !std::isfinite(x))
                v.push_back(std::string(name) + " must be strictly positive");
        };
        positive(p1, "p1");
        positive(p2, "p2");
        positive(p3, "p3");
        positive(tau_I, "tau_I");
        positive(V_I, "V_I");
        positive(n, "n");
        positive(tau_m, "tau_m");
        positive(V_g, "V_g");
        positive(Ib, "Ib");
        positive(ref_CIR, "ref_CIR");
        positive(ref_CF, "ref_CF");
        if (!(f_bio > 0 && f_bio <= 1)) v.push_back("f_bio must be in (0, 1]");
        if (!(Gb > 40 && Gb < 180)) v.push_back("Gb must be in (40, 180)");
        if (!(basal_rate >= 0) || !std::isfinite(basal_rate))
            v.push_back("basal_rate must be >= 0");
        return v;
    }

    void validate() const {
        auto v = violations();
        if (!v.empty()) throw config_error(std::move(v));
    }

    // Pump basal in mU/min.
    double basal_mU_per_min() const { return basal_rate * 1000.0 / 60.0; }
};

namespace detail {

inline void assign_patient_field(VirtualPatient& p, const std::string& key,
                                 const std::string& value, int line) {
    if (key == "id") { p.id = static_cast<int>(parse_long(value, line)); return; }
    static const std::map<std::string, double VirtualPatient::*> fields = {
        {"Gb", &VirtualPatient::Gb},       {"Ib", &VirtualPatient::Ib},
        {"p1", &VirtualPatient::p1},       {"p2", &VirtualPatient::p2},
        {"p3", &VirtualPatient::p3},       {"tau_I", &VirtualPatient::tau_I},
        {"V_I", &VirtualPatient::V_I},     {"n", &VirtualPatient::n},
        {"tau_m", &VirtualPatient::tau_m}, {"f_bio", &VirtualPatient::f_bio},
        {"V_g", &VirtualPatient::V_g},     {"ref_CIR", &VirtualPatient::ref_CIR},
        {"ref_CF", &VirtualPatient::ref_CF},
        {"basal_rate", &VirtualPatient::basal_rate}};
    auto it = fields.find(key);
    if (it == fields.end()) throw parse_error("unknown patient key '" + key + "'", line);
    p.*(it->second) = parse_double(value, line);
}

} // namespace detail

// Presets file: one [section] per adult, key = value pairs, '#' comments.
inline std::vector<VirtualPatient> load_patients(const std::string& path) {
    std::vector<VirtualPatient> out;
    bool in_section = false;
    VirtualPatient cur;
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const int lineno = static_cast<int>(i) + 1;
        std::string s = trim(lines[i]);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw parse_error("unterminated section header", lineno);
            if (in_section) out.push_back(cur);
            cur = VirtualPatient{};
            in_section = true;
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw parse_error("expected key = value", lineno);
        if (!in_section) throw parse_error("key outside of a patient section", lineno);
        detail::assign_patient_field(cur, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), lineno);
    }
    if (in_section) out.push_back(cur);
    if (out.empty()) throw parse_error("no patient sections found in " + path, 1);
    for (const auto& p : out) p.validate();
    return out;
}

inline VirtualPatient find_patient(const std::vector<VirtualPatient>& all, int id) {
    for (const auto& p : all)
        if (p.id == id) return p;
    throw lookup_error("no patient with id " + std::to_string(id));
}

} // namespace bolusrl
