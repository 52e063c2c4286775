#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bolusrl {

// Base class for everything thrown by this library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad argument or non-finite input to a pure function.
class invalid_input_error : public error {
public:
    explicit invalid_input_error(const std::string& msg) : error(msg) {}
};

// Simulator state contains non-finite fields.
class invalid_state_error : public error {
public:
    explicit invalid_state_error(const std::string& msg) : error(msg) {}
};

// A policy returned a negative or non-finite dose.
class policy_output_error : public error {
public:
    explicit policy_output_error(const std::string& msg) : error(msg) {}
};

// Trajectory does not line up with the scenario it was allegedly produced under.
class alignment_error : public error {
public:
    explicit alignment_error(const std::string& msg) : error(msg) {}
};

// File could not be parsed; carries a 1-based line number.
class parse_error : public error {
public:
    parse_error(const std::string& msg, int line)
        : error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// Lookup of an unknown key (e.g. meal_id not present in a model).
class lookup_error : public error {
public:
    explicit lookup_error(const std::string& msg) : error(msg) {}
};

// Training failures: too many skipped targets or runaway coefficients.
class training_error : public error {
public:
    explicit training_error(const std::string& msg) : error(msg) {}
};

class divergence_error : public training_error {
public:
    explicit divergence_error(const std::string& msg) : training_error(msg) {}
};

// Configuration validation failure listing every offending key.
class config_error : public error {
public:
    explicit config_error(std::vector<std::string> violations)
        : error(join(violations)), violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "invalid configuration:";
        for (const auto& s : v) out += "\n  " + s;
        return out;
    }
    std::vector<std::string> violations_;
};

} // namespace bolusrl
