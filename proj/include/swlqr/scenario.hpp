#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swlqr/core.hpp"
#include "swlqr/engine.hpp"
#include "swlqr/noise.hpp"

namespace swlqr {

enum class SweepAxis { A, Rate, Sigma };

std::string to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view name);

struct SweepSpec {
    SweepAxis axis = SweepAxis::A;
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;

    // start, start + step, … up to stop inclusive (within half a step of roundoff).
    std::vector<double> values() const;
    bool operator==(const SweepSpec&) const = default;
};

// "start:stop:step"; throws ValidationError(InvalidScenario).
SweepSpec parse_grid(SweepAxis axis, std::string_view text);

struct DpSettings {
    std::string method = "recursion";  // recursion | bellman
    int grid_points = 513;
    bool operator==(const DpSettings&) const = default;
};

struct CalibrationSettings {
    double tol = 0.01;
    double pilot_steps = 1e4;
    std::uint64_t seed = 0x63616c6962ULL;
    bool operator==(const CalibrationSettings&) const = default;
};

// Finite law for oracle-check.
struct OracleSettings {
    std::vector<double> values{-1.0, 1.0};
    std::vector<double> probs{0.5, 0.5};
    double max_policies = 5e6;
    bool operator==(const OracleSettings&) const = default;
};

struct Scenario {
    SystemParams params;
    std::vector<NoiseKind> noises{NoiseKind::Gaussian};  // the first one drives single-noise commands
    std::string switching = "all";   // all | bernoulli | periodic | threshold_table | threshold_const | state_based
    std::string controller = "all";  // all | optimal | zoh | impulsive | state_based
    std::vector<std::string> policies;  // label filter on the policy matrix; empty keeps all
    int runs = 100;
    std::uint64_t seed = 1;
    int steady_window = 20;
    int threads = 0;
    int filter_grid = 257;
    std::optional<SweepSpec> sweep;
    DpSettings dp;
    CalibrationSettings calibration;
    DivergenceCriteria divergence;
    OracleSettings oracle;

    bool operator==(const Scenario&) const = default;
};

// Unknown keys and bad values throw ValidationError(InvalidScenario); absent keys keep defaults.
Scenario parse_scenario(std::string_view json);
std::string serialize_scenario(const Scenario& s);
Scenario load_scenario(const std::string& path);

// Checks what the parser cannot: parameter ranges, pairing of switching and controller.
void validate_scenario(const Scenario& s);

}  // namespace swlqr
