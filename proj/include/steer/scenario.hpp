// Run configuration: parsing, validation and derived sub-scenarios

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "steer/bath.hpp"
#include "steer/control.hpp"
#include "steer/dynamics.hpp"
#include "steer/integrator.hpp"
#include "steer/state.hpp"

namespace steer {

enum class RunMode { simulate, sweep, compare, berry };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& name);

struct PathSpec {
    std::string kind = "rotating_cone";
    // rotating_cone
    double amplitude = 1.0;
    double polar_angle = kPi / 3.0;
    double angular_frequency = 0.02;
    double cycles = 1.0;
    // linear_sweep
    double slope = 0.1;
    double gap = 1.0;
    double duration = 100.0;
    // sampled
    std::vector<double> times;
    std::vector<Vec3> fields;

    // Cone period 2 pi / |omega|, sweep or sample duration otherwise.
    double period() const;
    // Same shape traversed with a different period.
    PathSpec with_period(double period) const;
};

struct Scenario {
    RunMode mode = RunMode::simulate;
    PathSpec path;
    Mat2 coupling = pauli::sigma_x();
    SpectralDensity bath;
    DensityState initial;
    SolverConfig solver;
    SimulationOptions options;
    std::vector<double> sweep_periods;
    std::vector<Equation> compare_equations{Equation::full, Equation::secular, Equation::nonsteered};
    std::vector<double> berry_polar_angles;
    std::size_t berry_samples = 4096;

    // Fully defaulted configuration with sampled data inlined; the basis of hash().
    nlohmann::json canonical;

    ControlPath build_path() const;
    // Solver settings with t0 = 0 and t1 = path duration.
    SolverConfig solver_for_path() const;
    // 16 hex digits of FNV-1a over the canonical dump.
    std::string hash() const;
    // Sweep mode: one simulate scenario per period. Other modes: a copy of this one.
    std::vector<Scenario> expand() const;
};

// Throws ParseError for malformed text and ValidationError listing every invalid field.
// Relative CSV paths are resolved against `base_dir`.
// A `mode` argument replaces whatever the text says.
Scenario load_scenario(const std::string& text, const std::filesystem::path& base_dir = ".",
                       std::optional<RunMode> mode = std::nullopt);
Scenario load_scenario_file(const std::filesystem::path& file, std::optional<RunMode> mode = std::nullopt);

} // namespace steer
