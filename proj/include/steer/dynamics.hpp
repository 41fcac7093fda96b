// Master-equation right-hand sides and trajectory integration

#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "steer/bath.hpp"
#include "steer/control.hpp"
#include "steer/integrator.hpp"
#include "steer/state.hpp"

namespace steer {

// Born-Markov equation of a non-steered two-level system in its eigenbasis, all nonsecular
// terms kept.
Derivative rhs_nonsteered(const DensityState& s, const RateSet& r, double omega01);

// Secular (rotating-wave) reduction: only Gamma_ge, Gamma_eg and the coherence decay survive.
Derivative rhs_secular(const DensityState& s, const RateSet& r, double omega01);

// Secular dissipator plus the bare steering terms of `frame` (no drive-dissipation cross terms).
Derivative rhs_secular(const DensityState& s, const RateSet& r, const AdiabaticFrame& frame);

// Master equation of an adiabatically steered system to linear order in alpha, written in the
// adiabatic basis selected by `frame`. With w = 0 it reduces to rhs_nonsteered.
Derivative rhs_full(const DensityState& s, const AdiabaticFrame& frame, const SpectralSamples& sp);
Derivative rhs_full(const DensityState& s, const AdiabaticFrame& frame, const SpectralDensity& sd);

// Non-steered equation evaluated in the first superadiabatic basis: gap omega01 + w_ee - w_gg
// and rates from the superadiabatic coupling elements. `s2` and the result live in that basis.
Derivative rhs_superadiabatic_oracle(const DensityState& s2, const AdiabaticFrame& frame,
                                     const SpectralSamples& sp);

// The oracle transported back to the adiabatic basis: rho -> rho2, evaluate, then solve the
// linear-order basis map for d rho / dt. Agrees with rhs_full up to O(alpha^2).
Derivative superadiabatic_pullback(const DensityState& s, const AdiabaticFrame& frame,
                                   const SpectralSamples& sp);

using FrameProvider = std::function<AdiabaticFrame(double)>;

// `frame` is what the equation sees (phase-shifted when the optimal phase is active),
// `raw` is the frame in the path's own gauge.
using DensityRhs = std::function<Derivative(const DensityState& s, const AdiabaticFrame& frame,
                                            const AdiabaticFrame& raw)>;

struct TrajectorySample {
    double t = 0.0;
    DensityState state;
    AdiabaticFrame frame;
    double lambda_g = 0.0;
    double lambda_e = 0.0;
    double purity = 1.0;
};

using SampleSink = std::function<void(const TrajectorySample&)>;

struct IntegrateOptions {
    bool optimal_phase = false;
    double lambda_g0 = 0.0;
    double lambda_e0 = 0.0;
    double positivity_tolerance = 1e-6;
    SampleSink on_sample; // called per recorded sample while integrating
};

struct TrajectoryDiagnostics {
    double max_purity_excess = 0.0; // max(purity - 1, 0) over recorded samples
    double min_rho_gg = 1.0;
    double max_rho_gg = 0.0;
    double max_excited_population = 0.0;
    double max_alpha = 0.0;
    std::size_t positivity_warnings = 0;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    std::vector<std::string> warnings;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    TrajectoryDiagnostics diagnostics;
};

// Integrates (rho_gg, rho_ge) together with the phases lambda_g, lambda_e (d lambda/dt = -w)
// along the path. Positivity is monitored against `positivity_tolerance`, never enforced.
Trajectory integrate(const DensityRhs& rhs, const DensityState& initial, const SolverConfig& cfg,
                     const FrameProvider& frames, const IntegrateOptions& options = {});

enum class Equation { full, secular, nonsteered, superadiabatic };

std::string to_string(Equation e);
Equation equation_from_string(const std::string& name);

struct SimulationOptions {
    Equation equation = Equation::full;
    bool optimal_phase = false;
    bool spectral_shift = false; // move S(+-omega01) by the raw phase velocity w_ee - w_gg
    FrameOptions frame;
    double lambda_g0 = 0.0;
    double lambda_e0 = 0.0;
    double positivity_tolerance = 1e-6;
    SampleSink on_sample;
};

DensityRhs make_rhs(const SpectralDensity& sd, const SimulationOptions& options);

Trajectory simulate(const ControlPath& path, const SpectralDensity& sd,
                    const DensityState& initial, const SolverConfig& cfg,
                    const SimulationOptions& options = {});

// Columns t, rho_gg, re_rho_ge, im_rho_ge, purity, alpha, omega01, lambda_g, lambda_e.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
void write_trajectory_header(std::ostream& out);
void write_trajectory_row(std::ostream& out, const TrajectorySample& sample);

} // namespace steer
