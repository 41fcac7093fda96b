#include "steer/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "steer/errors.hpp"
#include "steer/frames.hpp"
#include "steer/gauge.hpp"

namespace steer {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_gap(double omega01, const char* what) {
    if (!(omega01 > kGapFloor)) {
        throw GapCollapse(std::string(what) + ": omega01 below the gap floor");
    }
}

void require_adiabatic(const AdiabaticFrame& f, const char* what) {
    require_gap(f.omega01, what);
    if (!(f.alpha < 1.0)) {
        throw AdiabaticityViolation(std::string(what) + ": alpha = " + std::to_string(f.alpha) +
                                    " >= 1 at t = " + std::to_string(f.t));
    }
}

} // namespace

Derivative rhs_nonsteered(const DensityState& s, const RateSet& r, double omega01) {
    Derivative d;
    d.d_rho_gg = -(r.gamma_ge + r.gamma_eg) * s.rho_gg + (r.gamma_tilde0 * s.rho_ge).real() +
                 r.gamma_eg;
    d.d_rho_ge = kI * omega01 * s.rho_ge - (r.gamma_tilde_plus + r.gamma_tilde_minus) * s.rho_gg -
                 (0.5 * r.gamma_eg + 0.5 * r.gamma_ge + r.gamma_phi) * s.rho_ge +
                 (r.gamma_alpha + r.gamma_beta) * s.rho_eg() + r.gamma_tilde_plus;
    return d;
}

Derivative rhs_secular(const DensityState& s, const RateSet& r, double omega01) {
    Derivative d;
    d.d_rho_gg = -(r.gamma_ge + r.gamma_eg) * s.rho_gg + r.gamma_eg;
    d.d_rho_ge = kI * omega01 * s.rho_ge -
                 (0.5 * r.gamma_eg + 0.5 * r.gamma_ge + r.gamma_phi) * s.rho_ge;
    return d;
}

Derivative rhs_secular(const DensityState& s, const RateSet& r, const AdiabaticFrame& frame) {
    Derivative d = rhs_secular(s, r, frame.omega01);
    const WElements& w = frame.w;
    d.d_rho_gg += -2.0 * (std::conj(w.ge) * s.rho_ge).imag();
    d.d_rho_ge += kI * w.ge * (2.0 * s.rho_gg - 1.0) + kI * (w.ee - w.gg) * s.rho_ge;
    return d;
}

Derivative rhs_full(const DensityState& s, const AdiabaticFrame& frame, const SpectralSamples& sp) {
    require_adiabatic(frame, "rhs_full");

    const double om = frame.omega01;
    const double m1 = frame.m1;
    const cplx m2 = frame.m2;
    const cplx w = frame.w.ge;
    const cplx rho = s.rho_ge;
    const double rgg = s.rho_gg;

    const double s0 = sp.zero;
    const double sp_ = sp.positive;
    const double sm = sp.negative;
    const double ssum = sm + sp_;
    const double m2sq = std::norm(m2);

    // Recurring real combinations.
    const double m2w = m2.imag() * w.imag() + m2.real() * w.real();         // Re(conj(m2) w)
    const double m2rho = m2.imag() * rho.imag() + m2.real() * rho.real();   // Re(conj(m2) rho)
    const double dd = (2.0 * s0 - sm - sp_) / om;
    const double d0p = (s0 - sp_) / om;
    const double dmp = (sm - sp_) / om;

    Derivative d;
    d.d_rho_gg = -2.0 * (std::conj(w) * rho).imag() + sp_ * m2sq - ssum * m2sq * rgg +
                 2.0 * m2rho * s0 * m1 - 2.0 * dd * m2w * m2rho + 2.0 * dd * m2w * m1 * rgg -
                 2.0 * d0p * m1 * m2w;

    d.d_rho_ge = kI * w * (2.0 * rgg - 1.0) + kI * (frame.w.ee - frame.w.gg) * rho +
                 kI * om * rho - sp_ * m1 * m2 + ssum * m1 * m2 * rgg - 2.0 * s0 * m1 * m1 * rho -
                 kI * ssum * m2 * (rho.imag() * m2.real() - m2.imag() * rho.real()) -
                 2.0 * dd * m1 * m1 * w * rgg + 2.0 * d0p * m1 * m1 * w -
                 kI * m2 * dmp * (m2.imag() * w.real() - w.imag() * m2.real()) -
                 2.0 * dd * m1 *
                     (kI * m2 * (w.imag() * rho.real() - rho.imag() * w.real()) - m2w * rho);
    return d;
}

Derivative rhs_full(const DensityState& s, const AdiabaticFrame& frame, const SpectralDensity& sd) {
    return rhs_full(s, frame, sample_spectrum(sd, frame.omega01));
}

Derivative rhs_superadiabatic_oracle(const DensityState& s2, const AdiabaticFrame& frame,
                                     const SpectralSamples& sp) {
    require_adiabatic(frame, "rhs_superadiabatic_oracle");
    const CouplingElements c = superadiabatic_elements(frame.m1, frame.m2, frame.w.ge, frame.omega01);
    const RateSet r = rates_from_samples(c.m1, c.m2, sp);
    const double omega2 = frame.omega01 + (frame.w.ee - frame.w.gg);
    return rhs_nonsteered(s2, r, omega2);
}

Derivative superadiabatic_pullback(const DensityState& s, const AdiabaticFrame& frame,
                                   const SpectralSamples& sp) {
    const DensityState s2 = to_superadiabatic(s, frame);
    const Derivative d2 = rhs_superadiabatic_oracle(s2, frame, sp);
    // d2_gg = P - 2 Re(conj(k) Q), d2_ge = Q + 2 k P with k = w_ge / omega01, solved exactly.
    const cplx k = frame.w.ge / frame.omega01;
    Derivative d;
    d.d_rho_gg = (d2.d_rho_gg + 2.0 * (std::conj(k) * d2.d_rho_ge).real()) / (1.0 + 4.0 * std::norm(k));
    d.d_rho_ge = d2.d_rho_ge - 2.0 * k * d.d_rho_gg;
    return d;
}

Trajectory integrate(const DensityRhs& rhs, const DensityState& initial, const SolverConfig& cfg,
                     const FrameProvider& frames, const IntegrateOptions& options) {
    using State = OdeState<5>;

    auto evaluate = [&](double t, const State& y, AdiabaticFrame* used) {
        const AdiabaticFrame raw = frames(t);
        const AdiabaticFrame frame = options.optimal_phase ? phase_shifted_frame(raw, y[3], y[4]) : raw;
        const Derivative d = rhs(DensityState{y[0], cplx(y[1], y[2])}, frame, raw);
        if (used != nullptr) {
            *used = frame;
        }
        return State{d.d_rho_gg, d.d_rho_ge.real(), d.d_rho_ge.imag(), -raw.w.gg, -raw.w.ee};
    };

    const OdeRhs<5> f = [&](double t, const State& y) { return evaluate(t, y, nullptr); };
    const State y0{initial.rho_gg, initial.rho_ge.real(), initial.rho_ge.imag(), options.lambda_g0,
                   options.lambda_e0};
    Trajectory out;
    auto& diag = out.diagnostics;
    diag.min_rho_gg = std::numeric_limits<double>::infinity();
    diag.max_rho_gg = -std::numeric_limits<double>::infinity();

    const OdeObserver<5> observe = [&](double t, const State& y) {
        TrajectorySample sample;
        sample.t = t;
        sample.state = DensityState{y[0], cplx(y[1], y[2])};
        evaluate(t, y, &sample.frame);
        sample.lambda_g = y[3];
        sample.lambda_e = y[4];
        sample.purity = purity(sample.state);

        const double excess = sample.purity - 1.0;
        diag.max_purity_excess = std::max(diag.max_purity_excess, excess);
        diag.min_rho_gg = std::min(diag.min_rho_gg, sample.state.rho_gg);
        diag.max_rho_gg = std::max(diag.max_rho_gg, sample.state.rho_gg);
        diag.max_excited_population = std::max(diag.max_excited_population, sample.state.rho_ee());
        diag.max_alpha = std::max(diag.max_alpha, sample.frame.alpha);
        const bool out_of_bounds = sample.state.rho_gg < -options.positivity_tolerance ||
                                   sample.state.rho_gg > 1.0 + options.positivity_tolerance;
        if (excess > options.positivity_tolerance || out_of_bounds) {
            if (diag.positivity_warnings == 0) {
                std::ostringstream msg;
                msg << "positivity violated at t = " << sample.t << ": purity = " << sample.purity
                    << ", rho_gg = " << sample.state.rho_gg;
                diag.warnings.push_back(msg.str());
            }
            ++diag.positivity_warnings;
        }
        if (options.on_sample) {
            options.on_sample(sample);
        }
        out.samples.push_back(std::move(sample));
    };

    const OdeSolution<5> sol = integrate_ode<5>(f, y0, cfg, observe);
    diag.accepted_steps = sol.accepted;
    diag.rejected_steps = sol.rejected;
    return out;
}

std::string to_string(Equation e) {
    switch (e) {
    case Equation::full:
        return "full";
    case Equation::secular:
        return "secular";
    case Equation::nonsteered:
        return "nonsteered";
    case Equation::superadiabatic:
        return "superadiabatic";
    }
    return "full";
}

Equation equation_from_string(const std::string& name) {
    if (name == "full") {
        return Equation::full;
    }
    if (name == "secular") {
        return Equation::secular;
    }
    if (name == "nonsteered") {
        return Equation::nonsteered;
    }
    if (name == "superadiabatic") {
        return Equation::superadiabatic;
    }
    throw ValidationError({"equation: unknown variant '" + name +
                           "' (expected full, secular, nonsteered or superadiabatic)"});
}

DensityRhs make_rhs(const SpectralDensity& sd, const SimulationOptions& options) {
    const bool shift = options.spectral_shift;
    auto spectrum = [sd, shift](const AdiabaticFrame& frame, const AdiabaticFrame& raw) {
        return shift ? sample_shifted_spectrum(sd, frame.omega01, raw.w.gg, raw.w.ee)
                     : sample_spectrum(sd, frame.omega01);
    };

    switch (options.equation) {
    case Equation::full:
        return [spectrum](const DensityState& s, const AdiabaticFrame& f, const AdiabaticFrame& raw) {
            return rhs_full(s, f, spectrum(f, raw));
        };
    case Equation::secular:
        return [spectrum](const DensityState& s, const AdiabaticFrame& f, const AdiabaticFrame& raw) {
            return rhs_secular(s, rates_from_samples(f.m1, f.m2, spectrum(f, raw)), f);
        };
    case Equation::nonsteered:
        return [spectrum](const DensityState& s, const AdiabaticFrame& f, const AdiabaticFrame& raw) {
            require_gap(f.omega01, "rhs_nonsteered");
            return rhs_nonsteered(s, rates_from_samples(f.m1, f.m2, spectrum(f, raw)), f.omega01);
        };
    case Equation::superadiabatic:
        return [spectrum](const DensityState& s, const AdiabaticFrame& f, const AdiabaticFrame& raw) {
            return superadiabatic_pullback(s, f, spectrum(f, raw));
        };
    }
    throw ValidationError({"equation: unsupported variant"});
}

Trajectory simulate(const ControlPath& path, const SpectralDensity& sd, const DensityState& initial,
                    const SolverConfig& cfg, const SimulationOptions& options) {
    const FrameOptions frame_options = options.frame;
    const FrameProvider frames = [&path, frame_options](double t) {
        return frame_at(path, t, frame_options);
    };
    IntegrateOptions io;
    io.optimal_phase = options.optimal_phase;
    io.lambda_g0 = options.lambda_g0;
    io.lambda_e0 = options.lambda_e0;
    io.positivity_tolerance = options.positivity_tolerance;
    io.on_sample = options.on_sample;
    return integrate(make_rhs(sd, options), initial, cfg, frames, io);
}

void write_trajectory_header(std::ostream& out) {
    out << "t,rho_gg,re_rho_ge,im_rho_ge,purity,alpha,omega01,lambda_g,lambda_e\n";
}

void write_trajectory_row(std::ostream& out, const TrajectorySample& s) {
    std::ostringstream row;
    row << std::setprecision(17);
    row << s.t << ',' << s.state.rho_gg << ',' << s.state.rho_ge.real() << ',' << s.state.rho_ge.imag()
        << ',' << s.purity << ',' << s.frame.alpha << ',' << s.frame.omega01 << ',' << s.lambda_g << ','
        << s.lambda_e << '\n';
    out << row.str();
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    write_trajectory_header(out);
    for (const auto& s : trajectory.samples) {
        write_trajectory_row(out, s);
    }
}

} // namespace steer
