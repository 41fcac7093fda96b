#include "steer/frames.hpp"

#include <string>

#include "steer/errors.hpp"

namespace steer {

namespace {

void require_perturbative(const AdiabaticFrame& frame, const char* what) {
    if (!(frame.omega01 > kGapFloor)) {
        throw GapCollapse(std::string(what) + ": omega01 below the gap floor");
    }
    if (!(frame.alpha < 1.0)) {
        throw AdiabaticityViolation(std::string(what) + ": local adiabatic parameter " +
                                    std::to_string(frame.alpha) + " >= 1");
    }
}

} // namespace

SuperadiabaticBasis superadiabatic_basis(const AdiabaticFrame& frame) {
    require_perturbative(frame, "superadiabatic_basis");
    const cplx k = frame.w.ge / frame.omega01;

    SuperadiabaticBasis b;
    b.ground << 1.0, -std::conj(k);
    b.excited << k, 1.0;
    b.energy_g = -0.5 * frame.omega01 + frame.w.gg;
    b.energy_e = 0.5 * frame.omega01 + frame.w.ee;
    b.omega01 = frame.omega01 + (frame.w.ee - frame.w.gg);
    return b;
}

DensityState to_superadiabatic(const DensityState& s, const AdiabaticFrame& frame) {
    require_perturbative(frame, "to_superadiabatic");
    const cplx k = frame.w.ge / frame.omega01;
    DensityState out;
    out.rho_gg = s.rho_gg - 2.0 * (std::conj(k) * s.rho_ge).real();
    out.rho_ge = s.rho_ge + k * (2.0 * s.rho_gg - 1.0);
    return out;
}

DensityState from_superadiabatic(const DensityState& s2, const AdiabaticFrame& frame) {
    require_perturbative(frame, "from_superadiabatic");
    const cplx k = frame.w.ge / frame.omega01;
    DensityState out;
    out.rho_gg = s2.rho_gg + 2.0 * (std::conj(k) * s2.rho_ge).real();
    out.rho_ge = s2.rho_ge - k * (2.0 * s2.rho_gg - 1.0);
    return out;
}

DensityState interaction_to_schrodinger(const DensityState& sigma, double t, double omega01) {
    return {sigma.rho_gg, std::polar(1.0, omega01 * t) * sigma.rho_ge};
}

DensityState schrodinger_to_interaction(const DensityState& rho, double t, double omega01) {
    return {rho.rho_gg, std::polar(1.0, -omega01 * t) * rho.rho_ge};
}

} // namespace steer
