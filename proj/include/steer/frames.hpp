// First superadiabatic basis and the maps between density-matrix representations

#pragma once

#include "steer/control.hpp"
#include "steer/state.hpp"

namespace steer {

// Corrected states expressed in (g, e) components. They are left unnormalized; the norm
// differs from one at O(alpha^2), beyond the order kept here.
struct SuperadiabaticBasis {
    Spinor ground = Spinor::Zero();
    Spinor excited = Spinor::Zero();
    double energy_g = 0.0;
    double energy_e = 0.0;
    double omega01 = 0.0;
};

SuperadiabaticBasis superadiabatic_basis(const AdiabaticFrame& frame);

// rho2_gg = rho_gg - 2 Re(conj(w_ge) rho_ge) / omega01
// rho2_ge = rho_ge + (w_ge / omega01) (2 rho_gg - 1)
DensityState to_superadiabatic(const DensityState& s, const AdiabaticFrame& frame);

// Linear-order inverse of to_superadiabatic; the round trip deviates at O(alpha^2).
DensityState from_superadiabatic(const DensityState& s2, const AdiabaticFrame& frame);

// rho_S = U sigma_I U^dagger for a non-steered system: populations unchanged,
// rho_ge = exp(i omega01 t) sigma_ge.
DensityState interaction_to_schrodinger(const DensityState& sigma, double t, double omega01);
DensityState schrodinger_to_interaction(const DensityState& rho, double t, double omega01);

} // namespace steer
