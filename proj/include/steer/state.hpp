#pragma once

#include <complex>

#include "steer/linalg.hpp"

namespace steer {

// Reduced two-level density matrix in some basis {|g>, |e>}. rho_ee and rho_eg are derived,
// so trace and Hermiticity hold by construction.
struct DensityState {
    double rho_gg = 1.0;
    cplx rho_ge{0.0, 0.0};

    double rho_ee() const { return 1.0 - rho_gg; }
    cplx rho_eg() const { return std::conj(rho_ge); }
};

// Tr rho^2
inline double purity(const DensityState& s) {
    return s.rho_gg * s.rho_gg + s.rho_ee() * s.rho_ee() + 2.0 * std::norm(s.rho_ge);
}

// Time derivative of a DensityState.
struct Derivative {
    double d_rho_gg = 0.0;
    cplx d_rho_ge{0.0, 0.0};
};

} // namespace steer
