#pragma once

#include <cmath>
#include <complex>

#include "steer/linalg.hpp"

namespace steer {

// Matrix elements w_sr = -i<s|d/dt r> of the steering generator w = -i D^dagger dD/dt.
// w is Hermitian, so w_eg = conj(w_ge) is never stored.
struct WElements {
    double gg = 0.0;
    double ee = 0.0;
    cplx ge{0.0, 0.0};

    cplx eg() const { return std::conj(ge); }
};

// Hilbert-Schmidt norm sqrt(Tr w^dagger w).
inline double hs_norm(const WElements& w) {
    return std::sqrt(w.gg * w.gg + w.ee * w.ee + 2.0 * std::norm(w.ge));
}

} // namespace steer
