// Phase freedom of the adiabatic basis: optimal phases and Berry phases

#pragma once

#include <cstddef>
#include <vector>

#include <boost/math/interpolators/cubic_hermite.hpp>

#include "steer/control.hpp"
#include "steer/w_elements.hpp"

namespace steer {

// w after |g> -> e^{i lambda_g}|g>, |e> -> e^{i lambda_e}|e>:
//   w_gg + lambda_g', w_ee + lambda_e', e^{i(lambda_e - lambda_g)} w_ge.
WElements apply_phase(const WElements& w, double lambda_g, double lambda_e, double rate_g,
                      double rate_e);

// Frame seen in the optimally phased basis: diagonals of w removed, w_ge and m2 rotated by
// e^{i(lambda_e - lambda_g)}, omega01 and m1 untouched.
AdiabaticFrame phase_shifted_frame(const AdiabaticFrame& frame, double lambda_g, double lambda_e);

// Frames and eigenvectors of a path sampled on a grid, all in one gauge.
struct FrameHistory {
    std::vector<double> t;
    std::vector<AdiabaticFrame> frames;
    std::vector<EigenFrame> eigen;
    std::vector<Vec3> field;

    std::size_t size() const { return t.size(); }
};

FrameHistory sample_history(const ControlPath& path, double t_a, double t_b,
                            std::size_t intervals, const FrameOptions& options = {});

// lambda_m(t) = lambda_m0 - int_0^t w_mm, tabulated on a uniform grid by the cumulative
// trapezoid rule and interpolated with cubic Hermite segments (slopes -w_mm).
class PhaseSchedule {
public:
    PhaseSchedule(std::vector<double> t, std::vector<double> lambda_g, std::vector<double> lambda_e,
                  std::vector<double> rate_g, std::vector<double> rate_e, double quadrature_error);

    double lambda_g(double t) const { return interp_g_(t); }
    double lambda_e(double t) const { return interp_e_(t); }
    double rate_g(double t) const { return interp_g_.prime(t); }
    double rate_e(double t) const { return interp_e_.prime(t); }

    double lambda_g0() const { return lambda_g_.front(); }
    double lambda_e0() const { return lambda_e_.front(); }

    const std::vector<double>& times() const { return t_; }
    const std::vector<double>& lambda_g_values() const { return lambda_g_; }
    const std::vector<double>& lambda_e_values() const { return lambda_e_; }
    const std::vector<double>& rate_g_values() const { return rate_g_; }
    const std::vector<double>& rate_e_values() const { return rate_e_; }

    // Richardson estimate |I_h - I_2h| / 3 of the accumulated phase error.
    double quadrature_error() const { return quadrature_error_; }

private:
    using Hermite = boost::math::interpolators::cubic_hermite<std::vector<double>>;

    std::vector<double> t_;
    std::vector<double> lambda_g_;
    std::vector<double> lambda_e_;
    std::vector<double> rate_g_;
    std::vector<double> rate_e_;
    double quadrature_error_;
    Hermite interp_g_;
    Hermite interp_e_;
};

// Non-uniform histories are resampled onto a uniform grid first.
PhaseSchedule optimal_schedule(const FrameHistory& history, double lambda_g0 = 0.0,
                               double lambda_e0 = 0.0);

AdiabaticFrame phase_shifted_frame(const AdiabaticFrame& frame, const PhaseSchedule& schedule);

// Accumulated optimal phases over a closed loop, lambda(t_b) - lambda(t_a) = -oint w_mm.
// If the history's gauge is not single valued, the endpoint mismatch arg<m(t_a)|m(t_b)> is
// added so the result does not depend on it. The textbook geometric phase is the negative.
struct BerryPhases {
    double ground = 0.0;
    double excited = 0.0;
    double ground_mod = 0.0; // in [0, 2 pi)
    double excited_mod = 0.0;
    double quadrature_error = 0.0;
};

BerryPhases berry_phase(const FrameHistory& loop);

double wrap_two_pi(double phase);

} // namespace steer
