// Steered two-level Hamiltonian, adiabatic eigenbasis and steering generator

#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include <boost/math/interpolators/makima.hpp>

#include "steer/linalg.hpp"
#include "steer/w_elements.hpp"

namespace steer {

// b(t) = amplitude * (sin(theta) cos(omega t), sin(theta) sin(omega t), cos(theta))
struct RotatingCone {
    double amplitude = 1.0;
    double polar_angle = kPi / 2.0;
    double angular_frequency = 0.1;
};

// Landau-Zener style sweep: b(t) = (gap, 0, slope * (t - center))
struct LinearSweep {
    double slope = 1.0;
    double gap = 1.0;
    double center = 0.0;
};

// Field sampled on a time grid, interpolated componentwise with a C^1 modified Akima spline.
class SampledField {
public:
    SampledField(std::vector<double> times, const std::vector<Vec3>& fields);

    Vec3 value(double t) const;
    Vec3 rate(double t) const;

    double start() const { return start_; }
    double end() const { return end_; }
    const std::vector<double>& times() const { return times_; }
    const std::vector<Vec3>& samples() const { return samples_; }

private:
    using Spline = boost::math::interpolators::makima<std::vector<double>>;

    double clamp(double t) const;

    std::vector<double> times_;
    std::vector<Vec3> samples_;
    double start_ = 0.0;
    double end_ = 0.0;
    std::vector<Spline> components_;
};

// H_S(t) = b(t).sigma / 2 together with the system part A of the coupling V = A (x) X.
class ControlPath {
public:
    using Kind = std::variant<RotatingCone, LinearSweep, SampledField>;

    ControlPath(Kind kind, Mat2 coupling, double duration);

    static ControlPath rotating_cone(double amplitude, double polar_angle, double angular_frequency,
                                     Mat2 coupling, double cycles = 1.0);
    static ControlPath linear_sweep(double slope, double gap, double duration, Mat2 coupling);
    static ControlPath sampled(std::vector<double> times, const std::vector<Vec3>& fields,
                               Mat2 coupling);
    // Rows of "t,b_x,b_y,b_z"; a non-numeric first row is treated as a header.
    static ControlPath sampled_from_csv(std::istream& in, Mat2 coupling);

    Vec3 field(double t) const;
    Vec3 field_rate(double t) const;
    Mat2 hamiltonian(double t) const { return 0.5 * pauli::dot(field(t)); }

    const Kind& kind() const { return kind_; }
    const Mat2& coupling() const { return coupling_; }
    double duration() const { return duration_; }

private:
    Kind kind_;
    Mat2 coupling_;
    double duration_;
};

// Extra smooth local phase multiplying one eigenvector: |m> -> exp(i beta(t)) |m>.
// Empty functions mean beta == 0.
struct LocalPhase {
    std::function<double(double)> value;
    std::function<double(double)> rate;

    double at(double t) const { return value ? value(t) : 0.0; }
    double rate_at(double t) const { return rate ? rate(t) : 0.0; }
};

// Gauge = closed-form chart gauge composed with optional local phases.
struct LocalGauge {
    LocalPhase ground;
    LocalPhase excited;
};

struct EigenFrame {
    double t = 0.0;
    Spinor ground = Spinor::Zero();
    Spinor excited = Spinor::Zero();
    double energy_g = 0.0;
    double energy_e = 0.0;

    double gap() const { return energy_e - energy_g; }
};

// Chart gauge: the excited state's first component and the ground state's second
// component are real and non-negative, i.e. |e> = (cos(t/2), e^{i phi} sin(t/2)) for
// n = (sin t cos phi, sin t sin phi, cos t). Smooth everywhere except b || -z.
EigenFrame eigensystem(const ControlPath& path, double t, const LocalGauge& gauge = {});

// Same, then each eigenvector is rotated so that <prev|new> is real and positive.
EigenFrame eigensystem(const ControlPath& path, double t, const EigenFrame& prev,
                       const LocalGauge& gauge = {});

EigenFrame eigensystem_of_field(const Vec3& b, double t = 0.0);

struct AnalyticW {};
struct CentralDifferenceW {
    double step = 0.0; // <= 0 selects 1e-4 * duration
};
using WMethod = std::variant<AnalyticW, CentralDifferenceW>;

WElements compute_w(const ControlPath& path, double t, const WMethod& method = AnalyticW{},
                    const LocalGauge& gauge = {});

// Coupling matrix elements after removing the trace: m1 = <g|A'|g> = -<e|A'|e>, m2 = <g|A'|e>.
struct CouplingElements {
    double m1 = 0.0;
    cplx m2{0.0, 0.0};
};

CouplingElements coupling_elements(const Mat2& coupling, const EigenFrame& frame);

double local_alpha(const WElements& w, double omega01);

// Instantaneous snapshot consumed by the master equations.
struct AdiabaticFrame {
    double t = 0.0;
    double omega01 = 1.0;
    WElements w;
    double m1 = 0.0;
    cplx m2{0.0, 0.0};
    double alpha = 0.0;
};

struct FrameOptions {
    WMethod method = AnalyticW{};
    LocalGauge gauge;
};

AdiabaticFrame frame_at(const ControlPath& path, double t, const FrameOptions& options = {});

} // namespace steer
