#include "steer/control.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <string>

#include "steer/errors.hpp"

namespace steer {

namespace {

constexpr cplx kI{0.0, 1.0};

struct FieldVisitor {
    double t;

    Vec3 operator()(const RotatingCone& c) const {
        const double phase = c.angular_frequency * t;
        const double s = std::sin(c.polar_angle);
        return c.amplitude * Vec3(s * std::cos(phase), s * std::sin(phase), std::cos(c.polar_angle));
    }
    Vec3 operator()(const LinearSweep& s) const { return Vec3(s.gap, 0.0, s.slope * (t - s.center)); }
    Vec3 operator()(const SampledField& f) const { return f.value(t); }
};

struct FieldRateVisitor {
    double t;

    Vec3 operator()(const RotatingCone& c) const {
        const double phase = c.angular_frequency * t;
        const double s = c.amplitude * c.angular_frequency * std::sin(c.polar_angle);
        return Vec3(-s * std::sin(phase), s * std::cos(phase), 0.0);
    }
    Vec3 operator()(const LinearSweep& s) const { return Vec3(0.0, 0.0, s.slope); }
    Vec3 operator()(const SampledField& f) const { return f.rate(t); }
};

// r + b_z without cancellation when b_z < 0.
double north_weight(const Vec3& b, double r) {
    if (b.z() >= 0.0) {
        return r + b.z();
    }
    return (b.x() * b.x() + b.y() * b.y()) / (r - b.z());
}

void apply_local_gauge(EigenFrame& frame, const LocalGauge& gauge) {
    const double bg = gauge.ground.at(frame.t);
    const double be = gauge.excited.at(frame.t);
    if (bg != 0.0) {
        frame.ground *= std::polar(1.0, bg);
    }
    if (be != 0.0) {
        frame.excited *= std::polar(1.0, be);
    }
}

void align_phase(Spinor& v, const Spinor& reference) {
    const cplx overlap = reference.dot(v);
    const double mag = std::abs(overlap);
    if (mag < 1e-12) {
        throw StepTooCoarse("eigenvector is orthogonal to its predecessor; refine the time grid");
    }
    v *= std::conj(overlap) / mag;
}

Mat2 basis_matrix(const EigenFrame& f) {
    Mat2 d;
    d.col(0) = f.ground;
    d.col(1) = f.excited;
    return d;
}

} // namespace

SampledField::SampledField(std::vector<double> times, const std::vector<Vec3>& fields)
    : times_(std::move(times)), samples_(fields) {
    if (times_.size() != samples_.size()) {
        throw ValidationError({"sampled path: time and field columns differ in length"});
    }
    if (times_.size() < 4) {
        throw ValidationError({"sampled path: at least four samples are required"});
    }
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1])) {
            throw ValidationError({"sampled path: times must be strictly increasing"});
        }
    }
    start_ = times_.front();
    end_ = times_.back();
    for (int c = 0; c < 3; ++c) {
        std::vector<double> x = times_;
        std::vector<double> y(samples_.size());
        std::transform(samples_.begin(), samples_.end(), y.begin(),
                       [c](const Vec3& v) { return v[c]; });
        components_.emplace_back(std::move(x), std::move(y));
    }
}

double SampledField::clamp(double t) const { return std::clamp(t + start_, start_, end_); }

Vec3 SampledField::value(double t) const {
    const double s = clamp(t);
    return Vec3(components_[0](s), components_[1](s), components_[2](s));
}

Vec3 SampledField::rate(double t) const {
    const double s = clamp(t);
    return Vec3(components_[0].prime(s), components_[1].prime(s), components_[2].prime(s));
}

ControlPath::ControlPath(Kind kind, Mat2 coupling, double duration)
    : kind_(std::move(kind)), coupling_(std::move(coupling)), duration_(duration) {
    std::vector<std::string> issues;
    if (!(duration_ > 0.0) || !std::isfinite(duration_)) {
        issues.emplace_back("control path: duration must be positive and finite");
    }
    if (!coupling_.allFinite() || !is_hermitian(coupling_)) {
        issues.emplace_back("control path: coupling operator must be Hermitian");
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
}

ControlPath ControlPath::rotating_cone(double amplitude, double polar_angle,
                                       double angular_frequency, Mat2 coupling, double cycles) {
    std::vector<std::string> issues;
    if (!(amplitude > kGapFloor)) {
        issues.emplace_back("rotating cone: amplitude must exceed the gap floor");
    }
    if (!(polar_angle >= 0.0 && polar_angle < kPi)) {
        issues.emplace_back("rotating cone: polar angle must lie in [0, pi)");
    }
    if (!(angular_frequency != 0.0) || !std::isfinite(angular_frequency)) {
        issues.emplace_back("rotating cone: angular frequency must be finite and non-zero");
    }
    if (!(cycles > 0.0)) {
        issues.emplace_back("rotating cone: cycles must be positive");
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    const double duration = cycles * 2.0 * kPi / std::abs(angular_frequency);
    return ControlPath(RotatingCone{amplitude, polar_angle, angular_frequency}, std::move(coupling),
                       duration);
}

ControlPath ControlPath::linear_sweep(double slope, double gap, double duration, Mat2 coupling) {
    if (!(gap > kGapFloor)) {
        throw ValidationError({"linear sweep: gap must exceed the gap floor"});
    }
    return ControlPath(LinearSweep{slope, gap, 0.5 * duration}, std::move(coupling), duration);
}

ControlPath ControlPath::sampled(std::vector<double> times, const std::vector<Vec3>& fields,
                                 Mat2 coupling) {
    SampledField f(std::move(times), fields);
    const double duration = f.end() - f.start();
    return ControlPath(std::move(f), std::move(coupling), duration);
}

ControlPath ControlPath::sampled_from_csv(std::istream& in, Mat2 coupling) {
    std::vector<double> times;
    std::vector<Vec3> fields;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') {
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double t, bx, by, bz;
        if (!(row >> t >> bx >> by >> bz)) {
            if (times.empty()) {
                continue; // header
            }
            throw ParseError("sampled path CSV: malformed row " + std::to_string(lineno));
        }
        times.push_back(t);
        fields.emplace_back(bx, by, bz);
    }
    return sampled(std::move(times), fields, std::move(coupling));
}

Vec3 ControlPath::field(double t) const { return std::visit(FieldVisitor{t}, kind_); }

Vec3 ControlPath::field_rate(double t) const { return std::visit(FieldRateVisitor{t}, kind_); }

EigenFrame eigensystem_of_field(const Vec3& b, double t) {
    const double r = b.norm();
    if (!(r > kGapFloor)) {
        throw GapCollapse("level splitting |b| = " + std::to_string(r) + " at t = " +
                          std::to_string(t) + " is below the gap floor");
    }
    const double p = north_weight(b, r);
    if (p <= 1e-12 * r) {
        throw GaugeSingularity("field anti-parallel to z at t = " + std::to_string(t));
    }
    const double norm = std::sqrt(2.0 * r * p);
    const cplx c(b.x(), b.y());

    EigenFrame f;
    f.t = t;
    f.excited << p / norm, c / norm;
    f.ground << -std::conj(c) / norm, p / norm;
    f.energy_g = -0.5 * r;
    f.energy_e = 0.5 * r;
    return f;
}

EigenFrame eigensystem(const ControlPath& path, double t, const LocalGauge& gauge) {
    EigenFrame f = eigensystem_of_field(path.field(t), t);
    apply_local_gauge(f, gauge);
    return f;
}

EigenFrame eigensystem(const ControlPath& path, double t, const EigenFrame& prev,
                       const LocalGauge& gauge) {
    EigenFrame f = eigensystem(path, t, gauge);
    align_phase(f.ground, prev.ground);
    align_phase(f.excited, prev.excited);
    return f;
}

WElements compute_w(const ControlPath& path, double t, const WMethod& method,
                    const LocalGauge& gauge) {
    if (std::holds_alternative<AnalyticW>(method)) {
        const EigenFrame f = eigensystem(path, t, gauge);
        const Vec3 b = path.field(t);
        const Vec3 bdot = path.field_rate(t);
        const double r = b.norm();
        const double p = north_weight(b, r);
        const Mat2 hdot = 0.5 * pauli::dot(bdot);

        // Off-diagonal from first-order perturbation theory: <g|e'> = <g|H'|e> / (E_e - E_g).
        WElements w;
        w.ge = -kI * f.ground.dot(hdot * f.excited) / f.gap();
        // Chart-gauge phase velocity, w_ee = phi' sin^2(theta/2) = -w_gg.
        const double chart = (b.x() * bdot.y() - b.y() * bdot.x()) / (2.0 * r * p);
        w.gg = -chart + gauge.ground.rate_at(t);
        w.ee = chart + gauge.excited.rate_at(t);
        return w;
    }

    double h = std::get<CentralDifferenceW>(method).step;
    if (h <= 0.0) {
        h = 1e-4 * path.duration();
    }
    const double duration = path.duration();
    if (!(2.0 * h <= duration)) {
        throw StepTooCoarse("finite-difference step exceeds half the path duration");
    }

    const EigenFrame f0 = eigensystem(path, t, gauge);
    const Mat2 d0 = basis_matrix(f0);
    auto at = [&](double s) {
        const EigenFrame f = eigensystem(path, s, gauge);
        if (f0.ground.dot(f.ground).real() <= 0.0 || f0.excited.dot(f.excited).real() <= 0.0) {
            throw StepTooCoarse("eigenvector gauge is discontinuous across the difference stencil");
        }
        return basis_matrix(f);
    };

    Mat2 ddot;
    if (t - h >= 0.0 && t + h <= duration) {
        ddot = (at(t + h) - at(t - h)) / (2.0 * h);
    } else if (t - h < 0.0) {
        ddot = (-3.0 * d0 + 4.0 * at(t + h) - at(t + 2.0 * h)) / (2.0 * h);
    } else {
        ddot = (3.0 * d0 - 4.0 * at(t - h) + at(t - 2.0 * h)) / (2.0 * h);
    }
    const Mat2 wm = -kI * d0.adjoint() * ddot;

    const double herm = std::max({std::abs(wm(0, 0).imag()), std::abs(wm(1, 1).imag()),
                                  std::abs(wm(0, 1) - std::conj(wm(1, 0)))});
    if (herm > 1e-8) {
        throw StepTooCoarse("finite-difference w violates Hermiticity by " + std::to_string(herm));
    }

    WElements w;
    w.gg = wm(0, 0).real();
    w.ee = wm(1, 1).real();
    w.ge = 0.5 * (wm(0, 1) + std::conj(wm(1, 0)));
    return w;
}

CouplingElements coupling_elements(const Mat2& coupling, const EigenFrame& frame) {
    if (!is_hermitian(coupling)) {
        throw ValidationError({"coupling operator must be Hermitian"});
    }
    const Mat2 traceless = coupling - 0.5 * coupling.trace() * Mat2::Identity();
    CouplingElements c;
    c.m1 = frame.ground.dot(traceless * frame.ground).real();
    c.m2 = frame.ground.dot(traceless * frame.excited);
    return c;
}

double local_alpha(const WElements& w, double omega01) {
    if (!(omega01 > kGapFloor)) {
        throw GapCollapse("omega01 = " + std::to_string(omega01) + " is below the gap floor");
    }
    return hs_norm(w) / omega01;
}

AdiabaticFrame frame_at(const ControlPath& path, double t, const FrameOptions& options) {
    const EigenFrame eig = eigensystem(path, t, options.gauge);
    const CouplingElements c = coupling_elements(path.coupling(), eig);

    AdiabaticFrame f;
    f.t = t;
    f.omega01 = eig.gap();
    f.w = compute_w(path, t, options.method, options.gauge);
    f.m1 = c.m1;
    f.m2 = c.m2;
    f.alpha = local_alpha(f.w, f.omega01);
    return f;
}

} // namespace steer
