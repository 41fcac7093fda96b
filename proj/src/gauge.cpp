#include "steer/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/interpolators/makima.hpp>

#include "steer/errors.hpp"

namespace steer {

namespace {

bool is_uniform(const std::vector<double>& t) {
    const double step = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (std::abs((t[i] - t[i - 1]) - step) > 1e-9 * step) {
            return false;
        }
    }
    return true;
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& f, double h, double start) {
    std::vector<double> out(f.size());
    out[0] = start;
    for (std::size_t i = 1; i < f.size(); ++i) {
        out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    }
    return out;
}

double richardson_error(const std::vector<double>& f, double h) {
    const std::size_t n = f.size() - 1;
    if (n < 2 || n % 2 != 0) {
        return 0.0;
    }
    double fine = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        fine += 0.5 * h * (f[i - 1] + f[i]);
    }
    double coarse = 0.0;
    for (std::size_t i = 2; i <= n; i += 2) {
        coarse += h * (f[i - 2] + f[i]);
    }
    return std::abs(fine - coarse) / 3.0;
}

} // namespace

double wrap_two_pi(double phase) {
    double r = std::fmod(phase, 2.0 * kPi);
    if (r < 0.0) {
        r += 2.0 * kPi;
    }
    return r;
}

WElements apply_phase(const WElements& w, double lambda_g, double lambda_e, double rate_g,
                      double rate_e) {
    WElements out;
    out.gg = rate_g + w.gg;
    out.ee = rate_e + w.ee;
    out.ge = std::polar(1.0, lambda_e - lambda_g) * w.ge;
    return out;
}

AdiabaticFrame phase_shifted_frame(const AdiabaticFrame& frame, double lambda_g,
                                   double lambda_e) {
    const cplx phase = std::polar(1.0, lambda_e - lambda_g);
    AdiabaticFrame out = frame;
    out.w.gg = 0.0;
    out.w.ee = 0.0;
    out.w.ge = phase * frame.w.ge;
    out.m2 = phase * frame.m2;
    out.alpha = local_alpha(out.w, out.omega01);
    return out;
}

FrameHistory sample_history(const ControlPath& path, double t_a, double t_b,
                            std::size_t intervals, const FrameOptions& options) {
    if (intervals < 1 || !(t_b > t_a)) {
        throw NonUniformGridUnsupported("history needs t_b > t_a and at least one interval");
    }
    FrameHistory h;
    const double step = (t_b - t_a) / static_cast<double>(intervals);
    for (std::size_t i = 0; i <= intervals; ++i) {
        const double t = i == intervals ? t_b : t_a + static_cast<double>(i) * step;
        h.t.push_back(t);
        h.frames.push_back(frame_at(path, t, options));
        h.eigen.push_back(eigensystem(path, t, options.gauge));
        h.field.push_back(path.field(t));
    }
    return h;
}

PhaseSchedule::PhaseSchedule(std::vector<double> t, std::vector<double> lambda_g,
                             std::vector<double> lambda_e, std::vector<double> rate_g,
                             std::vector<double> rate_e, double quadrature_error)
    : t_(std::move(t)),
      lambda_g_(std::move(lambda_g)),
      lambda_e_(std::move(lambda_e)),
      rate_g_(std::move(rate_g)),
      rate_e_(std::move(rate_e)),
      quadrature_error_(quadrature_error),
      interp_g_(std::vector<double>(t_), std::vector<double>(lambda_g_), std::vector<double>(rate_g_)),
      interp_e_(std::vector<double>(t_), std::vector<double>(lambda_e_), std::vector<double>(rate_e_)) {}

PhaseSchedule optimal_schedule(const FrameHistory& history, double lambda_g0, double lambda_e0) {
    const std::size_t n = history.size();
    if (n < 2 || history.frames.size() != n) {
        throw NonUniformGridUnsupported("phase schedule needs at least two frames");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(history.t[i] > history.t[i - 1])) {
            throw NonUniformGridUnsupported("frame history times must be strictly increasing");
        }
    }

    std::vector<double> t = history.t;
    std::vector<double> rate_g(n);
    std::vector<double> rate_e(n);
    for (std::size_t i = 0; i < n; ++i) {
        rate_g[i] = -history.frames[i].w.gg;
        rate_e[i] = -history.frames[i].w.ee;
    }

    if (!is_uniform(t)) {
        if (n < 4) {
            throw NonUniformGridUnsupported("non-uniform history needs four frames to resample");
        }
        using Spline = boost::math::interpolators::makima<std::vector<double>>;
        Spline sg{std::vector<double>(t), std::vector<double>(rate_g)};
        Spline se{std::vector<double>(t), std::vector<double>(rate_e)};
        const double step = (t.back() - t.front()) / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            const double s = i + 1 == n ? history.t.back() : history.t.front() + step * static_cast<double>(i);
            t[i] = s;
            rate_g[i] = sg(s);
            rate_e[i] = se(s);
        }
    }

    const double h = (t.back() - t.front()) / static_cast<double>(n - 1);
    std::vector<double> lg = cumulative_trapezoid(rate_g, h, lambda_g0);
    std::vector<double> le = cumulative_trapezoid(rate_e, h, lambda_e0);
    const double err = std::max(richardson_error(rate_g, h), richardson_error(rate_e, h));
    return PhaseSchedule(std::move(t), std::move(lg), std::move(le), std::move(rate_g),
                         std::move(rate_e), err);
}

AdiabaticFrame phase_shifted_frame(const AdiabaticFrame& frame, const PhaseSchedule& schedule) {
    return phase_shifted_frame(frame, schedule.lambda_g(frame.t), schedule.lambda_e(frame.t));
}

BerryPhases berry_phase(const FrameHistory& loop) {
    if (loop.size() < 2 || loop.field.size() != loop.size() || loop.eigen.size() != loop.size()) {
        throw NonUniformGridUnsupported("loop history is incomplete");
    }
    const double gap = (loop.field.front() - loop.field.back()).norm();
    if (!(gap < 1e-10)) {
        throw LoopNotClosed("loop endpoints differ by |b(t_a) - b(t_b)| = " + std::to_string(gap));
    }
    const PhaseSchedule schedule = optimal_schedule(loop);
    const double closure_g = std::arg(loop.eigen.front().ground.dot(loop.eigen.back().ground));
    const double closure_e = std::arg(loop.eigen.front().excited.dot(loop.eigen.back().excited));

    BerryPhases out;
    out.ground = schedule.lambda_g_values().back() - schedule.lambda_g0() + closure_g;
    out.excited = schedule.lambda_e_values().back() - schedule.lambda_e0() + closure_e;
    out.ground_mod = wrap_two_pi(out.ground);
    out.excited_mod = wrap_two_pi(out.excited);
    out.quadrature_error = schedule.quadrature_error();
    return out;
}

} // namespace steer
