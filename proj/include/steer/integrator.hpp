// Classic RK4 and Dormand-Prince 5(4) for small fixed-size real systems

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "steer/errors.hpp"

namespace steer {

struct Rk4Fixed {
    double dt = 1e-2;
};

struct Rk45Adaptive {
    double rtol = 1e-9;
    double atol = 1e-12;
    double dt_max = std::numeric_limits<double>::infinity();
    double dt_initial = 0.0; // <= 0 selects a step from the initial slope
};

struct SolverConfig {
    std::variant<Rk4Fixed, Rk45Adaptive> method = Rk45Adaptive{};
    double t0 = 0.0;
    double t1 = 1.0;
    // Record every record_stride accepted steps. When record_interval > 0 steps are clipped
    // to land on t0 + k * record_interval instead and only those points are recorded.
    std::size_t record_stride = 1;
    double record_interval = 0.0;
    std::size_t max_consecutive_rejections = 64;
    std::size_t max_steps = 100'000'000;

    void validate() const {
        std::vector<std::string> issues;
        if (!(t1 > t0)) {
            issues.emplace_back("solver: t1 must exceed t0");
        }
        if (record_stride == 0) {
            issues.emplace_back("solver: record_stride must be at least 1");
        }
        if (!(record_interval >= 0.0)) {
            issues.emplace_back("solver: record_interval must be non-negative");
        }
        if (const auto* rk4 = std::get_if<Rk4Fixed>(&method)) {
            if (!(rk4->dt > 0.0)) {
                issues.emplace_back("solver: dt must be positive");
            }
        } else {
            const auto& rk45 = std::get<Rk45Adaptive>(method);
            if (!(rk45.rtol > 0.0)) {
                issues.emplace_back("solver: rtol must be positive");
            }
            if (!(rk45.atol > 0.0)) {
                issues.emplace_back("solver: atol must be positive");
            }
            if (!(rk45.dt_max > 0.0)) {
                issues.emplace_back("solver: dt_max must be positive");
            }
        }
        if (!issues.empty()) {
            throw ValidationError(std::move(issues));
        }
    }
};

template <std::size_t N>
using OdeState = std::array<double, N>;

template <std::size_t N>
using OdeRhs = std::function<OdeState<N>(double, const OdeState<N>&)>;

template <std::size_t N>
struct OdeSolution {
    std::vector<double> t;
    std::vector<OdeState<N>> y;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

namespace detail {

template <std::size_t N>
OdeState<N> axpy(const OdeState<N>& y, double h,
                 std::initializer_list<std::pair<double, const OdeState<N>*>> terms) {
    OdeState<N> out = y;
    for (const auto& [c, k] : terms) {
        if (c == 0.0) {
            continue;
        }
        for (std::size_t i = 0; i < N; ++i) {
            out[i] += h * c * (*k)[i];
        }
    }
    return out;
}

template <std::size_t N>
void require_finite(const OdeState<N>& y, double t) {
    for (double v : y) {
        if (!std::isfinite(v)) {
            throw NonFiniteState("state became non-finite at t = " + std::to_string(t));
        }
    }
}

template <std::size_t N>
double scaled_rms(const OdeState<N>& v, const OdeState<N>& y0, const OdeState<N>& y1,
                  const Rk45Adaptive& tol) {
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double sc = tol.atol + tol.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        acc += (v[i] / sc) * (v[i] / sc);
    }
    return std::sqrt(acc / static_cast<double>(N));
}

// Starting step from the initial slope and a trial Euler step.
template <std::size_t N>
double initial_step(const OdeRhs<N>& f, double t0, const OdeState<N>& y0, const OdeState<N>& f0,
                    const Rk45Adaptive& tol, double span) {
    const double d0 = scaled_rms(y0, y0, y0, tol);
    const double d1 = scaled_rms(f0, y0, y0, tol);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    const OdeState<N> y1 = axpy<N>(y0, h0, {{1.0, &f0}});
    const OdeState<N> f1 = f(t0 + h0, y1);
    OdeState<N> df;
    for (std::size_t i = 0; i < N; ++i) {
        df[i] = f1[i] - f0[i];
    }
    const double d2 = scaled_rms(df, y0, y0, tol) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    return std::min({100.0 * h0, h1, tol.dt_max, span});
}

} // namespace detail

template <std::size_t N>
using OdeObserver = std::function<void(double, const OdeState<N>&)>;

// `observe` sees every recorded point as soon as it is accepted.
template <std::size_t N>
OdeSolution<N> integrate_ode(const OdeRhs<N>& f, OdeState<N> y, const SolverConfig& cfg,
                             const OdeObserver<N>& observe = {}) {
    cfg.validate();
    detail::require_finite<N>(y, cfg.t0);

    const bool adaptive = std::holds_alternative<Rk45Adaptive>(cfg.method);
    const double span = cfg.t1 - cfg.t0;
    const double eps = 1e-12 * std::max(1.0, std::max(std::abs(cfg.t0), std::abs(cfg.t1)));

    OdeSolution<N> sol;
    double t = cfg.t0;
    sol.t.push_back(t);
    sol.y.push_back(y);
    if (observe) {
        observe(t, y);
    }

    std::size_t record_index = 1;
    auto next_record = [&]() {
        if (cfg.record_interval <= 0.0) {
            return cfg.t1;
        }
        const double r = cfg.t0 + static_cast<double>(record_index) * cfg.record_interval;
        return r > cfg.t1 - eps ? cfg.t1 : r;
    };

    OdeState<N> k1 = f(t, y);
    double dt;
    if (adaptive) {
        const auto& tol = std::get<Rk45Adaptive>(cfg.method);
        dt = tol.dt_initial > 0.0 ? std::min(tol.dt_initial, tol.dt_max)
                                  : detail::initial_step<N>(f, t, y, k1, tol, span);
    } else {
        dt = std::get<Rk4Fixed>(cfg.method).dt;
    }

    std::size_t since_record = 0;
    std::size_t consecutive_rejections = 0;

    while (t < cfg.t1 - eps) {
        if (sol.accepted + sol.rejected >= cfg.max_steps) {
            throw StepRejectionLimit("step budget exhausted at t = " + std::to_string(t));
        }
        const double target = next_record();
        double h = dt;
        bool landing = false;
        if (t + h >= target - eps) {
            h = target - t;
            landing = true;
        }

        OdeState<N> y_new;
        OdeState<N> k_last;
        if (!adaptive) {
            const OdeState<N> k2 = f(t + 0.5 * h, detail::axpy<N>(y, h, {{0.5, &k1}}));
            const OdeState<N> k3 = f(t + 0.5 * h, detail::axpy<N>(y, h, {{0.5, &k2}}));
            const OdeState<N> k4 = f(t + h, detail::axpy<N>(y, h, {{1.0, &k3}}));
            y_new = detail::axpy<N>(
                y, h, {{1.0 / 6.0, &k1}, {1.0 / 3.0, &k2}, {1.0 / 3.0, &k3}, {1.0 / 6.0, &k4}});
            detail::require_finite<N>(y_new, t + h);
            k_last = f(landing ? target : t + h, y_new);
        } else {
            const auto& tol = std::get<Rk45Adaptive>(cfg.method);
            const OdeState<N> k2 = f(t + h / 5.0, detail::axpy<N>(y, h, {{1.0 / 5.0, &k1}}));
            const OdeState<N> k3 =
                f(t + 3.0 * h / 10.0, detail::axpy<N>(y, h, {{3.0 / 40.0, &k1}, {9.0 / 40.0, &k2}}));
            const OdeState<N> k4 = f(t + 4.0 * h / 5.0,
                                     detail::axpy<N>(y, h,
                                                     {{44.0 / 45.0, &k1},
                                                      {-56.0 / 15.0, &k2},
                                                      {32.0 / 9.0, &k3}}));
            const OdeState<N> k5 = f(t + 8.0 * h / 9.0,
                                     detail::axpy<N>(y, h,
                                                     {{19372.0 / 6561.0, &k1},
                                                      {-25360.0 / 2187.0, &k2},
                                                      {64448.0 / 6561.0, &k3},
                                                      {-212.0 / 729.0, &k4}}));
            const OdeState<N> k6 = f(t + h, detail::axpy<N>(y, h,
                                                            {{9017.0 / 3168.0, &k1},
                                                             {-355.0 / 33.0, &k2},
                                                             {46732.0 / 5247.0, &k3},
                                                             {49.0 / 176.0, &k4},
                                                             {-5103.0 / 18656.0, &k5}}));
            y_new = detail::axpy<N>(y, h,
                                    {{35.0 / 384.0, &k1},
                                     {500.0 / 1113.0, &k3},
                                     {125.0 / 192.0, &k4},
                                     {-2187.0 / 6784.0, &k5},
                                     {11.0 / 84.0, &k6}});
            bool finite = true;
            for (double v : y_new) {
                finite = finite && std::isfinite(v);
            }
            OdeState<N> k7{};
            double err = std::numeric_limits<double>::infinity();
            if (finite) {
                k7 = f(t + h, y_new);
                OdeState<N> e = detail::axpy<N>(OdeState<N>{}, h,
                                                {{71.0 / 57600.0, &k1},
                                                 {-71.0 / 16695.0, &k3},
                                                 {71.0 / 1920.0, &k4},
                                                 {-17253.0 / 339200.0, &k5},
                                                 {22.0 / 525.0, &k6},
                                                 {-1.0 / 40.0, &k7}});
                err = detail::scaled_rms<N>(e, y, y_new, tol);
            }
            if (!(err <= 1.0)) {
                ++sol.rejected;
                if (++consecutive_rejections > cfg.max_consecutive_rejections) {
                    throw StepRejectionLimit("too many consecutive step rejections at t = " +
                                             std::to_string(t));
                }
                const double shrink = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
                dt = h * shrink;
                if (dt < 1e-15 * std::max(1.0, std::abs(t))) {
                    throw StepRejectionLimit("step size underflow at t = " + std::to_string(t));
                }
                continue;
            }
            consecutive_rejections = 0;
            const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            const double proposal = std::min(h * grow, tol.dt_max);
            dt = landing ? std::max(dt, proposal) : proposal;
            dt = std::min(dt, tol.dt_max);
            k_last = k7;
        }

        ++sol.accepted;
        t = landing ? target : t + h;
        y = y_new;
        k1 = k_last;
        ++since_record;

        const bool at_end = t >= cfg.t1 - eps;
        bool record = false;
        if (cfg.record_interval > 0.0) {
            record = landing;
            if (landing) {
                ++record_index;
            }
        } else {
            record = since_record >= cfg.record_stride || at_end;
        }
        if (record || at_end) {
            if (sol.t.back() < t) {
                sol.t.push_back(t);
                sol.y.push_back(y);
                if (observe) {
                    observe(t, y);
                }
            }
            since_record = 0;
        }
    }
    return sol;
}

} // namespace steer
