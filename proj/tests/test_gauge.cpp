#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "steer/errors.hpp"
#include "steer/gauge.hpp"

using namespace steer;

namespace {

std::vector<oracle::spinor> ground_loop(const FrameHistory& h, std::mt19937_64& rng) {
    // random per-sample phases must not matter to the holonomy
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<oracle::spinor> out;
    for (std::size_t i = 0; i + 1 < h.size(); ++i) {
        const cplx ph = std::polar(1.0, u(rng));
        out.push_back({ph * h.eigen[i].ground(0), ph * h.eigen[i].ground(1)});
    }
    return out;
}

ControlPath retrace(double theta, double amplitude_phi, double period, std::size_t n) {
    std::vector<double> t;
    std::vector<Vec3> b;
    for (std::size_t i = 0; i <= n; ++i) {
        const double s = period * static_cast<double>(i) / static_cast<double>(n);
        const double sn = std::sin(oracle::pi * s / period);
        const double phi = amplitude_phi * sn * sn;
        t.push_back(s);
        b.emplace_back(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
    }
    return ControlPath::sampled(t, b, pauli::sigma_x());
}

} // namespace

TEST_SUITE("gauge") {

TEST_CASE("apply_phase") {
    const WElements w{0.05, -0.05, cplx(0.05, 0.0)};
    const WElements same = apply_phase(w, 0.0, 0.0, 0.0, 0.0);
    CHECK(same.gg == w.gg);
    CHECK(same.ge == w.ge);
    const WElements opt = apply_phase(w, 0.1, 0.2, -w.gg, -w.ee);
    CHECK(opt.gg == 0.0);
    CHECK(opt.ee == 0.0);
    const WElements flip = apply_phase(w, 0.0, oracle::pi, 0.0, 0.0);
    CHECK(std::abs(flip.ge - cplx(-0.05, 0.0)) < 1e-16);
    CHECK(flip.eg() == std::conj(flip.ge));
}

TEST_CASE("hs_norm") {
    CHECK(hs_norm(WElements{}) == 0.0);
    CHECK(hs_norm(WElements{0.05, -0.05, cplx(0.0, 0.05)}) == doctest::Approx(0.1));
    CHECK(hs_norm(WElements{0.0, 0.0, cplx(0.0, 0.05)}) == doctest::Approx(std::sqrt(2.0) * 0.05));
}

TEST_CASE("optimal schedule on the right-angle cone") {
    const ControlPath p = ControlPath::rotating_cone(1.0, oracle::pi / 2, 0.1, pauli::sigma_x());
    const FrameHistory h = sample_history(p, 0.0, p.duration(), 400);
    const PhaseSchedule s = optimal_schedule(h, 0.25, -0.5);
    CHECK(s.lambda_g0() == 0.25);
    CHECK(s.lambda_e0() == -0.5);
    for (double t : {0.0, 3.3, 20.0, 41.7, p.duration()}) {
        CHECK(s.lambda_g(t) == doctest::Approx(0.25 + 0.05 * t).epsilon(1e-12));
        CHECK(s.lambda_e(t) == doctest::Approx(-0.5 - 0.05 * t).epsilon(1e-12));
        CHECK(s.rate_g(t) == doctest::Approx(0.05).epsilon(1e-12));
    }
}

TEST_CASE("schedule of a path with no diagonal w stays constant") {
    // a sweep in the x-z plane has real eigenvectors, so w_gg = 0
    const ControlPath p = ControlPath::linear_sweep(0.4, 1.0, 10.0, pauli::sigma_x());
    const PhaseSchedule s = optimal_schedule(sample_history(p, 0.0, 10.0, 64), 0.7);
    for (double v : s.lambda_g_values()) {
        CHECK(v == doctest::Approx(0.7).epsilon(1e-15));
    }
}

TEST_CASE("scheduled diagonals vanish and the norm is minimal") {
    std::mt19937_64 rng(99);
    const ControlPath p = ControlPath::rotating_cone(1.0, 1.0, 0.05, pauli::sigma_y());
    const FrameHistory h = sample_history(p, 0.0, p.duration(), 256);
    const PhaseSchedule s = optimal_schedule(h);
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double t = h.t[i];
        const WElements opt = apply_phase(h.frames[i].w, s.lambda_g(t), s.lambda_e(t), s.rate_g(t), s.rate_e(t));
        CHECK(std::abs(opt.gg) < 1e-10);
        CHECK(std::abs(opt.ee) < 1e-10);
        CHECK(std::abs(opt.ge) == doctest::Approx(std::abs(h.frames[i].w.ge)).epsilon(1e-14));
    }
    for (int trial = 0; trial < 20; ++trial) {
        const oracle::SmoothPhase mg(rng, p.duration());
        const oracle::SmoothPhase me(rng, p.duration());
        for (std::size_t i = 0; i < h.size(); ++i) {
            const double t = h.t[i];
            const WElements w = h.frames[i].w;
            const WElements opt = apply_phase(w, s.lambda_g(t), s.lambda_e(t), s.rate_g(t), s.rate_e(t));
            const WElements alt = apply_phase(w, mg.value(t), me.value(t), mg.rate(t), me.rate(t));
            CHECK(hs_norm(alt) >= hs_norm(opt));
        }
    }
}

TEST_CASE("phase-shifted frame") {
    const ControlPath p = ControlPath::rotating_cone(1.0, 1.0, 0.05, pauli::sigma_x());
    const AdiabaticFrame raw = frame_at(p, 10.0);
    const AdiabaticFrame f = phase_shifted_frame(raw, 0.4, 1.1);
    CHECK(f.w.gg == 0.0);
    CHECK(f.w.ee == 0.0);
    CHECK(std::abs(f.m2) == doctest::Approx(std::abs(raw.m2)).epsilon(1e-15));
    CHECK(std::abs(f.w.ge) == doctest::Approx(std::abs(raw.w.ge)).epsilon(1e-15));
    CHECK(std::abs(f.w.ge - std::polar(1.0, 0.7) * raw.w.ge) < 1e-16);
    CHECK(f.m1 == raw.m1);
    CHECK(f.omega01 == raw.omega01);
    CHECK(f.alpha == doctest::Approx(std::sqrt(2.0) * std::abs(raw.w.ge) / raw.omega01).epsilon(1e-14));
}

TEST_CASE("Berry phase of cone loops against the solid angle and the holonomy") {
    std::mt19937_64 rng(6);
    for (double th : {0.3, oracle::pi / 3, oracle::pi / 2, 2.0}) {
        const ControlPath p = ControlPath::rotating_cone(1.0, th, 0.02, pauli::sigma_x());
        const FrameHistory h = sample_history(p, 0.0, p.duration(), 2048);
        const BerryPhases b = berry_phase(h);
        const double solid = oracle::pi * (1.0 - std::cos(th));
        CHECK(b.ground == doctest::Approx(solid).epsilon(1e-10));
        CHECK(b.excited == doctest::Approx(-solid).epsilon(1e-10));
        CHECK(oracle::angle_gap(b.ground, oracle::holonomy(ground_loop(h, rng))) < 1e-5);
        CHECK(b.ground_mod >= 0.0);
        CHECK(b.ground_mod < 2 * oracle::pi);
    }
}

TEST_CASE("Berry phase of a static loop is zero") {
    const ControlPath p = ControlPath::rotating_cone(1.0, 0.0, 0.1, pauli::sigma_x());
    const BerryPhases b = berry_phase(sample_history(p, 0.0, p.duration(), 64));
    CHECK(std::abs(b.ground) < 1e-14);
    CHECK(std::abs(b.excited) < 1e-14);
}

TEST_CASE("loops add and retraced loops cancel") {
    const ControlPath once = ControlPath::rotating_cone(1.0, 1.2, 0.05, pauli::sigma_x(), 1.0);
    const ControlPath twice = ControlPath::rotating_cone(1.0, 1.2, 0.05, pauli::sigma_x(), 2.0);
    const BerryPhases a = berry_phase(sample_history(once, 0.0, once.duration(), 1024));
    const BerryPhases b = berry_phase(sample_history(twice, 0.0, twice.duration(), 2048));
    CHECK(b.ground == doctest::Approx(2.0 * a.ground).epsilon(1e-10));

    const ControlPath back = retrace(1.1, 2.0, 50.0, 400);
    const BerryPhases r = berry_phase(sample_history(back, 0.0, back.duration(), 1000));
    CHECK(std::abs(r.ground) < 1e-9);
    CHECK(std::abs(r.excited) < 1e-9);
}

TEST_CASE("Berry phase does not depend on the local gauge") {
    std::mt19937_64 rng(42);
    const ControlPath p = ControlPath::rotating_cone(1.0, 0.8, 0.05, pauli::sigma_x());
    const BerryPhases plain = berry_phase(sample_history(p, 0.0, p.duration(), 2048));
    for (int trial = 0; trial < 5; ++trial) {
        // includes a secular drift, so the gauge is not single valued around the loop
        const oracle::SmoothPhase beta(rng, p.duration());
        FrameOptions o;
        o.gauge.ground = {[beta](double t) { return beta.value(t) + 0.01 * t; },
                          [beta](double t) { return beta.rate(t) + 0.01; }};
        const FrameHistory h = sample_history(p, 0.0, p.duration(), 2048, o);
        const BerryPhases b = berry_phase(h);
        CHECK(b.ground == doctest::Approx(plain.ground).epsilon(1e-5));
        CHECK(b.excited == doctest::Approx(plain.excited).epsilon(1e-12));
        CHECK(b.quadrature_error < 1e-4);
    }
}

TEST_CASE("schedule errors and resampling") {
    const ControlPath open = ControlPath::rotating_cone(1.0, 1.0, 0.05, pauli::sigma_x());
    CHECK_THROWS_AS(berry_phase(sample_history(open, 0.0, 0.5 * open.duration(), 64)), LoopNotClosed);

    FrameHistory tiny = sample_history(open, 0.0, 1.0, 1);
    tiny.t.pop_back();
    tiny.frames.pop_back();
    CHECK_THROWS_AS(optimal_schedule(tiny), NonUniformGridUnsupported);

    // a non-uniform history is resampled before quadrature
    const ControlPath p = ControlPath::rotating_cone(1.0, oracle::pi / 2, 0.1, pauli::sigma_x());
    FrameHistory h;
    for (int i = 0; i <= 200; ++i) {
        const double x = static_cast<double>(i) / 200.0;
        const double t = p.duration() * x * x;
        h.t.push_back(t);
        h.frames.push_back(frame_at(p, t));
        h.eigen.push_back(eigensystem(p, t));
        h.field.push_back(p.field(t));
    }
    const PhaseSchedule s = optimal_schedule(h);
    CHECK(s.lambda_g_values().back() == doctest::Approx(0.05 * p.duration()).epsilon(1e-10));
}

}
