#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "steer/dynamics.hpp"
#include "steer/errors.hpp"
#include "steer/gauge.hpp"

using namespace steer;

namespace {

AdiabaticFrame bare_frame(double omega01, double m1, cplx m2) {
    AdiabaticFrame f;
    f.omega01 = omega01;
    f.m1 = m1;
    f.m2 = m2;
    return f;
}

DensityState random_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double gg = u(rng);
    return {gg, std::polar(std::sqrt(gg * (1 - gg)) * u(rng), 6.283 * u(rng))};
}

SpectralDensity random_spectrum(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    switch (static_cast<int>(4 * u(rng))) {
    case 0:
        return SpectralDensity(FlatSpectrum{u(rng)});
    case 1:
        return SpectralDensity(ZeroTemperatureOhmic{u(rng), 1.0 + 5 * u(rng)});
    default:
        return SpectralDensity(OhmicThermal{u(rng), 0.1 + u(rng), 1.0 + 5 * u(rng)});
    }
}

ControlPath still(double gap, Mat2 coupling, double duration) {
    return ControlPath::linear_sweep(0.0, gap, duration, coupling);
}

} // namespace

TEST_SUITE("dynamics") {

TEST_CASE("non-steered equation by substitution") {
    const Derivative p = rhs_nonsteered(DensityState{0.3, 1.0}, RateSet{}, 2.0);
    CHECK(p.d_rho_gg == 0.0);
    CHECK(p.d_rho_ge == cplx(0.0, 2.0));

    const RateSet r = rates(0.0, 1.0, 1.0, SpectralDensity(FlatSpectrum{1.0}));
    const Derivative d = rhs_nonsteered(DensityState{2.0 / 3.0, 0.0}, r, 1.0);
    CHECK(d.d_rho_gg == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("thermal fixed point from an independent linear solve") {
    const SpectralDensity sd(TabulatedSpectrum{{-2.0, -1.0, 0.0, 1.0, 2.0}, {0.5, 1.0, 1.5, 2.0, 2.5}});
    const double expected = oracle::thermal_population(2.0, 1.0);
    CHECK(expected == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    const RateSet r = rates(0.0, 1.0, 1.0, sd);
    const Derivative d = rhs_nonsteered(DensityState{expected, 0.0}, r, 1.0);
    CHECK(std::abs(d.d_rho_gg) < 1e-15);
    CHECK(std::abs(d.d_rho_ge) < 1e-15);
}

TEST_CASE("full equation reduces to the non-steered one without steering") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const AdiabaticFrame f = bare_frame(0.2 + std::abs(u(rng)), u(rng), cplx(u(rng), u(rng)));
        const SpectralDensity sd = random_spectrum(rng);
        const DensityState s = random_state(rng);
        const Derivative a = rhs_full(s, f, sd);
        const Derivative b = rhs_nonsteered(s, rates(f.m1, f.m2, f.omega01, sd), f.omega01);
        CHECK(std::abs(a.d_rho_gg - b.d_rho_gg) < 1e-14);
        CHECK(std::abs(a.d_rho_ge - b.d_rho_ge) < 1e-14);
        const Derivative c = superadiabatic_pullback(s, f, sample_spectrum(sd, f.omega01));
        CHECK(std::abs(c.d_rho_gg - b.d_rho_gg) < 1e-14);
        CHECK(std::abs(c.d_rho_ge - b.d_rho_ge) < 1e-14);
    }
}

TEST_CASE("unitary part of the full equation") {
    AdiabaticFrame f = bare_frame(1.0, 0.2, 0.7);
    f.w.ge = cplx(0.0, 0.05);
    f.alpha = local_alpha(f.w, 1.0);
    const Derivative d = rhs_full(DensityState{1.0, 0.0}, f, SpectralDensity(FlatSpectrum{0.0}));
    CHECK(d.d_rho_gg == 0.0);
    CHECK(std::abs(d.d_rho_ge - cplx(-0.05, 0.0)) < 1e-16);
}

TEST_CASE("oracle without dissipation precesses at the corrected gap") {
    AdiabaticFrame f = bare_frame(1.0, 0.2, 0.7);
    f.w = WElements{0.01, -0.02, 0.0};
    f.alpha = local_alpha(f.w, 1.0);
    const Derivative d = rhs_superadiabatic_oracle(DensityState{0.4, 0.3}, f, SpectralSamples{});
    CHECK(d.d_rho_gg == 0.0);
    CHECK(std::abs(d.d_rho_ge - cplx(0.0, 0.97 * 0.3)) < 1e-15);
}

TEST_CASE("population derivative is real for all variants") {
    // structural: the state stores rho_gg as a real number, so check the derived trace instead
    std::mt19937_64 rng(30);
    const ControlPath p = ControlPath::rotating_cone(1.0, 1.0, 0.03, pauli::sigma_x());
    const SpectralDensity sd(OhmicThermal{0.1, 0.5, 5.0});
    for (Equation e : {Equation::full, Equation::secular, Equation::nonsteered, Equation::superadiabatic}) {
        SimulationOptions o;
        o.equation = e;
        const DensityRhs rhs = make_rhs(sd, o);
        for (int i = 0; i < 20; ++i) {
            const AdiabaticFrame f = frame_at(p, 7.0 * i);
            const Derivative d = rhs(random_state(rng), f, f);
            CHECK(std::isfinite(d.d_rho_gg));
            // d rho_ee = -d rho_gg, so d Tr rho = 0 identically
            CHECK(d.d_rho_gg + (-d.d_rho_gg) == 0.0);
        }
    }
}

TEST_CASE("secular equation") {
    const RateSet r = rates(0.0, 1.0, 1.0, SpectralDensity(FlatSpectrum{1.0}));
    const Derivative d = rhs_secular(DensityState{1.0, 0.0}, r, 1.0);
    CHECK(d.d_rho_gg == doctest::Approx(-1.0));
    const RateSet q = rates(0.5, cplx(0.3, 0.1), 1.0, SpectralDensity(OhmicThermal{0.2, 0.4, kInfiniteCutoff}));
    const Derivative c = rhs_secular(DensityState{0.5, 1.0}, q, 1.0);
    const double decay = (q.gamma_ge + q.gamma_eg) / 2 + q.gamma_phi;
    CHECK(c.d_rho_ge.real() == doctest::Approx(-decay).epsilon(1e-14));
    CHECK(c.d_rho_ge.imag() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("integrate: full revolution of a precessing coherence") {
    const ControlPath p = still(2.0 * oracle::pi, pauli::sigma_z(), 1.0);
    SolverConfig cfg;
    cfg.t1 = 1.0;
    const Trajectory tr = simulate(p, SpectralDensity(FlatSpectrum{0.0}), DensityState{0.5, 0.5}, cfg,
                                   SimulationOptions{Equation::nonsteered});
    CHECK(std::abs(tr.samples.back().state.rho_ge - cplx(0.5)) < 1e-8);
}

TEST_CASE("integrate: zero-temperature decay follows the exponential") {
    // static field along x with sigma_z coupling: m1 = 0, |m2| = 1, S(omega01) = 1
    const ControlPath p = still(1.0, pauli::sigma_z(), 5.0);
    const SpectralDensity sd(ZeroTemperatureOhmic{1.0, kInfiniteCutoff});
    SolverConfig cfg;
    cfg.t1 = 5.0;
    cfg.record_interval = 0.5;
    const Trajectory tr = simulate(p, sd, DensityState{0.0, 0.0}, cfg, SimulationOptions{Equation::nonsteered});
    CHECK(tr.samples.size() == 11);
    for (const auto& s : tr.samples) {
        CHECK(s.state.rho_gg == doctest::Approx(1.0 - std::exp(-s.t)).epsilon(1e-8));
    }
}

TEST_CASE("trajectory times increase and CSV has the documented layout") {
    const ControlPath p = ControlPath::rotating_cone(1.0, 1.0, 0.1, pauli::sigma_x());
    SolverConfig cfg;
    cfg.t1 = p.duration();
    cfg.record_stride = 3;
    const Trajectory tr = simulate(p, SpectralDensity(OhmicThermal{0.05, 0.5, 5.0}), DensityState{}, cfg);
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
        CHECK(tr.samples[i].t > tr.samples[i - 1].t);
    }
    CHECK(tr.samples.back().t == doctest::Approx(p.duration()).epsilon(1e-15));
    std::ostringstream out;
    write_trajectory_csv(out, tr);
    std::istringstream in(out.str());
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "t,rho_gg,re_rho_ge,im_rho_ge,purity,alpha,omega01,lambda_g,lambda_e");
    CHECK(std::count(row.begin(), row.end(), ',') == 8);
    std::getline(in, row);
    const std::string first = row.substr(0, row.find(','));
    CHECK(first.size() >= 15); // 17 significant digits for non-round numbers
}

TEST_CASE("positivity is monitored, not enforced") {
    // a strongly coupled nonsecular run leaves the physical set; warnings must be raised
    const ControlPath p = ControlPath::rotating_cone(1.0, 1.0, 0.3, pauli::sigma_x());
    SolverConfig cfg;
    cfg.t1 = p.duration();
    SimulationOptions o;
    o.positivity_tolerance = 1e-12;
    const Trajectory tr = simulate(p, SpectralDensity(ZeroTemperatureOhmic{0.5, kInfiniteCutoff}),
                                   DensityState{}, cfg, o);
    CHECK(tr.diagnostics.positivity_warnings > 0);
    CHECK_FALSE(tr.diagnostics.warnings.empty());
}

TEST_CASE("steered equation needs alpha below one") {
    AdiabaticFrame f = bare_frame(0.1, 0.0, 1.0);
    f.w.ge = 0.2;
    f.alpha = local_alpha(f.w, f.omega01);
    CHECK_THROWS_AS(rhs_full(DensityState{}, f, SpectralDensity(FlatSpectrum{1.0})), AdiabaticityViolation);
}

TEST_CASE("equation names round trip") {
    for (Equation e : {Equation::full, Equation::secular, Equation::nonsteered, Equation::superadiabatic}) {
        CHECK(equation_from_string(to_string(e)) == e);
    }
    CHECK_THROWS_AS(equation_from_string("lindblad"), ValidationError);
}

TEST_CASE("streamed samples match the returned trajectory") {
    const ControlPath p = ControlPath::rotating_cone(1.0, 1.0, 0.05, pauli::sigma_x());
    SolverConfig cfg;
    cfg.t1 = p.duration();
    SimulationOptions o;
    std::vector<double> seen;
    o.on_sample = [&](const TrajectorySample& s) { seen.push_back(s.t); };
    const Trajectory tr = simulate(p, SpectralDensity(FlatSpectrum{0.01}), DensityState{}, cfg, o);
    REQUIRE(seen.size() == tr.samples.size());
    CHECK(seen.back() == tr.samples.back().t);
}

}
