#include <cmath>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "steer/bath.hpp"
#include "steer/control.hpp"
#include "steer/dynamics.hpp"
#include "steer/errors.hpp"
#include "steer/gauge.hpp"
#include "steer/run.hpp"
#include "steer/scenario.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kRuntime = 2;

struct Common {
    std::string config;
    std::string out = "runs";
    unsigned jobs = 1;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config) {
    auto* opt = cmd->add_option("--config", c.config, "scenario JSON file");
    if (needs_config) {
        opt->required();
    }
    cmd->add_option("--out", c.out, "root directory for run folders")->capture_default_str();
    cmd->add_option("--jobs", c.jobs, "concurrent sub-runs")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--seed", c.seed, "seed for randomized checks (recorded in metadata)")->capture_default_str();
}

void print_issues(const steer::ValidationError& e) {
    std::cerr << "invalid scenario:\n";
    for (const auto& issue : e.issues()) {
        std::cerr << "  " << issue << '\n';
    }
}

int execute(const Common& c, steer::RunMode mode) {
    steer::Scenario sc;
    try {
        sc = steer::load_scenario_file(c.config, mode);
    } catch (const steer::ValidationError& e) {
        print_issues(e);
        return kInvalid;
    } catch (const steer::ParseError& e) {
        std::cerr << e.what() << '\n';
        return kInvalid;
    }
    try {
        steer::RunOptions ro;
        ro.out_root = c.out;
        ro.jobs = c.jobs;
        ro.seed = c.seed;
        ro.version = steer::tool_version();
        const steer::RunResult r = steer::run_scenario(sc, ro);
        std::cout << r.directory.string() << '\n';
        for (const auto& f : r.failures) {
            std::cerr << "failed: " << f << '\n';
        }
        return r.ok ? kOk : kRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
}

// Randomized consistency checks of the core against closed forms.
int spot_checks(std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int failures = 0;
    auto report = [&](const std::string& name, double value, double tol) {
        const bool ok = value < tol;
        failures += ok ? 0 : 1;
        std::cout << (ok ? "ok   " : "FAIL ") << name << "  " << value << " (tol " << tol << ")\n";
    };

    double reduction = 0.0;
    double balance = 0.0;
    double covariance = 0.0;
    for (int i = 0; i < count; ++i) {
        const double theta = 0.1 + 2.9 * u(rng);
        const double omega = 0.005 + 0.05 * u(rng);
        const double amp = 0.5 + u(rng);
        const steer::ControlPath path =
            steer::ControlPath::rotating_cone(amp, theta, omega, steer::pauli::sigma_x());
        const double t = path.duration() * u(rng);
        steer::AdiabaticFrame frame = steer::frame_at(path, t);
        const steer::DensityState s{u(rng), std::polar(0.4 * u(rng), 6.28 * u(rng))};
        const steer::SpectralDensity sd(steer::OhmicThermal{0.1, 0.2 + u(rng), 10.0});

        // w = 0 collapses the steered equation onto the non-steered one
        steer::AdiabaticFrame still = frame;
        still.w = steer::WElements{};
        still.alpha = 0.0;
        const auto a = steer::rhs_full(s, still, sd);
        const auto b = steer::rhs_nonsteered(s, steer::rates(frame.m1, frame.m2, frame.omega01, sd), frame.omega01);
        reduction = std::max({reduction, std::abs(a.d_rho_gg - b.d_rho_gg), std::abs(a.d_rho_ge - b.d_rho_ge)});

        const double temp = 0.2 + u(rng);
        const steer::SpectralDensity th(steer::OhmicThermal{0.1, temp});
        const auto r = steer::rates(frame.m1, frame.m2, frame.omega01, th);
        if (r.gamma_ge > 0.0) {
            balance = std::max(balance, std::abs(r.gamma_eg / r.gamma_ge / std::exp(frame.omega01 / temp) - 1.0));
        }

        // local phases change w only by their rates and a rotation
        const double lg = 6.28 * u(rng);
        const double le = 6.28 * u(rng);
        const steer::WElements shifted = steer::apply_phase(frame.w, lg, le, 0.0, 0.0);
        covariance = std::max(covariance, std::abs(steer::hs_norm(shifted) - steer::hs_norm(frame.w)));
    }
    report("reduction identity", reduction, 1e-14);
    report("detailed balance", balance, 1e-6);
    report("gauge covariance of |w|", covariance, 1e-14);
    return failures == 0 ? kOk : kInvalid;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adiabatically steered open two-level system simulator"};
    app.set_version_flag("--version", steer::tool_version());
    app.require_subcommand(1);

    Common sim;
    Common sweep;
    Common cmp;
    Common berry;
    Common val;
    int checks = 100;
    add_common(app.add_subcommand("simulate", "integrate one trajectory"), sim, true);
    add_common(app.add_subcommand("sweep", "integrate one trajectory per period, concurrently"), sweep, true);
    add_common(app.add_subcommand("compare", "integrate the same scenario with several equations"), cmp, true);
    add_common(app.add_subcommand("berry", "accumulated optimal phases over cone loops"), berry, true);
    auto* validate = app.add_subcommand("validate", "check a scenario file and run randomized spot checks");
    add_common(validate, val, false);
    validate->add_option("--checks", checks, "number of random spot-check samples")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kInvalid;
    }

    if (app.got_subcommand("simulate")) {
        return execute(sim, steer::RunMode::simulate);
    }
    if (app.got_subcommand("sweep")) {
        return execute(sweep, steer::RunMode::sweep);
    }
    if (app.got_subcommand("compare")) {
        return execute(cmp, steer::RunMode::compare);
    }
    if (app.got_subcommand("berry")) {
        return execute(berry, steer::RunMode::berry);
    }

    int status = kOk;
    if (!val.config.empty()) {
        try {
            const steer::Scenario sc = steer::load_scenario_file(val.config);
            std::cout << "ok   scenario " << val.config << " (hash " << sc.hash() << ")\n";
        } catch (const steer::ValidationError& e) {
            print_issues(e);
            status = kInvalid;
        } catch (const steer::ParseError& e) {
            std::cerr << e.what() << '\n';
            status = kInvalid;
        }
    }
    try {
        const int s = spot_checks(val.seed, checks);
        return status != kOk ? status : s;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
}
