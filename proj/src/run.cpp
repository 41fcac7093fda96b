#include "steer/run.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "steer/errors.hpp"
#include "steer/gauge.hpp"

#ifndef STEER_VERSION
#define STEER_VERSION "0.0.0"
#endif

namespace steer {

using nlohmann::json;

namespace {

std::string utc_stamp(std::chrono::system_clock::time_point now) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
    return out.str();
}

std::filesystem::path make_run_dir(const std::filesystem::path& root, const std::string& stem) {
    std::filesystem::create_directories(root);
    std::filesystem::path dir = root / stem;
    for (int i = 1; std::filesystem::exists(dir); ++i) {
        dir = root / (stem + "-" + std::to_string(i));
    }
    std::filesystem::create_directory(dir);
    return dir;
}

double positivity_violation(const TrajectoryDiagnostics& d) {
    return std::max({0.0, d.max_purity_excess, -d.min_rho_gg, d.max_rho_gg - 1.0});
}

// Result of one trajectory sub-run.
struct Leg {
    Leg(std::string l, std::string f) : label(std::move(l)), file(std::move(f)) {}

    std::string label;
    std::string file;
    bool ok = false;
    std::string error;
    Trajectory trajectory;
    double trace_residual = 0.0;
};

void run_leg(const Scenario& sc, const std::filesystem::path& dir, Leg& leg) {
    std::ofstream csv(dir / leg.file);
    if (!csv) {
        leg.error = "cannot write " + leg.file;
        return;
    }
    write_trajectory_header(csv);
    SimulationOptions options = sc.options;
    double trace = 0.0;
    options.on_sample = [&](const TrajectorySample& s) {
        write_trajectory_row(csv, s);
        trace = std::max(trace, std::abs(s.state.rho_gg + s.state.rho_ee() - 1.0));
    };
    try {
        const ControlPath path = sc.build_path();
        leg.trajectory = simulate(path, sc.bath, sc.initial, sc.solver_for_path(), options);
        leg.ok = true;
    } catch (const std::exception& e) {
        leg.error = e.what();
    }
    leg.trace_residual = trace;
    csv.flush();
}

// Runs tasks 0..n-1 on up to `jobs` threads.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& task) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, jobs), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            task(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (std::size_t i = next++; i < n; i = next++) {
                task(i);
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
}

json leg_json(const Leg& leg) {
    const auto& d = leg.trajectory.diagnostics;
    json j = {{"label", leg.label}, {"file", leg.file}, {"status", leg.ok ? "ok" : "failed"}};
    if (!leg.ok) {
        j["error"] = leg.error;
    }
    j["samples"] = leg.trajectory.samples.size();
    j["accepted_steps"] = d.accepted_steps;
    j["rejected_steps"] = d.rejected_steps;
    j["positivity_warnings"] = d.positivity_warnings;
    j["warnings"] = d.warnings;
    return j;
}

std::string number(double x) {
    std::ostringstream out;
    out << std::setprecision(17) << x;
    return out.str();
}

} // namespace

std::string tool_version() { return STEER_VERSION; }

RunResult run_scenario(const Scenario& sc, const RunOptions& options) {
    const auto started = std::chrono::system_clock::now();
    const auto clock0 = std::chrono::steady_clock::now();

    RunResult result;
    result.directory = make_run_dir(options.out_root, utc_stamp(started) + "-" + sc.hash());
    const auto& dir = result.directory;

    std::vector<Leg> legs;
    std::vector<Scenario> subs;
    json extra;

    switch (sc.mode) {
    case RunMode::simulate:
        subs.push_back(sc);
        legs.push_back({"simulate", "trajectory.csv"});
        break;
    case RunMode::sweep:
        subs = sc.expand();
        for (std::size_t i = 0; i < subs.size(); ++i) {
            legs.push_back({"period=" + number(sc.sweep_periods[i]),
                            "trajectory_period_" + std::to_string(i) + ".csv"});
        }
        break;
    case RunMode::compare:
        for (Equation e : sc.compare_equations) {
            Scenario sub = sc;
            sub.mode = RunMode::simulate;
            sub.options.equation = e;
            subs.push_back(std::move(sub));
            legs.push_back({to_string(e), "trajectory_" + to_string(e) + ".csv"});
        }
        break;
    case RunMode::berry:
        break;
    }

    parallel_for(legs.size(), options.jobs, [&](std::size_t i) { run_leg(subs[i], dir, legs[i]); });

    double trace_residual = 0.0;
    double positivity_max = 0.0;
    double alpha_max = 0.0;
    for (const auto& leg : legs) {
        trace_residual = std::max(trace_residual, leg.trace_residual);
        positivity_max = std::max(positivity_max, positivity_violation(leg.trajectory.diagnostics));
        alpha_max = std::max(alpha_max, leg.trajectory.diagnostics.max_alpha);
        if (!leg.ok) {
            result.failures.push_back(leg.label + ": " + leg.error);
        }
    }

    auto final_state = [](const Leg& leg) {
        return leg.trajectory.samples.empty() ? DensityState{std::nan(""), cplx(std::nan(""), std::nan(""))}
                                              : leg.trajectory.samples.back().state;
    };

    if (sc.mode == RunMode::sweep) {
        std::ofstream out(dir / "summary.csv");
        out << "period,final_rho_gg,max_excited_population,max_positivity_violation,max_alpha,status\n";
        for (std::size_t i = 0; i < legs.size(); ++i) {
            const auto& d = legs[i].trajectory.diagnostics;
            out << number(sc.sweep_periods[i]) << ',' << number(final_state(legs[i]).rho_gg) << ','
                << number(d.max_excited_population) << ',' << number(positivity_violation(d)) << ','
                << number(d.max_alpha) << ',' << (legs[i].ok ? "ok" : "failed") << '\n';
        }
    } else if (sc.mode == RunMode::compare) {
        std::ofstream out(dir / "summary.csv");
        out << "equation,final_rho_gg,final_re_rho_ge,final_im_rho_ge,final_rho_gg_minus_reference,"
               "max_excited_population,max_positivity_violation,max_alpha,status\n";
        const double reference = legs.empty() ? 0.0 : final_state(legs.front()).rho_gg;
        for (const auto& leg : legs) {
            const auto& d = leg.trajectory.diagnostics;
            const DensityState s = final_state(leg);
            out << leg.label << ',' << number(s.rho_gg) << ',' << number(s.rho_ge.real()) << ','
                << number(s.rho_ge.imag()) << ',' << number(s.rho_gg - reference) << ','
                << number(d.max_excited_population) << ',' << number(positivity_violation(d)) << ','
                << number(d.max_alpha) << ',' << (leg.ok ? "ok" : "failed") << '\n';
        }
        extra["reference_equation"] = legs.empty() ? "" : legs.front().label;
    } else if (sc.mode == RunMode::berry) {
        std::vector<BerryPhases> phases(sc.berry_polar_angles.size());
        std::vector<std::string> errors(phases.size());
        parallel_for(phases.size(), options.jobs, [&](std::size_t i) {
            try {
                PathSpec spec = sc.path;
                spec.polar_angle = sc.berry_polar_angles[i];
                const ControlPath loop = ControlPath::rotating_cone(spec.amplitude, spec.polar_angle,
                                                                    spec.angular_frequency, sc.coupling, 1.0);
                const FrameHistory h = sample_history(loop, 0.0, loop.duration(), sc.berry_samples,
                                                      sc.options.frame);
                phases[i] = berry_phase(h);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        });
        std::ofstream out(dir / "berry.csv");
        out << "polar_angle_rad,dlambda_g,dlambda_e,dlambda_g_mod_2pi,dlambda_e_mod_2pi,quadrature_error,status\n";
        json berry_runs = json::array();
        for (std::size_t i = 0; i < phases.size(); ++i) {
            const bool ok = errors[i].empty();
            const auto& p = phases[i];
            out << number(sc.berry_polar_angles[i]) << ',' << number(p.ground) << ',' << number(p.excited)
                << ',' << number(p.ground_mod) << ',' << number(p.excited_mod) << ','
                << number(p.quadrature_error) << ',' << (ok ? "ok" : "failed") << '\n';
            json j = {{"polar_angle_rad", sc.berry_polar_angles[i]}, {"status", ok ? "ok" : "failed"}};
            if (!ok) {
                j["error"] = errors[i];
                result.failures.push_back("polar_angle=" + number(sc.berry_polar_angles[i]) + ": " + errors[i]);
            }
            berry_runs.push_back(j);
        }
        extra["loops"] = berry_runs;
    }

    result.ok = result.failures.empty();
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock0).count();

    json legs_json = json::array();
    for (const auto& leg : legs) {
        legs_json.push_back(leg_json(leg));
    }
    result.metadata = {
        {"tool", "steer"},
        {"version", tool_version()},
        {"mode", to_string(sc.mode)},
        {"scenario_hash", sc.hash()},
        {"scenario", sc.canonical},
        {"started_utc", utc_stamp(started)},
        {"wall_time_s", wall},
        {"jobs", options.jobs},
        {"seed", options.seed},
        {"status", result.ok ? "ok" : "failed"},
        {"failures", result.failures},
        {"invariants", {{"trace_residual_max", trace_residual},
                        {"positivity_violation_max", positivity_max},
                        {"alpha_max", alpha_max}}},
        {"runs", legs_json},
    };
    if (!extra.is_null()) {
        result.metadata["details"] = extra;
    }
    std::ofstream meta(dir / "metadata.json");
    meta << result.metadata.dump(2) << '\n';
    return result;
}

} // namespace steer
