#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "steer/errors.hpp"
#include "steer/run.hpp"
#include "steer/scenario.hpp"

using namespace steer;

namespace {

const char* kMinimal = R"({"path": {"kind": "rotating_cone", "omega_rad_per_time": 0.1}})";

std::vector<std::string> issues_of(const std::string& text) {
    try {
        load_scenario(text);
    } catch (const ValidationError& e) {
        return e.issues();
    }
    return {};
}

bool mentions(const std::vector<std::string>& issues, const std::string& field) {
    for (const auto& i : issues) {
        if (i.find(field) != std::string::npos) {
            return true;
        }
    }
    return false;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace

TEST_SUITE("scenario") {

TEST_CASE("minimal config gets defaults") {
    const Scenario sc = load_scenario(kMinimal);
    CHECK(sc.mode == RunMode::simulate);
    CHECK(sc.path.amplitude == 1.0);
    CHECK(sc.options.equation == Equation::full);
    CHECK(std::holds_alternative<Rk45Adaptive>(sc.solver.method));
    CHECK(std::get<Rk45Adaptive>(sc.solver.method).rtol == 1e-9);
    CHECK(sc.initial.rho_gg == 1.0);
    CHECK(sc.solver_for_path().t1 == doctest::Approx(2 * kPi / 0.1));
    CHECK(sc.hash().size() == 16);
}

TEST_CASE("hash follows the canonical form, not the spelling") {
    const Scenario a = load_scenario(kMinimal);
    const Scenario b = load_scenario(R"({ "coupling": "sigma_x",
        "path": {"omega_rad_per_time": 0.1, "kind": "rotating_cone", "amplitude_energy": 1.0}})");
    CHECK(a.hash() == b.hash());
    const Scenario c = load_scenario(R"({"path": {"kind": "rotating_cone", "omega_rad_per_time": 0.2}})");
    CHECK(a.hash() != c.hash());
}

TEST_CASE("errors are aggregated and name the field") {
    const auto issues = issues_of(R"({
        "path": {"kind": "rotating_cone", "amplitude_energy": -1},
        "bath": {"model": "ohmic_thermal", "temperature_energy": -0.5},
        "solver": {"method": "rk45", "rtol": 0},
        "surprise": 1})");
    CHECK(issues.size() >= 4);
    CHECK(mentions(issues, "path.amplitude_energy"));
    CHECK(mentions(issues, "bath.temperature_energy"));
    CHECK(mentions(issues, "solver.rtol"));
    CHECK(mentions(issues, "scenario.surprise"));
}

TEST_CASE("malformed text is a parse error") {
    CHECK_THROWS_AS(load_scenario("{\"path\": "), ParseError);
}

TEST_CASE("sweep expands into one scenario per period") {
    const Scenario sc = load_scenario(R"({"mode": "sweep",
        "path": {"kind": "rotating_cone", "omega_rad_per_time": 0.1},
        "sweep": {"periods_time": [10, 20, 30, 40, 50, 60, 70, 80]}})");
    const auto subs = sc.expand();
    REQUIRE(subs.size() == 8);
    for (std::size_t i = 0; i < subs.size(); ++i) {
        CHECK(subs[i].mode == RunMode::simulate);
        CHECK(subs[i].build_path().duration() == doctest::Approx(10.0 * (i + 1)));
    }
    CHECK(subs[0].hash() != subs[1].hash());
    CHECK(issues_of(R"({"mode": "sweep", "path": {"kind": "rotating_cone"}})").size() == 1);
}

TEST_CASE("mode override and mode-specific checks") {
    const Scenario sc = load_scenario(kMinimal, ".", RunMode::compare);
    CHECK(sc.mode == RunMode::compare);
    CHECK(sc.compare_equations.size() == 3);
    CHECK_THROWS_AS(load_scenario(R"({"path": {"kind": "linear_sweep"}, "berry": {"polar_angles_rad": [1]}})", ".",
                                  RunMode::berry),
                    ValidationError);
}

TEST_CASE("sampled and tabulated data inline or from CSV") {
    TempDir dir("steer_scenario_csv");
    {
        std::ofstream f(dir.path / "field.csv");
        f << "t,b_x,b_y,b_z\n";
        for (int i = 0; i <= 20; ++i) {
            f << i << ",1," << 0.01 * i << ",0.2\n";
        }
        std::ofstream s(dir.path / "spectrum.csv");
        s << "omega,S\n-3,0.1\n0,0.5\n3,1.0\n";
        std::ofstream c(dir.path / "config.json");
        c << R"({"path": {"kind": "sampled", "csv": "field.csv"},
                 "bath": {"model": "tabulated", "csv": "spectrum.csv"}})";
    }
    const Scenario sc = load_scenario_file(dir.path / "config.json");
    CHECK(sc.build_path().duration() == doctest::Approx(20.0));
    CHECK(sc.bath(0.0) == doctest::Approx(0.5));

    const Scenario inline_sc = load_scenario(R"({"path": {"kind": "sampled",
        "times_time": [0, 1, 2, 3], "fields_energy": [[1,0,0],[1,0.1,0],[1,0.2,0],[1,0.3,0]]}})");
    CHECK(inline_sc.path.times.size() == 4);
    CHECK(mentions(issues_of(R"({"path": {"kind": "sampled", "csv": "missing.csv"}})"), "path.csv"));
}

TEST_CASE("custom coupling must be Hermitian") {
    CHECK(load_scenario(R"({"coupling": {"re": [[1, 0.5], [0.5, -1]], "im": [[0, 0.2], [-0.2, 0]]}})").coupling(0, 1) ==
          cplx(0.5, 0.2));
    CHECK(mentions(issues_of(R"({"coupling": {"re": [[1, 0.5], [0.2, -1]]}})"), "Hermitian"));
}

}

TEST_SUITE("run") {

TEST_CASE("simulate writes a trajectory and metadata with invariants") {
    TempDir dir("steer_run_simulate");
    const Scenario sc = load_scenario(R"({"path": {"kind": "rotating_cone", "omega_rad_per_time": 0.2},
        "bath": {"model": "ohmic_thermal", "eta": 0.05, "temperature_energy": 0.5}})");
    RunOptions o;
    o.out_root = dir.path;
    const RunResult r = run_scenario(sc, o);
    CHECK(r.ok);
    CHECK(r.directory.filename().string().find(sc.hash()) != std::string::npos);
    CHECK(std::filesystem::exists(r.directory / "trajectory.csv"));
    const auto meta = nlohmann::json::parse(slurp(r.directory / "metadata.json"));
    CHECK(meta["status"] == "ok");
    CHECK(meta["version"] == tool_version());
    CHECK(meta["invariants"].contains("trace_residual_max"));
    CHECK(meta["invariants"].contains("positivity_violation_max"));
    CHECK(meta["invariants"]["alpha_max"].get<double>() > 0.0);
    CHECK(meta["scenario"] == sc.canonical);
}

TEST_CASE("sweep payloads are deterministic regardless of jobs") {
    TempDir dir("steer_run_sweep");
    const Scenario sc = load_scenario(R"({"mode": "sweep",
        "path": {"kind": "rotating_cone", "omega_rad_per_time": 0.2},
        "bath": {"model": "zero_temperature_ohmic", "eta": 0.05},
        "sweep": {"periods_time": [20, 30, 40, 50]}})");
    RunOptions serial;
    serial.out_root = dir.path;
    RunOptions parallel = serial;
    parallel.jobs = 4;
    const RunResult a = run_scenario(sc, serial);
    const RunResult b = run_scenario(sc, parallel);
    REQUIRE(a.ok);
    REQUIRE(b.ok);
    CHECK(a.directory != b.directory);
    for (const char* f : {"summary.csv", "trajectory_period_0.csv", "trajectory_period_3.csv"}) {
        CHECK(slurp(a.directory / f) == slurp(b.directory / f));
    }
    std::istringstream summary(slurp(a.directory / "summary.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(summary, line)) {
        ++rows;
    }
    CHECK(rows == 5);
}

TEST_CASE("compare and berry outputs") {
    TempDir dir("steer_run_compare");
    RunOptions o;
    o.out_root = dir.path;
    const Scenario cmp = load_scenario(R"({"mode": "compare",
        "path": {"kind": "rotating_cone", "omega_rad_per_time": 0.2},
        "bath": {"model": "flat", "level_rate": 0.01}})");
    const RunResult c = run_scenario(cmp, o);
    CHECK(c.ok);
    for (const char* f : {"trajectory_full.csv", "trajectory_secular.csv", "trajectory_nonsteered.csv", "summary.csv"}) {
        CHECK(std::filesystem::exists(c.directory / f));
    }

    const Scenario berry = load_scenario(R"({"mode": "berry",
        "path": {"kind": "rotating_cone", "omega_rad_per_time": 0.1},
        "berry": {"polar_angles_rad": [0.2, 0.6, 1.0, 1.4, 1.8], "samples_per_loop": 256}})");
    const RunResult b = run_scenario(berry, o);
    CHECK(b.ok);
    std::istringstream csv(slurp(b.directory / "berry.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(csv, line)) {
        ++rows;
    }
    CHECK(rows == 6);
}

TEST_CASE("a failing run keeps partial output and is marked failed") {
    TempDir dir("steer_run_fail");
    // alpha above one: valid configuration, but the steered equation refuses it
    const Scenario sc = load_scenario(R"({"path": {"kind": "rotating_cone", "omega_rad_per_time": 1.5}})");
    RunOptions o;
    o.out_root = dir.path;
    const RunResult r = run_scenario(sc, o);
    CHECK_FALSE(r.ok);
    CHECK(std::filesystem::exists(r.directory / "trajectory.csv"));
    const auto meta = nlohmann::json::parse(slurp(r.directory / "metadata.json"));
    CHECK(meta["status"] == "failed");
    CHECK(meta["runs"][0]["status"] == "failed");
    CHECK(slurp(r.directory / "trajectory.csv").rfind("t,rho_gg", 0) == 0);
}

}
