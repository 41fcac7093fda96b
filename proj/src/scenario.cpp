#include "steer/scenario.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "steer/errors.hpp"

namespace steer {

using nlohmann::json;

namespace {

// Reads one JSON object, collecting problems instead of stopping at the first.
class FieldReader {
public:
    FieldReader(const json& obj, std::string prefix, std::vector<std::string>& issues)
        : obj_(obj), prefix_(std::move(prefix)), issues_(issues) {
        if (!obj_.is_object()) {
            issues_.push_back(prefix_ + ": expected an object");
        }
    }

    bool has(const std::string& key) const { return obj_.is_object() && obj_.contains(key); }

    std::string name(const std::string& key) const { return prefix_ + "." + key; }

    void fail(const std::string& key, const std::string& what) { issues_.push_back(name(key) + ": " + what); }

    double number(const std::string& key, double fallback,
                  const std::function<bool(double)>& valid = {}, const char* requirement = "") {
        seen_.insert(key);
        if (!has(key)) {
            return fallback;
        }
        const json& v = obj_.at(key);
        if (v.is_null()) {
            return std::numeric_limits<double>::infinity();
        }
        if (!v.is_number()) {
            fail(key, "expected a number");
            return fallback;
        }
        const double x = v.get<double>();
        if (valid && !valid(x)) {
            fail(key, requirement);
        }
        return x;
    }

    bool boolean(const std::string& key, bool fallback) {
        seen_.insert(key);
        if (!has(key)) {
            return fallback;
        }
        if (!obj_.at(key).is_boolean()) {
            fail(key, "expected true or false");
            return fallback;
        }
        return obj_.at(key).get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        seen_.insert(key);
        if (!has(key)) {
            return fallback;
        }
        if (!obj_.at(key).is_string()) {
            fail(key, "expected a string");
            return fallback;
        }
        return obj_.at(key).get<std::string>();
    }

    std::vector<double> numbers(const std::string& key) {
        seen_.insert(key);
        std::vector<double> out;
        if (!has(key)) {
            return out;
        }
        const json& v = obj_.at(key);
        if (!v.is_array()) {
            fail(key, "expected an array of numbers");
            return out;
        }
        for (const auto& x : v) {
            if (!x.is_number()) {
                fail(key, "expected an array of numbers");
                return {};
            }
            out.push_back(x.get<double>());
        }
        return out;
    }

    const json* object(const std::string& key) {
        seen_.insert(key);
        return has(key) ? &obj_.at(key) : nullptr;
    }

    void finish() {
        if (!obj_.is_object()) {
            return;
        }
        for (const auto& [key, _] : obj_.items()) {
            if (!seen_.count(key)) {
                issues_.push_back(name(key) + ": unknown key");
            }
        }
    }

private:
    const json& obj_;
    std::string prefix_;
    std::vector<std::string>& issues_;
    std::set<std::string> seen_;
};

const auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
const auto non_negative = [](double x) { return x >= 0.0 && std::isfinite(x); };
const auto finite = [](double x) { return std::isfinite(x); };
const auto positive_or_inf = [](double x) { return x > 0.0; };

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file) {
    const std::filesystem::path p(file);
    return p.is_absolute() ? p : base / p;
}

PathSpec parse_path(const json* node, const std::filesystem::path& base,
                    std::vector<std::string>& issues) {
    PathSpec spec;
    if (node == nullptr) {
        return spec;
    }
    FieldReader r(*node, "path", issues);
    spec.kind = r.string("kind", spec.kind);
    if (spec.kind == "rotating_cone") {
        spec.amplitude = r.number("amplitude_energy", spec.amplitude, positive, "must be positive");
        spec.polar_angle = r.number("polar_angle_rad", spec.polar_angle,
                                    [](double x) { return x >= 0.0 && x < kPi; }, "must lie in [0, pi)");
        spec.angular_frequency = r.number("omega_rad_per_time", spec.angular_frequency,
                                          [](double x) { return x != 0.0 && std::isfinite(x); },
                                          "must be finite and non-zero");
        spec.cycles = r.number("cycles", spec.cycles, positive, "must be positive");
    } else if (spec.kind == "linear_sweep") {
        spec.slope = r.number("slope_energy_per_time", spec.slope, finite, "must be finite");
        spec.gap = r.number("gap_energy", spec.gap, positive, "must be positive");
        spec.duration = r.number("duration_time", spec.duration, positive, "must be positive");
    } else if (spec.kind == "sampled") {
        const std::string file = r.string("csv", "");
        const std::vector<double> t = r.numbers("times_time");
        const json* b = r.object("fields_energy");
        if (!file.empty()) {
            std::ifstream in(resolve(base, file));
            if (!in) {
                r.fail("csv", "cannot open '" + file + "'");
                return spec;
            }
            try {
                const ControlPath p = ControlPath::sampled_from_csv(in, pauli::sigma_x());
                const auto& f = std::get<SampledField>(p.kind());
                spec.times = f.times();
                spec.fields = f.samples();
            } catch (const ValidationError& e) {
                for (const auto& issue : e.issues()) {
                    r.fail("csv", issue);
                }
            } catch (const ParseError& e) {
                r.fail("csv", e.what());
            }
        } else if (!t.empty() && b != nullptr && b->is_array()) {
            spec.times = t;
            for (const auto& row : *b) {
                if (!row.is_array() || row.size() != 3) {
                    r.fail("fields_energy", "expected rows of [b_x, b_y, b_z]");
                    break;
                }
                spec.fields.emplace_back(row[0].get<double>(), row[1].get<double>(), row[2].get<double>());
            }
        } else {
            r.fail("csv", "sampled paths need 'csv' or both 'times_time' and 'fields_energy'");
        }
        if (!spec.times.empty() && spec.times.size() != spec.fields.size()) {
            r.fail("fields_energy", "row count differs from times_time");
        }
        if (!spec.times.empty() && spec.times.size() < 4) {
            r.fail("times_time", "at least four samples are required");
        }
        for (std::size_t i = 1; i < spec.times.size(); ++i) {
            if (!(spec.times[i] > spec.times[i - 1])) {
                r.fail("times_time", "must be strictly increasing");
                break;
            }
        }
    } else {
        r.fail("kind", "unknown path kind '" + spec.kind +
                           "' (expected rotating_cone, linear_sweep or sampled)");
    }
    r.finish();
    return spec;
}

Mat2 parse_coupling(const json* node, std::vector<std::string>& issues) {
    if (node == nullptr) {
        return pauli::sigma_x();
    }
    if (node->is_string()) {
        const auto name = node->get<std::string>();
        if (name == "sigma_x") {
            return pauli::sigma_x();
        }
        if (name == "sigma_y") {
            return pauli::sigma_y();
        }
        if (name == "sigma_z") {
            return pauli::sigma_z();
        }
        issues.push_back("coupling: unknown preset '" + name + "' (expected sigma_x, sigma_y or sigma_z)");
        return pauli::sigma_x();
    }
    FieldReader r(*node, "coupling", issues);
    Mat2 m = Mat2::Zero();
    auto read = [&](const std::string& key, double scale_re, double scale_im) {
        const json* part = r.object(key);
        if (part == nullptr) {
            return;
        }
        if (!part->is_array() || part->size() != 2) {
            r.fail(key, "expected a 2x2 array");
            return;
        }
        for (int i = 0; i < 2; ++i) {
            const json& row = (*part)[static_cast<std::size_t>(i)];
            if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
                r.fail(key, "expected a 2x2 array");
                return;
            }
            for (int j = 0; j < 2; ++j) {
                const double v = row[static_cast<std::size_t>(j)].get<double>();
                m(i, j) += cplx(scale_re * v, scale_im * v);
            }
        }
    };
    read("re", 1.0, 0.0);
    read("im", 0.0, 1.0);
    r.finish();
    if (!is_hermitian(m)) {
        issues.push_back("coupling: matrix must be Hermitian");
    }
    return m;
}

SpectralDensity::Model parse_bath(const json* node, const std::filesystem::path& base,
                                  std::vector<std::string>& issues, json& canonical) {
    if (node == nullptr) {
        canonical = {{"model", "flat"}, {"level_rate", 0.0}};
        return FlatSpectrum{0.0};
    }
    FieldReader r(*node, "bath", issues);
    const std::string model = r.string("model", "flat");
    SpectralDensity::Model out = FlatSpectrum{0.0};
    if (model == "flat") {
        const double level = r.number("level_rate", 1.0, non_negative, "must be non-negative");
        canonical = {{"model", model}, {"level_rate", level}};
        out = FlatSpectrum{level};
    } else if (model == "ohmic_thermal") {
        OhmicThermal o;
        o.coupling = r.number("eta", o.coupling, non_negative, "must be non-negative");
        o.temperature = r.number("temperature_energy", o.temperature, positive, "must be positive");
        o.cutoff = r.number("cutoff_rad_per_time", o.cutoff, positive_or_inf, "must be positive");
        canonical = {{"model", model},
                     {"eta", o.coupling},
                     {"temperature_energy", o.temperature},
                     {"cutoff_rad_per_time", finite_or_null(o.cutoff)}};
        out = o;
    } else if (model == "zero_temperature_ohmic") {
        ZeroTemperatureOhmic o;
        o.coupling = r.number("eta", o.coupling, non_negative, "must be non-negative");
        o.cutoff = r.number("cutoff_rad_per_time", o.cutoff, positive_or_inf, "must be positive");
        canonical = {{"model", model}, {"eta", o.coupling}, {"cutoff_rad_per_time", finite_or_null(o.cutoff)}};
        out = o;
    } else if (model == "tabulated") {
        TabulatedSpectrum t;
        const std::string file = r.string("csv", "");
        t.omega = r.numbers("omega_rad_per_time");
        t.value = r.numbers("s_rate");
        if (!file.empty()) {
            std::ifstream in(resolve(base, file));
            if (!in) {
                r.fail("csv", "cannot open '" + file + "'");
            } else {
                try {
                    const SpectralDensity sd = SpectralDensity::tabulated_from_csv(in);
                    t = std::get<TabulatedSpectrum>(sd.model());
                } catch (const ValidationError& e) {
                    for (const auto& issue : e.issues()) {
                        r.fail("csv", issue);
                    }
                } catch (const ParseError& e) {
                    r.fail("csv", e.what());
                }
            }
        }
        if (t.omega.size() != t.value.size()) {
            r.fail("s_rate", "length differs from omega_rad_per_time");
        } else if (t.omega.size() < 2) {
            r.fail("omega_rad_per_time", "at least two rows are required");
        } else {
            for (std::size_t i = 1; i < t.omega.size(); ++i) {
                if (!(t.omega[i] > t.omega[i - 1])) {
                    r.fail("omega_rad_per_time", "must be strictly increasing");
                    break;
                }
            }
            for (double v : t.value) {
                if (!(v >= 0.0) || !std::isfinite(v)) {
                    r.fail("s_rate", "values must be finite and non-negative");
                    break;
                }
            }
        }
        canonical = {{"model", model}, {"omega_rad_per_time", t.omega}, {"s_rate", t.value}};
        out = std::move(t);
    } else {
        r.fail("model", "unknown bath model '" + model +
                            "' (expected flat, ohmic_thermal, zero_temperature_ohmic or tabulated)");
    }
    r.finish();
    return out;
}

json path_json(const PathSpec& p) {
    if (p.kind == "rotating_cone") {
        return {{"kind", p.kind},
                {"amplitude_energy", p.amplitude},
                {"polar_angle_rad", p.polar_angle},
                {"omega_rad_per_time", p.angular_frequency},
                {"cycles", p.cycles}};
    }
    if (p.kind == "linear_sweep") {
        return {{"kind", p.kind},
                {"slope_energy_per_time", p.slope},
                {"gap_energy", p.gap},
                {"duration_time", p.duration}};
    }
    json fields = json::array();
    for (const auto& b : p.fields) {
        fields.push_back({b.x(), b.y(), b.z()});
    }
    return {{"kind", p.kind}, {"times_time", p.times}, {"fields_energy", fields}};
}

json coupling_json(const Mat2& m) {
    json re = json::array();
    json im = json::array();
    for (int i = 0; i < 2; ++i) {
        re.push_back({m(i, 0).real(), m(i, 1).real()});
        im.push_back({m(i, 0).imag(), m(i, 1).imag()});
    }
    return {{"re", re}, {"im", im}};
}

} // namespace

std::string to_string(RunMode mode) {
    switch (mode) {
    case RunMode::simulate:
        return "simulate";
    case RunMode::sweep:
        return "sweep";
    case RunMode::compare:
        return "compare";
    case RunMode::berry:
        return "berry";
    }
    return "simulate";
}

RunMode run_mode_from_string(const std::string& name) {
    if (name == "simulate") {
        return RunMode::simulate;
    }
    if (name == "sweep") {
        return RunMode::sweep;
    }
    if (name == "compare") {
        return RunMode::compare;
    }
    if (name == "berry") {
        return RunMode::berry;
    }
    throw ValidationError({"mode: unknown run mode '" + name +
                           "' (expected simulate, sweep, compare or berry)"});
}

double PathSpec::period() const {
    if (kind == "rotating_cone") {
        return 2.0 * kPi / std::abs(angular_frequency);
    }
    if (kind == "linear_sweep") {
        return duration;
    }
    return times.empty() ? 0.0 : times.back() - times.front();
}

PathSpec PathSpec::with_period(double new_period) const {
    PathSpec out = *this;
    const double scale = new_period / period();
    if (kind == "rotating_cone") {
        out.angular_frequency = angular_frequency / scale;
    } else if (kind == "linear_sweep") {
        out.duration = duration * scale;
        out.slope = slope / scale;
    } else {
        for (auto& t : out.times) {
            t = times.front() + (t - times.front()) * scale;
        }
    }
    return out;
}

ControlPath Scenario::build_path() const {
    if (path.kind == "rotating_cone") {
        return ControlPath::rotating_cone(path.amplitude, path.polar_angle, path.angular_frequency,
                                          coupling, path.cycles);
    }
    if (path.kind == "linear_sweep") {
        return ControlPath::linear_sweep(path.slope, path.gap, path.duration, coupling);
    }
    return ControlPath::sampled(path.times, path.fields, coupling);
}

SolverConfig Scenario::solver_for_path() const {
    SolverConfig cfg = solver;
    cfg.t0 = 0.0;
    cfg.t1 = build_path().duration();
    return cfg;
}

std::string Scenario::hash() const {
    const std::string dump = canonical.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

std::vector<Scenario> Scenario::expand() const {
    if (mode != RunMode::sweep) {
        return {*this};
    }
    std::vector<Scenario> out;
    out.reserve(sweep_periods.size());
    for (double period : sweep_periods) {
        Scenario sub = *this;
        sub.mode = RunMode::simulate;
        sub.path = path.with_period(period);
        sub.sweep_periods.clear();
        sub.canonical["mode"] = "simulate";
        sub.canonical["path"] = path_json(sub.path);
        sub.canonical.erase("sweep");
        out.push_back(std::move(sub));
    }
    return out;
}

Scenario load_scenario(const std::string& text, const std::filesystem::path& base_dir,
                       std::optional<RunMode> mode_override) {
    json root;
    try {
        root = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }

    std::vector<std::string> issues;
    Scenario sc;
    FieldReader top(root, "scenario", issues);
    if (!root.is_object()) {
        throw ValidationError(std::move(issues));
    }

    const std::string mode = top.string("mode", "simulate");
    if (mode_override) {
        sc.mode = *mode_override;
    } else {
        try {
            sc.mode = run_mode_from_string(mode);
        } catch (const ValidationError& e) {
            issues.insert(issues.end(), e.issues().begin(), e.issues().end());
        }
    }

    sc.path = parse_path(top.object("path"), base_dir, issues);
    sc.coupling = parse_coupling(top.object("coupling"), issues);

    json bath_canonical;
    const SpectralDensity::Model bath_model = parse_bath(top.object("bath"), base_dir, issues, bath_canonical);

    // initial state
    if (const json* node = top.object("initial")) {
        FieldReader r(*node, "initial", issues);
        sc.initial.rho_gg = r.number("rho_gg", 1.0, [](double x) { return x >= 0.0 && x <= 1.0; },
                                     "must lie in [0, 1]");
        const double re = r.number("rho_ge_re", 0.0, finite, "must be finite");
        const double im = r.number("rho_ge_im", 0.0, finite, "must be finite");
        sc.initial.rho_ge = cplx(re, im);
        r.finish();
        if (purity(sc.initial) > 1.0 + 1e-12) {
            issues.emplace_back("initial: state is not positive semidefinite (purity > 1)");
        }
    }

    // solver
    std::string method = "rk45";
    if (const json* node = top.object("solver")) {
        FieldReader r(*node, "solver", issues);
        method = r.string("method", method);
        if (method == "rk45") {
            Rk45Adaptive a;
            a.rtol = r.number("rtol", a.rtol, positive, "must be positive");
            a.atol = r.number("atol", a.atol, positive, "must be positive");
            a.dt_max = r.number("dt_max_time", a.dt_max, positive_or_inf, "must be positive");
            sc.solver.method = a;
        } else if (method == "rk4") {
            Rk4Fixed f;
            f.dt = r.number("dt_time", f.dt, positive, "must be positive");
            sc.solver.method = f;
        } else {
            r.fail("method", "unknown method '" + method + "' (expected rk45 or rk4)");
        }
        const double stride = r.number("record_stride", 1.0,
                                       [](double x) { return x >= 1.0 && std::floor(x) == x; },
                                       "must be a positive integer");
        sc.solver.record_stride = stride >= 1.0 ? static_cast<std::size_t>(stride) : 1;
        sc.solver.record_interval = r.number("record_interval_time", 0.0, non_negative, "must be non-negative");
        r.finish();
    }

    // equation and basis options
    try {
        sc.options.equation = equation_from_string(top.string("equation", "full"));
    } catch (const ValidationError& e) {
        issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    }
    sc.options.optimal_phase = top.boolean("optimal_phase", false);
    sc.options.spectral_shift = top.boolean("spectral_shift", false);
    const std::string w_method = top.string("w_method", "analytic");
    const double fd_step = top.number("fd_step_time", 0.0, non_negative, "must be non-negative");
    if (w_method == "analytic") {
        sc.options.frame.method = AnalyticW{};
    } else if (w_method == "central_difference") {
        sc.options.frame.method = CentralDifferenceW{fd_step};
    } else {
        top.fail("w_method", "unknown method '" + w_method + "' (expected analytic or central_difference)");
    }
    sc.options.positivity_tolerance =
        top.number("positivity_tolerance", 1e-6, positive, "must be positive");

    if (const json* node = top.object("sweep")) {
        FieldReader r(*node, "sweep", issues);
        sc.sweep_periods = r.numbers("periods_time");
        for (double p : sc.sweep_periods) {
            if (!(p > 0.0) || !std::isfinite(p)) {
                r.fail("periods_time", "periods must be positive");
                break;
            }
        }
        r.finish();
    }
    if (sc.mode == RunMode::sweep && sc.sweep_periods.empty()) {
        issues.emplace_back("sweep.periods_time: sweep mode needs at least one period");
    }

    if (const json* node = top.object("compare")) {
        FieldReader r(*node, "compare", issues);
        const json* eqs = r.object("equations");
        if (eqs != nullptr) {
            sc.compare_equations.clear();
            if (!eqs->is_array()) {
                r.fail("equations", "expected an array of equation names");
            } else {
                for (const auto& e : *eqs) {
                    try {
                        sc.compare_equations.push_back(equation_from_string(e.is_string() ? e.get<std::string>() : ""));
                    } catch (const ValidationError& err) {
                        r.fail("equations", err.issues().front());
                    }
                }
            }
        }
        r.finish();
    }

    if (const json* node = top.object("berry")) {
        FieldReader r(*node, "berry", issues);
        sc.berry_polar_angles = r.numbers("polar_angles_rad");
        for (double th : sc.berry_polar_angles) {
            if (!(th >= 0.0 && th < kPi)) {
                r.fail("polar_angles_rad", "angles must lie in [0, pi)");
                break;
            }
        }
        const double n = r.number("samples_per_loop", 4096.0,
                                  [](double x) { return x >= 4.0 && std::floor(x) == x; },
                                  "must be an integer >= 4");
        sc.berry_samples = n >= 4.0 ? static_cast<std::size_t>(n) : 4096;
        r.finish();
    }
    if (sc.mode == RunMode::berry) {
        if (sc.berry_polar_angles.empty()) {
            issues.emplace_back("berry.polar_angles_rad: berry mode needs at least one angle");
        }
        if (sc.path.kind != "rotating_cone") {
            issues.emplace_back("path.kind: berry mode sweeps cone loops and needs a rotating_cone path");
        }
    }

    top.finish();

    if (issues.empty()) {
        // Cross-field checks that need constructed objects.
        try {
            sc.bath = SpectralDensity(bath_model);
        } catch (const ValidationError& e) {
            issues.insert(issues.end(), e.issues().begin(), e.issues().end());
        }
        try {
            const ControlPath p = sc.build_path();
            SolverConfig cfg = sc.solver;
            cfg.t0 = 0.0;
            cfg.t1 = p.duration();
            cfg.validate();
            (void)frame_at(p, 0.0, sc.options.frame);
        } catch (const ValidationError& e) {
            issues.insert(issues.end(), e.issues().begin(), e.issues().end());
        } catch (const Error& e) {
            issues.push_back(std::string("path: ") + e.what());
        }
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }

    json solver_json;
    if (const auto* a = std::get_if<Rk45Adaptive>(&sc.solver.method)) {
        solver_json = {{"method", "rk45"}, {"rtol", a->rtol}, {"atol", a->atol}, {"dt_max_time", finite_or_null(a->dt_max)}};
    } else {
        solver_json = {{"method", "rk4"}, {"dt_time", std::get<Rk4Fixed>(sc.solver.method).dt}};
    }
    solver_json["record_stride"] = sc.solver.record_stride;
    solver_json["record_interval_time"] = sc.solver.record_interval;

    json equations = json::array();
    for (Equation e : sc.compare_equations) {
        equations.push_back(to_string(e));
    }

    sc.canonical = {
        {"mode", to_string(sc.mode)},
        {"path", path_json(sc.path)},
        {"coupling", coupling_json(sc.coupling)},
        {"bath", bath_canonical},
        {"initial", {{"rho_gg", sc.initial.rho_gg}, {"rho_ge_re", sc.initial.rho_ge.real()}, {"rho_ge_im", sc.initial.rho_ge.imag()}}},
        {"solver", solver_json},
        {"equation", to_string(sc.options.equation)},
        {"optimal_phase", sc.options.optimal_phase},
        {"spectral_shift", sc.options.spectral_shift},
        {"w_method", w_method},
        {"fd_step_time", fd_step},
        {"positivity_tolerance", sc.options.positivity_tolerance},
        {"compare", {{"equations", equations}}},
        {"berry", {{"polar_angles_rad", sc.berry_polar_angles}, {"samples_per_loop", sc.berry_samples}}},
    };
    if (sc.mode == RunMode::sweep) {
        sc.canonical["sweep"] = {{"periods_time", sc.sweep_periods}};
    }
    return sc;
}

Scenario load_scenario_file(const std::filesystem::path& file, std::optional<RunMode> mode) {
    std::ifstream in(file);
    if (!in) {
        throw ParseError("cannot open scenario file '" + file.string() + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return load_scenario(buffer.str(), file.parent_path().empty() ? "." : file.parent_path(), mode);
}

} // namespace steer
