#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "steer/bath.hpp"
#include "steer/control.hpp"
#include "steer/dynamics.hpp"
#include "steer/errors.hpp"
#include "steer/frames.hpp"
#include "steer/gauge.hpp"
#include "steer/run.hpp"
#include "steer/scenario.hpp"

namespace py = pybind11;
using namespace steer;

namespace {

WMethod w_method(const std::string& name, double step) {
    if (name == "analytic") {
        return AnalyticW{};
    }
    if (name == "central_difference") {
        return CentralDifferenceW{step};
    }
    throw ValidationError({"w_method: expected 'analytic' or 'central_difference'"});
}

Mat2 coupling_of(const py::object& obj) {
    if (obj.is_none()) {
        return pauli::sigma_x();
    }
    if (py::isinstance<py::str>(obj)) {
        const auto name = obj.cast<std::string>();
        if (name == "sigma_x") {
            return pauli::sigma_x();
        }
        if (name == "sigma_y") {
            return pauli::sigma_y();
        }
        if (name == "sigma_z") {
            return pauli::sigma_z();
        }
        throw ValidationError({"coupling: unknown preset '" + name + "'"});
    }
    return obj.cast<Mat2>();
}

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::dict trajectory_dict(const Trajectory& tr) {
    const std::size_t n = tr.samples.size();
    std::vector<double> t(n), gg(n), re(n), im(n), pur(n), alpha(n), om(n), lg(n), le(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = tr.samples[i];
        t[i] = s.t;
        gg[i] = s.state.rho_gg;
        re[i] = s.state.rho_ge.real();
        im[i] = s.state.rho_ge.imag();
        pur[i] = s.purity;
        alpha[i] = s.frame.alpha;
        om[i] = s.frame.omega01;
        lg[i] = s.lambda_g;
        le[i] = s.lambda_e;
    }
    py::dict d;
    d["t"] = to_array(t);
    d["rho_gg"] = to_array(gg);
    d["re_rho_ge"] = to_array(re);
    d["im_rho_ge"] = to_array(im);
    d["purity"] = to_array(pur);
    d["alpha"] = to_array(alpha);
    d["omega01"] = to_array(om);
    d["lambda_g"] = to_array(lg);
    d["lambda_e"] = to_array(le);
    const auto& diag = tr.diagnostics;
    d["max_alpha"] = diag.max_alpha;
    d["max_purity_excess"] = diag.max_purity_excess;
    d["positivity_warnings"] = diag.positivity_warnings;
    d["accepted_steps"] = diag.accepted_steps;
    d["rejected_steps"] = diag.rejected_steps;
    return d;
}

} // namespace

PYBIND11_MODULE(_steer, m) {
    m.doc() = "Adiabatically steered open two-level systems";

    auto base = py::register_exception<Error>(m, "SteerError", PyExc_RuntimeError);
    py::register_exception<GapCollapse>(m, "GapCollapse", base.ptr());
    py::register_exception<GaugeSingularity>(m, "GaugeSingularity", base.ptr());
    py::register_exception<StepTooCoarse>(m, "StepTooCoarse", base.ptr());
    py::register_exception<OutOfRange>(m, "OutOfRange", base.ptr());
    py::register_exception<AdiabaticityViolation>(m, "AdiabaticityViolation", base.ptr());
    py::register_exception<LoopNotClosed>(m, "LoopNotClosed", base.ptr());
    py::register_exception<NonUniformGridUnsupported>(m, "NonUniformGridUnsupported", base.ptr());
    py::register_exception<StepRejectionLimit>(m, "StepRejectionLimit", base.ptr());
    py::register_exception<NonFiniteState>(m, "NonFiniteState", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());

    py::class_<ControlPath>(m, "ControlPath")
        .def_static("rotating_cone",
                    [](double amplitude, double polar_angle, double omega, const py::object& coupling,
                       double cycles) {
                        return ControlPath::rotating_cone(amplitude, polar_angle, omega, coupling_of(coupling),
                                                          cycles);
                    },
                    py::arg("amplitude"), py::arg("polar_angle"), py::arg("omega"),
                    py::arg("coupling") = py::none(), py::arg("cycles") = 1.0)
        .def_static("linear_sweep",
                    [](double slope, double gap, double duration, const py::object& coupling) {
                        return ControlPath::linear_sweep(slope, gap, duration, coupling_of(coupling));
                    },
                    py::arg("slope"), py::arg("gap"), py::arg("duration"), py::arg("coupling") = py::none())
        .def_static("sampled",
                    [](std::vector<double> times, const std::vector<Vec3>& fields, const py::object& coupling) {
                        return ControlPath::sampled(std::move(times), fields, coupling_of(coupling));
                    },
                    py::arg("times"), py::arg("fields"), py::arg("coupling") = py::none())
        .def("field", &ControlPath::field)
        .def("field_rate", &ControlPath::field_rate)
        .def("hamiltonian", &ControlPath::hamiltonian)
        .def_property_readonly("coupling", &ControlPath::coupling)
        .def_property_readonly("duration", &ControlPath::duration);

    py::class_<SpectralDensity>(m, "SpectralDensity")
        .def_static("flat", [](double level) { return SpectralDensity(FlatSpectrum{level}); }, py::arg("level"))
        .def_static("ohmic_thermal",
                    [](double eta, double temperature, double cutoff) {
                        return SpectralDensity(OhmicThermal{eta, temperature, cutoff});
                    },
                    py::arg("eta"), py::arg("temperature"), py::arg("cutoff") = kInfiniteCutoff)
        .def_static("zero_temperature_ohmic",
                    [](double eta, double cutoff) { return SpectralDensity(ZeroTemperatureOhmic{eta, cutoff}); },
                    py::arg("eta"), py::arg("cutoff") = kInfiniteCutoff)
        .def_static("tabulated",
                    [](std::vector<double> omega, std::vector<double> value) {
                        return SpectralDensity(TabulatedSpectrum{std::move(omega), std::move(value)});
                    },
                    py::arg("omega"), py::arg("value"))
        .def("__call__", &SpectralDensity::operator());

    py::class_<WElements>(m, "WElements")
        .def(py::init<>())
        .def_readwrite("gg", &WElements::gg)
        .def_readwrite("ee", &WElements::ee)
        .def_readwrite("ge", &WElements::ge)
        .def_property_readonly("eg", &WElements::eg)
        .def("hs_norm", [](const WElements& w) { return hs_norm(w); });

    py::class_<AdiabaticFrame>(m, "AdiabaticFrame")
        .def(py::init<>())
        .def_readwrite("t", &AdiabaticFrame::t)
        .def_readwrite("omega01", &AdiabaticFrame::omega01)
        .def_readwrite("w", &AdiabaticFrame::w)
        .def_readwrite("m1", &AdiabaticFrame::m1)
        .def_readwrite("m2", &AdiabaticFrame::m2)
        .def_readwrite("alpha", &AdiabaticFrame::alpha);

    py::class_<EigenFrame>(m, "EigenFrame")
        .def_readonly("t", &EigenFrame::t)
        .def_readonly("ground", &EigenFrame::ground)
        .def_readonly("excited", &EigenFrame::excited)
        .def_readonly("energy_g", &EigenFrame::energy_g)
        .def_readonly("energy_e", &EigenFrame::energy_e)
        .def_property_readonly("gap", &EigenFrame::gap);

    m.def("eigensystem", [](const ControlPath& p, double t) { return eigensystem(p, t); }, py::arg("path"),
          py::arg("t"));
    m.def("frame_at",
          [](const ControlPath& p, double t, const std::string& method, double step) {
              FrameOptions o;
              o.method = w_method(method, step);
              return frame_at(p, t, o);
          },
          py::arg("path"), py::arg("t"), py::arg("w_method") = "analytic", py::arg("fd_step") = 0.0);

    py::class_<RateSet>(m, "RateSet")
        .def_readonly("gamma_ge", &RateSet::gamma_ge)
        .def_readonly("gamma_eg", &RateSet::gamma_eg)
        .def_readonly("gamma_tilde0", &RateSet::gamma_tilde0)
        .def_readonly("gamma_tilde_plus", &RateSet::gamma_tilde_plus)
        .def_readonly("gamma_tilde_minus", &RateSet::gamma_tilde_minus)
        .def_readonly("gamma_alpha", &RateSet::gamma_alpha)
        .def_readonly("gamma_beta", &RateSet::gamma_beta)
        .def_readonly("gamma_phi", &RateSet::gamma_phi);
    m.def("rates", &rates, py::arg("m1"), py::arg("m2"), py::arg("omega01"), py::arg("bath"));
    m.def("superadiabatic_elements",
          [](double m1, cplx m2, cplx w_ge, double omega01) {
              const CouplingElements c = superadiabatic_elements(m1, m2, w_ge, omega01);
              return py::make_tuple(c.m1, c.m2);
          },
          py::arg("m1"), py::arg("m2"), py::arg("w_ge"), py::arg("omega01"));

    py::class_<DensityState>(m, "DensityState")
        .def(py::init([](double gg, cplx ge) { return DensityState{gg, ge}; }), py::arg("rho_gg") = 1.0,
             py::arg("rho_ge") = cplx(0.0, 0.0))
        .def_readwrite("rho_gg", &DensityState::rho_gg)
        .def_readwrite("rho_ge", &DensityState::rho_ge)
        .def_property_readonly("purity", [](const DensityState& s) { return purity(s); });

    py::class_<Derivative>(m, "Derivative")
        .def_readonly("d_rho_gg", &Derivative::d_rho_gg)
        .def_readonly("d_rho_ge", &Derivative::d_rho_ge);

    m.def("rhs_full", py::overload_cast<const DensityState&, const AdiabaticFrame&, const SpectralDensity&>(&rhs_full),
          py::arg("state"), py::arg("frame"), py::arg("bath"));
    m.def("rhs_nonsteered", &rhs_nonsteered, py::arg("state"), py::arg("rates"), py::arg("omega01"));
    m.def("rhs_secular",
          py::overload_cast<const DensityState&, const RateSet&, const AdiabaticFrame&>(&rhs_secular),
          py::arg("state"), py::arg("rates"), py::arg("frame"));
    m.def("superadiabatic_pullback",
          [](const DensityState& s, const AdiabaticFrame& f, const SpectralDensity& sd) {
              return superadiabatic_pullback(s, f, sample_spectrum(sd, f.omega01));
          },
          py::arg("state"), py::arg("frame"), py::arg("bath"));
    m.def("to_superadiabatic", &to_superadiabatic, py::arg("state"), py::arg("frame"));
    m.def("from_superadiabatic", &from_superadiabatic, py::arg("state"), py::arg("frame"));

    m.def("simulate",
          [](const ControlPath& path, const SpectralDensity& bath, const DensityState& initial,
             const std::string& equation, const std::string& method, double rtol, double atol, double dt,
             double record_interval, bool optimal_phase, bool spectral_shift) {
              SolverConfig cfg;
              if (method == "rk45") {
                  Rk45Adaptive a;
                  a.rtol = rtol;
                  a.atol = atol;
                  cfg.method = a;
              } else if (method == "rk4") {
                  cfg.method = Rk4Fixed{dt};
              } else {
                  throw ValidationError({"method: expected 'rk45' or 'rk4'"});
              }
              cfg.t0 = 0.0;
              cfg.t1 = path.duration();
              cfg.record_interval = record_interval;
              SimulationOptions o;
              o.equation = equation_from_string(equation);
              o.optimal_phase = optimal_phase;
              o.spectral_shift = spectral_shift;
              Trajectory tr;
              {
                  py::gil_scoped_release release;
                  tr = simulate(path, bath, initial, cfg, o);
              }
              return trajectory_dict(tr);
          },
          py::arg("path"), py::arg("bath"), py::arg("initial") = DensityState{}, py::arg("equation") = "full",
          py::arg("method") = "rk45", py::arg("rtol") = 1e-9, py::arg("atol") = 1e-12, py::arg("dt") = 1e-2,
          py::arg("record_interval") = 0.0, py::arg("optimal_phase") = false, py::arg("spectral_shift") = false);

    m.def("berry_phase",
          [](const ControlPath& loop, std::size_t samples) {
              const BerryPhases b = berry_phase(sample_history(loop, 0.0, loop.duration(), samples));
              py::dict d;
              d["ground"] = b.ground;
              d["excited"] = b.excited;
              d["ground_mod"] = b.ground_mod;
              d["excited_mod"] = b.excited_mod;
              d["quadrature_error"] = b.quadrature_error;
              return d;
          },
          py::arg("loop"), py::arg("samples") = 4096);

    m.def("scenario_hash", [](const std::string& text) { return load_scenario(text).hash(); }, py::arg("text"));
    m.def("run",
          [](const std::filesystem::path& config, const std::filesystem::path& out, unsigned jobs,
             std::uint64_t seed, const std::optional<std::string>& mode) {
              std::optional<RunMode> rm;
              if (mode) {
                  rm = run_mode_from_string(*mode);
              }
              const Scenario sc = load_scenario_file(config, rm);
              RunOptions o;
              o.out_root = out;
              o.jobs = jobs;
              o.seed = seed;
              o.version = tool_version();
              RunResult r;
              {
                  py::gil_scoped_release release;
                  r = run_scenario(sc, o);
              }
              py::dict d;
              d["directory"] = r.directory.string();
              d["ok"] = r.ok;
              d["failures"] = r.failures;
              return d;
          },
          py::arg("config"), py::arg("out") = "runs", py::arg("jobs") = 1, py::arg("seed") = 0,
          py::arg("mode") = py::none());

    m.attr("__version__") = tool_version();
}
