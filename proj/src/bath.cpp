#include "steer/bath.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <string>

#include "steer/errors.hpp"

namespace steer {

namespace {

double cutoff_factor(double omega, double cutoff) {
    return std::isinf(cutoff) ? 1.0 : std::exp(-std::abs(omega) / cutoff);
}

struct SpectrumVisitor {
    double omega;

    double operator()(const FlatSpectrum& s) const { return s.level; }

    double operator()(const OhmicThermal& s) const {
        const double x = omega / s.temperature;
        double bose;
        if (std::abs(x) < 1e-8) {
            // omega / (1 - e^{-x}) = T (1 + x/2 + x^2/12 + ...)
            bose = s.temperature * (1.0 + 0.5 * x);
        } else {
            bose = omega / -std::expm1(-x);
        }
        return s.coupling * bose * cutoff_factor(omega, s.cutoff);
    }

    double operator()(const ZeroTemperatureOhmic& s) const {
        if (omega <= 0.0) {
            return 0.0;
        }
        return s.coupling * omega * cutoff_factor(omega, s.cutoff);
    }

    double operator()(const TabulatedSpectrum& s) const {
        const auto& x = s.omega;
        if (omega < x.front() || omega > x.back()) {
            throw OutOfRange("tabulated spectrum queried at omega = " + std::to_string(omega) +
                             " outside [" + std::to_string(x.front()) + ", " +
                             std::to_string(x.back()) + "]");
        }
        auto hi = std::upper_bound(x.begin(), x.end(), omega);
        if (hi == x.end()) {
            return s.value.back();
        }
        const auto i = static_cast<std::size_t>(hi - x.begin());
        const double u = (omega - x[i - 1]) / (x[i] - x[i - 1]);
        return (1.0 - u) * s.value[i - 1] + u * s.value[i];
    }
};

struct ModelValidator {
    std::vector<std::string>& issues;

    void operator()(const FlatSpectrum& s) const {
        if (!(s.level >= 0.0) || !std::isfinite(s.level)) {
            issues.emplace_back("bath.level: must be finite and non-negative");
        }
    }
    void operator()(const OhmicThermal& s) const {
        if (!(s.coupling >= 0.0) || !std::isfinite(s.coupling)) {
            issues.emplace_back("bath.eta: must be finite and non-negative");
        }
        if (!(s.temperature > 0.0) || !std::isfinite(s.temperature)) {
            issues.emplace_back("bath.temperature: must be finite and positive");
        }
        if (!(s.cutoff > 0.0)) {
            issues.emplace_back("bath.cutoff_rad_per_time: must be positive");
        }
    }
    void operator()(const ZeroTemperatureOhmic& s) const {
        if (!(s.coupling >= 0.0) || !std::isfinite(s.coupling)) {
            issues.emplace_back("bath.eta: must be finite and non-negative");
        }
        if (!(s.cutoff > 0.0)) {
            issues.emplace_back("bath.cutoff_rad_per_time: must be positive");
        }
    }
    void operator()(const TabulatedSpectrum& s) const {
        if (s.omega.size() != s.value.size()) {
            issues.emplace_back("bath.table: omega and S columns differ in length");
        }
        if (s.omega.size() < 2) {
            issues.emplace_back("bath.table: at least two rows are required");
        }
        for (std::size_t i = 1; i < s.omega.size(); ++i) {
            if (!(s.omega[i] > s.omega[i - 1])) {
                issues.emplace_back("bath.table: omega must be strictly increasing");
                break;
            }
        }
        if (std::any_of(s.value.begin(), s.value.end(),
                        [](double v) { return !(v >= 0.0) || !std::isfinite(v); })) {
            issues.emplace_back("bath.table: S values must be finite and non-negative");
        }
    }
};

} // namespace

SpectralDensity::SpectralDensity(Model model) : model_(std::move(model)) {
    std::vector<std::string> issues;
    std::visit(ModelValidator{issues}, model_);
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
}

SpectralDensity SpectralDensity::tabulated_from_csv(std::istream& in) {
    TabulatedSpectrum table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') {
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double w, s;
        if (!(row >> w >> s)) {
            if (table.omega.empty()) {
                continue;
            }
            throw ParseError("spectrum CSV: malformed row " + std::to_string(lineno));
        }
        table.omega.push_back(w);
        table.value.push_back(s);
    }
    return SpectralDensity(std::move(table));
}

double SpectralDensity::operator()(double omega) const {
    return std::visit(SpectrumVisitor{omega}, model_);
}

double eval_spectrum(const SpectralDensity& sd, double omega) { return sd(omega); }

SpectralSamples sample_spectrum(const SpectralDensity& sd, double omega01) {
    return {sd(0.0), sd(omega01), sd(-omega01)};
}

SpectralSamples sample_shifted_spectrum(const SpectralDensity& sd, double omega01, double w_gg,
                                        double w_ee) {
    return {sd(0.0), sd(omega01 + w_ee - w_gg), sd(-omega01 + w_gg - w_ee)};
}

RateSet rates_from_samples(double m1, cplx m2, const SpectralSamples& s) {
    const double m2sq = std::norm(m2);
    RateSet r;
    r.gamma_ge = m2sq * s.negative;
    r.gamma_eg = m2sq * s.positive;
    r.gamma_tilde0 = std::conj(m2) * (2.0 * m1) * s.zero;
    r.gamma_tilde_plus = -m1 * m2 * s.positive;
    r.gamma_tilde_minus = -m1 * m2 * s.negative;
    r.gamma_phi = 2.0 * m1 * m1 * s.zero;
    r.gamma_alpha = 0.5 * m2 * m2 * s.positive;
    r.gamma_beta = 0.5 * m2 * m2 * s.negative;
    return r;
}

RateSet rates(double m1, cplx m2, double omega01, const SpectralDensity& sd) {
    if (!(omega01 > kGapFloor)) {
        throw GapCollapse("rates: omega01 below the gap floor");
    }
    return rates_from_samples(m1, m2, sample_spectrum(sd, omega01));
}

RateSet shifted_rates(double m1, cplx m2, double omega01, double w_gg, double w_ee,
                      const SpectralDensity& sd) {
    if (!(omega01 > kGapFloor)) {
        throw GapCollapse("shifted_rates: omega01 below the gap floor");
    }
    return rates_from_samples(m1, m2, sample_shifted_spectrum(sd, omega01, w_gg, w_ee));
}

CouplingElements superadiabatic_elements(double m1, cplx m2, cplx w_ge, double omega01) {
    if (!(omega01 > kGapFloor)) {
        throw GapCollapse("superadiabatic_elements: omega01 below the gap floor");
    }
    const cplx k = w_ge / omega01;
    CouplingElements c;
    // <g2|A|g2> - <e2|A|e2> = 2 m1 - 4 Re(conj(w_ge) m2) / omega01
    c.m1 = m1 - 2.0 * (std::conj(k) * m2).real();
    // <g2|A|e2> = m2 + (w_ge / omega01) (<g|A|g> - <e|A|e>)
    c.m2 = m2 + 2.0 * m1 * k;
    return c;
}

} // namespace steer
