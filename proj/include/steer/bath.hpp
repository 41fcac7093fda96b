// Spectral densities and the Born-Markov transition rates of a two-level system

#pragma once

#include <iosfwd>
#include <limits>
#include <variant>
#include <vector>

#include "steer/control.hpp"
#include "steer/linalg.hpp"

namespace steer {

inline constexpr double kInfiniteCutoff = std::numeric_limits<double>::infinity();

struct FlatSpectrum {
    double level = 1.0;
};

// S(w) = eta w / (1 - exp(-w/T)) * exp(-|w|/cutoff), S(0) = eta T. Satisfies S(-w) = e^{-w/T} S(w).
struct OhmicThermal {
    double coupling = 0.1;
    double temperature = 1.0;
    double cutoff = kInfiniteCutoff;
};

// T -> 0 limit: S(w) = eta w exp(-w/cutoff) for w > 0, zero otherwise.
struct ZeroTemperatureOhmic {
    double coupling = 0.1;
    double cutoff = kInfiniteCutoff;
};

// Linear interpolation on a strictly increasing frequency grid; no extrapolation.
struct TabulatedSpectrum {
    std::vector<double> omega;
    std::vector<double> value;
};

// Noise power S(w) = S_X(w) / hbar^2 (hbar = 1). Positive frequencies drive e -> g decay.
class SpectralDensity {
public:
    using Model = std::variant<FlatSpectrum, OhmicThermal, ZeroTemperatureOhmic, TabulatedSpectrum>;

    SpectralDensity() : SpectralDensity(FlatSpectrum{0.0}) {}
    explicit SpectralDensity(Model model);

    // Rows of "omega,S"; a non-numeric first row is treated as a header.
    static SpectralDensity tabulated_from_csv(std::istream& in);

    double operator()(double omega) const;

    const Model& model() const { return model_; }

private:
    Model model_;
};

double eval_spectrum(const SpectralDensity& sd, double omega);

// S(0), S(+omega01), S(-omega01) as they enter the rates.
struct SpectralSamples {
    double zero = 0.0;
    double positive = 0.0;
    double negative = 0.0;
};

SpectralSamples sample_spectrum(const SpectralDensity& sd, double omega01);

// Arguments moved by the basis phase velocity: +omega01 -> omega01 + w_ee - w_gg and
// -omega01 -> -omega01 + w_gg - w_ee. Only meaningful in a gauge the caller has fixed.
SpectralSamples sample_shifted_spectrum(const SpectralDensity& sd, double omega01, double w_gg,
                                        double w_ee);

struct RateSet {
    double gamma_ge = 0.0;  // g -> e, |m2|^2 S(-omega01)
    double gamma_eg = 0.0;  // e -> g, |m2|^2 S(+omega01)
    cplx gamma_tilde0;      // conj(m2) 2 m1 S(0)
    cplx gamma_tilde_plus;  // -m1 m2 S(+omega01)
    cplx gamma_tilde_minus; // -m1 m2 S(-omega01)
    cplx gamma_alpha;       // m2^2 S(+omega01) / 2
    cplx gamma_beta;        // m2^2 S(-omega01) / 2
    double gamma_phi = 0.0; // 2 m1^2 S(0)
};

// Rates for the traceless coupling convention; Lamb shifts are not included.
RateSet rates_from_samples(double m1, cplx m2, const SpectralSamples& s);
RateSet rates(double m1, cplx m2, double omega01, const SpectralDensity& sd);
RateSet shifted_rates(double m1, cplx m2, double omega01, double w_gg, double w_ee,
                      const SpectralDensity& sd);

// Coupling elements in the first superadiabatic basis
//   |g2> = |g> - |e> conj(w_ge)/omega01,  |e2> = |e> + |g> w_ge/omega01,
// kept to linear order in w_ge / omega01.
CouplingElements superadiabatic_elements(double m1, cplx m2, cplx w_ge, double omega01);

} // namespace steer
