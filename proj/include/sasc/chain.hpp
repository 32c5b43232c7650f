// chain.hpp: chains of dispersive units sharing their low-frequency modes,
// end-to-end quadrature gain and the exponential scaling fit.
//
// A chain of N modes alternates high, low, high, ... starting at a high mode,
// so N = 2 is one unit and N = 3 is the three-mode system. The signal enters
// at the first mode and the homodyne readout is taken at the last one.
#pragma once

#include "sasc/model.hpp"
#include "sasc/numerics.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace sasc {

struct ChainSpec {
    std::size_t modes = 0;
    std::vector<CouplingParams> couplings;  // modes - 1 entries
    std::vector<double> kappas;             // one per mode
    // High modes take detuning_pattern[0], [1], [0], ... in order.
    std::array<double, 2> detuning_pattern{0.0, 0.0};
    double low_frequency = 1.0;  // units of omega_b
    double high_absolute_frequency = 1.0;
    double low_absolute_frequency = 1.0;
    double temperature = 0.0;

    // Throws std::invalid_argument on inconsistent sizes.
    SystemModel to_model() const;
};

// Unit pattern repeated along the chain, for building specs of any length.
struct ChainTemplate {
    std::vector<CouplingParams> coupling_cycle{CouplingParams{0.1, 0.0}};
    double kappa_first_high = 1.0;
    double kappa_high = 1.0;
    double kappa_low = 1e-4;
    std::array<double, 2> detuning_pattern{0.0, 0.0};
    double low_frequency = 1.0;
    double high_absolute_frequency = 1.0;
    double low_absolute_frequency = 1.0;
    double temperature = 0.0;

    ChainSpec spec(std::size_t modes) const;
};

// |C_{1,+} + C_{1,-}|^2 of the first mode's input in the last mode's quadrature.
// Throws InstabilityError carrying the spectral abscissa when the chain is unstable.
double end_to_end_gain(const ChainSpec& spec, double omega, double psi = 0.0);

struct ExcludedLength {
    std::size_t modes = 0;
    std::string reason;
    double spectral_abscissa = 0.0;
};

struct ScalingReport {
    std::vector<std::size_t> modes;
    std::vector<double> gains;
    std::vector<ExcludedLength> excluded;
    LineFit fit;        // ln(gain) against N
    double base = 0.0;  // exp(slope)
    bool warning = false;
};

// Fits ln(gain) against N over the stable lengths. Needs at least three.
ScalingReport scaling_fit(const std::vector<ChainSpec>& specs, double omega, double psi = 0.0);
ScalingReport scaling_fit(const ChainTemplate& unit, std::size_t n_min, std::size_t n_max, double omega,
                          double psi = 0.0);

// Fit for externally supplied gains (all must be positive).
ScalingReport scaling_fit_from_gains(std::vector<std::size_t> modes, std::vector<double> gains);

}  // namespace sasc
