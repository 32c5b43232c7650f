// oracle.hpp: time-domain check of the frequency-domain pipeline.
//
// Integrates dz = M z dt + L dW with Euler-Maruyama noise kicks between two
// exact half steps of the drift, exp(M dt / 2). Each mode gets complex
// Gaussian increments with E|dW|^2 = (n_th + 1/2) dt and its creation channel
// receives the conjugate increment. This classical surrogate reproduces all
// symmetrized second moments of the linear quantum model, which is all the
// output spectra depend on. It is not a quantum simulation.
#pragma once

#include "sasc/model.hpp"
#include "sasc/spectra.hpp"
#include "sasc/table.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sasc {

struct OracleConfig {
    SystemModel model;
    double dt = 0.0;  // 0 selects 0.01 / max(max |lambda|, omega_b)
    std::size_t ensemble = 64;
    std::size_t segments_per_member = 16;
    std::size_t segment_length = 4096;
    std::size_t overlap = 2048;
    std::uint64_t seed = 0;
    double psi = 0.0;
    double noise_scale = 1.0;          // multiplies every noise amplitude and the initial state
    double max_omega = 3.0;            // keep Welch bins with |omega| <= max_omega
    std::vector<std::size_t> ports;    // empty: every mode
    bool stationary_start = true;      // draw z(0) from the stationary covariance
    unsigned threads = 1;

    std::size_t steps_per_member() const;
    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct PortSpectrum {
    std::size_t port = 0;
    std::string label;
    std::vector<double> psd;
    std::vector<double> standard_error;  // of the ensemble mean
};

struct OracleRun {
    std::vector<double> omega;
    std::vector<PortSpectrum> ports;
    double dt = 0.0;
    double bin_width = 0.0;
    std::size_t steps_per_member = 0;
    double max_conjugate_drift = 0.0;
    OracleConfig config;
};

// Throws InstabilityError for an unstable model or a diverging trajectory and
// IntegrationError when the conjugate-pair structure drifts beyond 1e-6.
OracleRun simulate(const OracleConfig& cfg);

// Frequency intervals around weakly damped resonances (|Re lambda| below the
// bin width) that a Welch estimate of this resolution cannot resolve.
std::vector<std::pair<double, double>> unresolved_bands(const StabilityVerdict& verdict, double bin_width,
                                                        double half_width_bins = 2.0);

// Spectral kernel of the periodic Hann window used by welch_psd. The Welch
// estimate at omega has expectation  integral S(nu) K(omega - nu) dnu,  and K
// integrates to one over a period 2 pi / dt.
double hann_kernel(double u, double dt, std::size_t segment_length);

// Expected Welch estimate at each omega for a process with PSD `psd`. The
// integral runs on a bin_width/32 grid over the requested band plus 16 bins,
// with extra nodes clustered on every pole narrower than that spacing, so
// lines much narrower than a bin still integrate correctly. Outside the
// integration range the PSD is taken as constant.
std::vector<double> welch_expectation(const std::function<double(double)>& psd, std::span<const cplx> poles,
                                      std::span<const double> omega, double dt, std::size_t segment_length);

// Output spectrum of `port` as a Welch estimate with the run's dt and segment
// length would see it, on the run's bins. Column name as in output_spectrum.
SpectrumTable expected_welch_spectrum(const SystemModel& model, const OracleRun& run, std::size_t port,
                                      const TransferOptions& options = {});

struct CompareOptions {
    std::vector<std::pair<double, double>> excluded_bands;
    double z_limit = 3.0;
    double pass_threshold = 0.99;
};

struct ComparisonReport {
    std::vector<double> omega;
    std::vector<double> estimate;
    std::vector<double> predicted;
    std::vector<double> z;
    std::size_t compared = 0;
    std::size_t within = 0;
    std::size_t excluded = 0;
    double pass_fraction = 0.0;
    bool passed = false;
};

// Interpolates the predicted column linearly onto the Welch bins inside its
// range and scores z = (estimate - predicted) / stderr. Bins with zero
// error bars or inside an excluded band are skipped. Throws
// std::invalid_argument when no bin overlaps the predicted range.
ComparisonReport compare(const std::vector<double>& omega, const PortSpectrum& estimate,
                         const SpectrumTable& predicted, const std::string& column,
                         const CompareOptions& options = {});

}  // namespace sasc
