// spectra.hpp: transfer matrices, transmission and asymmetry coefficients,
// thermal occupations, homodyne output, amplification and SNR spectra.
//
// Channel indices are 0-based: mode j owns channels 2j (annihilation) and
// 2j+1 (creation). Frequencies are in units of omega_b.
#pragma once

#include "sasc/model.hpp"
#include "sasc/numerics.hpp"
#include "sasc/table.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace sasc {

// kPairedConjugate uses Lambda = diag(-1, 1, -1, 1, ...), so each creation
// channel is evaluated at +omega and P Gamma P = Gamma* holds at real omega.
// kFourier uses Lambda = -I, the Fourier transform of the time-domain
// equations; it is what a sampled trajectory measures.
enum class FrequencyConvention { kPairedConjugate, kFourier };

struct TransferOptions {
    FrequencyConvention convention = FrequencyConvention::kPairedConjugate;
    bool allow_unstable = false;
};

struct TransferResult {
    double omega = 0.0;
    ComplexMatrix gamma;
    double psi = 0.0;
};

// Caches M, L and the stability verdict so repeated frequencies are cheap.
class TransferEvaluator {
public:
    // Throws InstabilityError unless the model is stable or allow_unstable is set.
    explicit TransferEvaluator(SystemModel model, TransferOptions options = {});

    const SystemModel& model() const noexcept { return model_; }
    const ComplexMatrix& drift() const noexcept { return drift_; }
    const StabilityVerdict& stability() const noexcept { return stability_; }
    const TransferOptions& options() const noexcept { return options_; }

    // Throws SingularMatrixError when i omega Lambda - M is singular.
    TransferResult at(double omega, double psi = 0.0) const;

    // Complex omega where i omega Lambda - M is singular (eigenvalues of -i Lambda M).
    // Under kFourier these are i lambda(M); under kPairedConjugate they differ,
    // and the transfer peaks sit at their real parts, not at Im lambda(M).
    const std::vector<cplx>& poles() const noexcept { return poles_; }

private:
    SystemModel model_;
    TransferOptions options_;
    ComplexMatrix drift_;
    std::vector<double> damping_;
    StabilityVerdict stability_;
    std::vector<cplx> poles_;
};

TransferResult transfer_matrix(const SystemModel& model, double omega, const TransferOptions& options = {});

// ---------------------------------------------------------------------------

struct DuTransmission {
    double t_a = 0.0, t_b = 0.0;
    double t_a_plus = 0.0, t_a_minus = 0.0;
    double t_b_plus = 0.0, t_b_minus = 0.0;
};

struct ThreeModeTransmission {
    double t_m_pm = 0.0;  // m -> b, |G13 + G23|^2
    double t_pm_b = 0.0;  // b -> m, |G31 + G41|^2
    double t_b_pm = 0.0;  // c -> b, |G35 + G45|^2
    double t_pm_c = 0.0;  // b -> c, |G53 + G63|^2
};

DuTransmission transmission_du(const TransferResult& tr);
ThreeModeTransmission transmission_three(const TransferResult& tr);

inline constexpr double kAsymmetryFloor = 1e-300;

// (t_plus - t_minus) / (t_plus + t_minus); throws UndefinedAsymmetryError when both vanish.
double asymmetry(double t_plus, double t_minus);

double r_ab(const DuTransmission& t);
double r_mb(const ThreeModeTransmission& t);
double r_bc(const ThreeModeTransmission& t);

// ---------------------------------------------------------------------------

inline constexpr double kHbar = 1.054571817e-34;     // J s
inline constexpr double kBoltzmann = 1.380649e-23;   // J / K

double thermal_occupation(double absolute_frequency, double temperature);
std::vector<double> thermal_occupations(const SystemModel& model);

// chi_j = 1 / (i (Delta_j - omega) + kappa_j / 2)
cplx susceptibility(double detuning, double kappa, double omega);

// C_k = (Gamma[2p][k] e^{-i psi} + Gamma[2p+1][k] e^{i psi}) / sqrt 2, k over all channels.
std::vector<cplx> quadrature_coefficients(const TransferResult& tr, std::size_t port, double psi);

// Symmetrized homodyne output spectrum of a port: sum_k |C_k|^2 (n_k + 1/2).
double output_spectrum_at(const TransferResult& tr, std::size_t port, double psi,
                          std::span<const double> occupations);

// |C_{s,+} + C_{s,-}|^2 for a unit Hermitian signal riding the signal port's input.
double amplification_at(const TransferResult& tr, std::size_t signal_port, std::size_t readout_port, double psi);

// S_AP / sum_j (|C_{j,+}|^2 + |C_{j,-}|^2)(n_j + 1/2); zero when S_AP is zero.
double snr_at(const TransferResult& tr, std::size_t signal_port, std::size_t readout_port, double psi,
              std::span<const double> occupations);

// ---------------------------------------------------------------------------
// Grid evaluations. Rows are independent and computed with up to `threads` workers.

struct FrequencyGrid {
    double min = -3.0;
    double max = 3.0;
    std::size_t points = 1201;

    std::vector<double> values() const;
};

SpectrumTable output_spectrum(const SystemModel& model, std::span<const double> omegas, std::size_t port,
                              double psi = 0.0, const TransferOptions& options = {}, unsigned threads = 1);

SpectrumTable amplification_spectrum(const SystemModel& model, std::span<const double> omegas,
                                     std::size_t signal_port, std::size_t readout_port, double psi = 0.0,
                                     const TransferOptions& options = {}, unsigned threads = 1);

// Columns S_AP and S_SNR.
SpectrumTable snr_spectrum(const SystemModel& model, std::span<const double> omegas, std::size_t signal_port,
                           std::size_t readout_port, double psi = 0.0, const TransferOptions& options = {},
                           unsigned threads = 1);

// DU: T_a, T_b, T_a+, T_a-, T_b+, T_b-, R_ab. ThreeMode: T_m+-, T_+-b, T_b+-, T_+-c, R_mb, R_bc.
// R columns hold NaN-free values; an undefined asymmetry is reported as 0 with a flag column.
SpectrumTable transmission_spectrum(const SystemModel& model, std::span<const double> omegas,
                                    const TransferOptions& options = {}, unsigned threads = 1);

}  // namespace sasc
