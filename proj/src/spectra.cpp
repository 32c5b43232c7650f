#include "sasc/errors.hpp"
#include "sasc/parallel.hpp"
#include "sasc/spectra.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace sasc {

namespace {

const cplx kI{0.0, 1.0};

std::string abscissa_message(double abscissa) {
    std::ostringstream os;
    os.precision(6);
    os << "model is unstable: spectral abscissa " << abscissa << " >= -" << kStabilityMargin;
    return os.str();
}

void require_port(const TransferResult& tr, std::size_t port, const char* who) {
    if (2 * port + 1 >= tr.gamma.rows()) {
        throw std::invalid_argument(std::string(who) + ": port " + std::to_string(port) + " out of range");
    }
}

template <typename RowFn>
SpectrumTable tabulate(std::span<const double> omegas, std::vector<std::string> names, unsigned threads,
                       RowFn&& row) {
    SpectrumTable table;
    table.omega.assign(omegas.begin(), omegas.end());
    std::vector<std::vector<double>> cols(names.size(), std::vector<double>(omegas.size()));
    parallel_for(omegas.size(), threads, [&](std::size_t i) {
        const std::vector<double> values = row(omegas[i]);
        for (std::size_t c = 0; c < values.size(); ++c) cols[c][i] = values[c];
    });
    for (std::size_t c = 0; c < names.size(); ++c) table.add_column(std::move(names[c]), std::move(cols[c]));
    table.validate();
    return table;
}

double checked_asymmetry(double plus, double minus, double& defined) {
    if (plus < kAsymmetryFloor && minus < kAsymmetryFloor) {
        defined = 0.0;
        return 0.0;
    }
    defined = 1.0;
    return asymmetry(plus, minus);
}

double lambda_entry(FrequencyConvention c, std::size_t channel) {
    return (c == FrequencyConvention::kFourier || channel % 2 == 0) ? -1.0 : 1.0;
}

}  // namespace

TransferEvaluator::TransferEvaluator(SystemModel model, TransferOptions options)
    : model_(std::move(model)), options_(options) {
    drift_ = build_drift_matrix(model_);
    damping_ = damping_diagonal(model_);
    stability_ = check_stability(drift_);
    if (!stability_.stable && !options_.allow_unstable) {
        throw InstabilityError(stability_.spectral_abscissa, abscissa_message(stability_.spectral_abscissa));
    }
    const std::size_t n = drift_.rows();
    ComplexMatrix lm(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lambda = lambda_entry(options_.convention, i);
        for (std::size_t j = 0; j < n; ++j) lm(i, j) = -kI * lambda * drift_(i, j);
    }
    poles_ = eigenvalues(lm);
}

TransferResult TransferEvaluator::at(double omega, double psi) const {
    const std::size_t n = drift_.rows();
    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lambda = lambda_entry(options_.convention, i);
        for (std::size_t j = 0; j < n; ++j) a(i, j) = -drift_(i, j);
        a(i, i) += kI * omega * lambda;
    }
    ComplexMatrix rhs(n, n);
    for (std::size_t i = 0; i < n; ++i) rhs(i, i) = damping_[i];
    ComplexMatrix x = lu_solve(a, rhs);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) x(i, j) *= damping_[i];
        x(i, i) -= 1.0;
    }
    return TransferResult{omega, std::move(x), psi};
}

TransferResult transfer_matrix(const SystemModel& model, double omega, const TransferOptions& options) {
    return TransferEvaluator(model, options).at(omega);
}

// ---------------------------------------------------------------------------

namespace {

// |Gamma[r][c] + Gamma[r+1][c]|^2 with 0-based r, c.
double pair_sum(const ComplexMatrix& g, std::size_t r, std::size_t c) {
    return std::norm(g(r, c) + g(r + 1, c));
}

}  // namespace

DuTransmission transmission_du(const TransferResult& tr) {
    const auto& g = tr.gamma;
    if (g.rows() != 4 || g.cols() != 4) throw std::invalid_argument("transmission_du: expected a 4x4 transfer matrix");
    DuTransmission t;
    t.t_a = pair_sum(g, 0, 0);
    t.t_b = pair_sum(g, 2, 2);
    t.t_a_plus = pair_sum(g, 0, 2);
    t.t_a_minus = pair_sum(g, 0, 3);
    t.t_b_plus = pair_sum(g, 2, 0);
    t.t_b_minus = pair_sum(g, 2, 1);
    return t;
}

ThreeModeTransmission transmission_three(const TransferResult& tr) {
    const auto& g = tr.gamma;
    if (g.rows() != 6 || g.cols() != 6) {
        throw std::invalid_argument("transmission_three: expected a 6x6 transfer matrix");
    }
    ThreeModeTransmission t;
    t.t_m_pm = pair_sum(g, 0, 2);
    t.t_pm_b = pair_sum(g, 2, 0);
    t.t_b_pm = pair_sum(g, 2, 4);
    t.t_pm_c = pair_sum(g, 4, 2);
    return t;
}

double asymmetry(double t_plus, double t_minus) {
    if (!(t_plus >= 0.0) || !(t_minus >= 0.0)) {
        throw std::invalid_argument("asymmetry: transmission coefficients must be non-negative");
    }
    if (t_plus < kAsymmetryFloor && t_minus < kAsymmetryFloor) {
        throw UndefinedAsymmetryError("asymmetry: both transmission coefficients vanish");
    }
    return (t_plus - t_minus) / (t_plus + t_minus);
}

double r_ab(const DuTransmission& t) { return asymmetry(t.t_a_plus, t.t_b_minus); }
double r_mb(const ThreeModeTransmission& t) { return asymmetry(t.t_m_pm, t.t_pm_b); }
double r_bc(const ThreeModeTransmission& t) { return asymmetry(t.t_b_pm, t.t_pm_c); }

// ---------------------------------------------------------------------------

double thermal_occupation(double absolute_frequency, double temperature) {
    if (!(absolute_frequency > 0.0)) throw std::invalid_argument("thermal_occupation: frequency must be positive");
    if (!(temperature >= 0.0)) throw std::invalid_argument("thermal_occupation: temperature must be non-negative");
    if (temperature == 0.0) return 0.0;
    const double x = kHbar * absolute_frequency / (kBoltzmann * temperature);
    return 1.0 / std::expm1(x);
}

std::vector<double> thermal_occupations(const SystemModel& model) {
    std::vector<double> n;
    n.reserve(model.mode_count());
    for (const auto& m : model.modes) n.push_back(thermal_occupation(m.absolute_frequency, model.temperature));
    return n;
}

cplx susceptibility(double detuning, double kappa, double omega) {
    if (!(kappa > 0.0)) throw std::invalid_argument("susceptibility: kappa must be positive");
    return 1.0 / (kI * (detuning - omega) + 0.5 * kappa);
}

std::vector<cplx> quadrature_coefficients(const TransferResult& tr, std::size_t port, double psi) {
    require_port(tr, port, "quadrature_coefficients");
    const std::size_t n = tr.gamma.cols();
    const cplx em = std::polar(1.0, -psi);
    const cplx ep = std::polar(1.0, psi);
    std::vector<cplx> c(n);
    for (std::size_t k = 0; k < n; ++k) {
        c[k] = (tr.gamma(2 * port, k) * em + tr.gamma(2 * port + 1, k) * ep) / std::numbers::sqrt2;
    }
    return c;
}

double output_spectrum_at(const TransferResult& tr, std::size_t port, double psi,
                          std::span<const double> occupations) {
    const auto c = quadrature_coefficients(tr, port, psi);
    if (occupations.size() * 2 != c.size()) {
        throw std::invalid_argument("output_spectrum_at: occupation count does not match mode count");
    }
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) s += std::norm(c[k]) * (occupations[k / 2] + 0.5);
    return s;
}

double amplification_at(const TransferResult& tr, std::size_t signal_port, std::size_t readout_port, double psi) {
    require_port(tr, signal_port, "amplification_at");
    const auto c = quadrature_coefficients(tr, readout_port, psi);
    return std::norm(c[2 * signal_port] + c[2 * signal_port + 1]);
}

double snr_at(const TransferResult& tr, std::size_t signal_port, std::size_t readout_port, double psi,
              std::span<const double> occupations) {
    require_port(tr, signal_port, "snr_at");
    const auto c = quadrature_coefficients(tr, readout_port, psi);
    if (occupations.size() * 2 != c.size()) {
        throw std::invalid_argument("snr_at: occupation count does not match mode count");
    }
    const double sap = std::norm(c[2 * signal_port] + c[2 * signal_port + 1]);
    if (sap == 0.0) return 0.0;
    double noise = 0.0;
    for (std::size_t j = 0; j < occupations.size(); ++j) {
        noise += (std::norm(c[2 * j]) + std::norm(c[2 * j + 1])) * (occupations[j] + 0.5);
    }
    return sap / noise;
}

// ---------------------------------------------------------------------------

std::vector<double> FrequencyGrid::values() const {
    if (points < 2) throw std::invalid_argument("grid.points must be at least 2");
    if (!(max > min)) throw std::invalid_argument("grid.max must exceed grid.min");
    std::vector<double> v(points);
    const double step = (max - min) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) v[i] = min + step * static_cast<double>(i);
    v.back() = max;
    return v;
}

SpectrumTable output_spectrum(const SystemModel& model, std::span<const double> omegas, std::size_t port,
                              double psi, const TransferOptions& options, unsigned threads) {
    const TransferEvaluator ev(model, options);
    if (port >= model.mode_count()) throw std::invalid_argument("output_spectrum: port out of range");
    const auto occ = thermal_occupations(model);
    return tabulate(omegas, {"S_out_" + model.modes[port].label}, threads, [&](double w) {
        return std::vector<double>{output_spectrum_at(ev.at(w), port, psi, occ)};
    });
}

SpectrumTable amplification_spectrum(const SystemModel& model, std::span<const double> omegas,
                                     std::size_t signal_port, std::size_t readout_port, double psi,
                                     const TransferOptions& options, unsigned threads) {
    const TransferEvaluator ev(model, options);
    return tabulate(omegas, {"S_AP"}, threads, [&](double w) {
        return std::vector<double>{amplification_at(ev.at(w), signal_port, readout_port, psi)};
    });
}

SpectrumTable snr_spectrum(const SystemModel& model, std::span<const double> omegas, std::size_t signal_port,
                           std::size_t readout_port, double psi, const TransferOptions& options,
                           unsigned threads) {
    const TransferEvaluator ev(model, options);
    const auto occ = thermal_occupations(model);
    return tabulate(omegas, {"S_AP", "S_SNR"}, threads, [&](double w) {
        const TransferResult tr = ev.at(w);
        return std::vector<double>{amplification_at(tr, signal_port, readout_port, psi),
                                   snr_at(tr, signal_port, readout_port, psi, occ)};
    });
}

SpectrumTable transmission_spectrum(const SystemModel& model, std::span<const double> omegas,
                                    const TransferOptions& options, unsigned threads) {
    const TransferEvaluator ev(model, options);
    switch (model.topology) {
        case Topology::kDispersiveUnit:
            return tabulate(omegas, {"T_a", "T_b", "T_a+", "T_a-", "T_b+", "T_b-", "R_ab", "R_ab_defined"}, threads,
                            [&](double w) {
                                const auto t = transmission_du(ev.at(w));
                                double def = 0.0;
                                const double r = checked_asymmetry(t.t_a_plus, t.t_b_minus, def);
                                return std::vector<double>{t.t_a,      t.t_b,       t.t_a_plus, t.t_a_minus,
                                                           t.t_b_plus, t.t_b_minus, r,          def};
                            });
        case Topology::kThreeMode:
            return tabulate(omegas, {"T_m+-", "T_+-b", "T_b+-", "T_+-c", "R_mb", "R_bc", "R_mb_defined", "R_bc_defined"},
                            threads, [&](double w) {
                                const auto t = transmission_three(ev.at(w));
                                double dm = 0.0, dc = 0.0;
                                const double rm = checked_asymmetry(t.t_m_pm, t.t_pm_b, dm);
                                const double rc = checked_asymmetry(t.t_b_pm, t.t_pm_c, dc);
                                return std::vector<double>{t.t_m_pm, t.t_pm_b, t.t_b_pm, t.t_pm_c, rm, rc, dm, dc};
                            });
        case Topology::kChain: break;
    }
    throw std::invalid_argument("transmission_spectrum: chains have no named transmission set");
}

}  // namespace sasc
