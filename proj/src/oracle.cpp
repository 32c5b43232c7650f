#include "sasc/errors.hpp"
#include "sasc/oracle.hpp"
#include "sasc/parallel.hpp"
#include "sasc/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace sasc {

namespace {

constexpr double kDriftLimit = 1e-6;
constexpr double kDivergenceLimit = 1e150;

double max_eigen_modulus(const StabilityVerdict& v) {
    double m = 0.0;
    for (const auto& l : v.eigenvalues) m = std::max(m, std::abs(l));
    return m;
}

double step_bound(const StabilityVerdict& v) { return 0.01 / std::max(max_eigen_modulus(v), 1.0); }

// Lower-triangular factor of a real symmetric positive semi-definite matrix;
// columns with a non-positive pivot are zeroed.
std::vector<double> cholesky_psd(std::vector<double> a, std::size_t n) {
    std::vector<double> l(n * n, 0.0);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a[i * n + i]));
    const double tiny = 1e-14 * std::max(scale, 1e-300);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
        if (d <= tiny) continue;
        const double ljj = std::sqrt(d);
        l[j * n + j] = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
            l[i * n + j] = s / ljj;
        }
    }
    return l;
}

// Stationary covariance E[z z^H] expressed in real coordinates
// (Re z_0, Im z_0, Re z_2, Im z_2, ...) of the annihilation channels.
std::vector<double> stationary_real_factor(const ComplexMatrix& drift, const std::vector<double>& damping,
                                           const std::vector<double>& occupations) {
    const std::size_t n = drift.rows();
    ComplexMatrix q(n, n);
    for (std::size_t i = 0; i < n; ++i) q(i, i) = damping[i] * damping[i] * (occupations[i / 2] + 0.5);
    const ComplexMatrix sigma = solve_lyapunov(drift, q);

    // r = T z with T = 1/2 [[1, 1], [-i, i]] per mode.
    ComplexMatrix t(n, n);
    for (std::size_t j = 0; j < n / 2; ++j) {
        t(2 * j, 2 * j) = 0.5;
        t(2 * j, 2 * j + 1) = 0.5;
        t(2 * j + 1, 2 * j) = cplx{0.0, -0.5};
        t(2 * j + 1, 2 * j + 1) = cplx{0.0, 0.5};
    }
    const ComplexMatrix sr = t * sigma * t.adjoint();
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] = 0.5 * (sr(i, j).real() + sr(j, i).real());
    return cholesky_psd(std::move(a), n);
}

struct MemberResult {
    std::vector<std::vector<double>> psd;  // per requested port
    std::vector<double> omega;
    double drift = 0.0;
};

}  // namespace

std::size_t OracleConfig::steps_per_member() const {
    return segment_length + (segments_per_member - 1) * (segment_length - overlap);
}

void OracleConfig::validate() const {
    model.validate();
    if (ensemble < 1) throw std::invalid_argument("oracle.ensemble must be at least 1");
    if (segments_per_member < 1) throw std::invalid_argument("oracle.segments_per_member must be at least 1");
    if (segment_length < 16 || (segment_length & (segment_length - 1)) != 0) {
        throw std::invalid_argument("oracle.segment_length must be a power of two >= 16");
    }
    if (overlap >= segment_length) throw std::invalid_argument("oracle.overlap must be below oracle.segment_length");
    if (!(dt >= 0.0) || !std::isfinite(dt)) throw std::invalid_argument("oracle.dt must be non-negative");
    if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
        throw std::invalid_argument("oracle.noise_scale must be non-negative");
    }
    if (!(max_omega > 0.0)) throw std::invalid_argument("oracle.max_omega must be positive");
    for (std::size_t p : ports) {
        if (p >= model.mode_count()) throw std::invalid_argument("oracle.ports: index " + std::to_string(p) + " out of range");
    }
}

OracleRun simulate(const OracleConfig& cfg) {
    cfg.validate();
    const ComplexMatrix m = build_drift_matrix(cfg.model);
    const StabilityVerdict verdict = check_stability(m);
    if (!verdict.stable) {
        throw InstabilityError(verdict.spectral_abscissa, "oracle: model is unstable, spectral abscissa " +
                                                              std::to_string(verdict.spectral_abscissa));
    }
    const double bound = step_bound(verdict);
    const double dt = cfg.dt == 0.0 ? bound : cfg.dt;
    if (dt > bound * (1.0 + 1e-12)) {
        throw std::invalid_argument("oracle.dt = " + std::to_string(dt) + " exceeds the bound " + std::to_string(bound));
    }

    const std::size_t n = m.rows();
    const std::size_t modes = n / 2;
    const auto damping = damping_diagonal(cfg.model);
    const auto occ = thermal_occupations(cfg.model);
    std::vector<std::size_t> ports = cfg.ports;
    if (ports.empty())
        for (std::size_t p = 0; p < modes; ++p) ports.push_back(p);

    const std::vector<double> chol =
        cfg.stationary_start ? stationary_real_factor(m, damping, occ) : std::vector<double>(n * n, 0.0);
    std::vector<double> sigma(modes);
    for (std::size_t j = 0; j < modes; ++j) sigma[j] = cfg.noise_scale * std::sqrt((occ[j] + 0.5) * dt / 2.0);

    // Each step: half a step of exact drift, the noise kick L dW, another half
    // step. Plain (I + dt M) grows an oscillator of frequency w by w^2 dt / 2
    // per unit time, which swamps the damping of a high-Q mode.
    const ComplexMatrix half = expm(m * cplx{0.5 * dt, 0.0});
    const std::size_t steps = cfg.steps_per_member();
    const cplx rot = std::polar(1.0, -cfg.psi);

    std::vector<MemberResult> members(cfg.ensemble);
    parallel_for(cfg.ensemble, cfg.threads, [&](std::size_t member) {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed & 0xffffffffu), static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(member & 0xffffffffu),
                          static_cast<std::uint32_t>(static_cast<std::uint64_t>(member) >> 32)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> normal(0.0, 1.0);

        std::vector<cplx> z(n), y(n), next(n), dw(modes);
        {
            std::vector<double> g(n), r(n, 0.0);
            for (auto& v : g) v = normal(rng);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = 0; k <= i; ++k) r[i] += chol[i * n + k] * g[k];
            for (std::size_t j = 0; j < modes; ++j) {
                const cplx v = cfg.noise_scale * cplx{r[2 * j], r[2 * j + 1]};
                z[2 * j] = v;
                z[2 * j + 1] = std::conj(v);
            }
        }

        std::vector<std::vector<double>> x(ports.size(), std::vector<double>(steps));
        double drift = 0.0;
        for (std::size_t s = 0; s < steps; ++s) {
            for (std::size_t j = 0; j < modes; ++j) {
                const double re = normal(rng);
                const double im = normal(rng);
                dw[j] = sigma[j] * cplx{re, im};
            }
            for (std::size_t i = 0; i < n; ++i) {
                cplx acc{};
                for (std::size_t k = 0; k < n; ++k) acc += half(i, k) * z[k];
                y[i] = acc;
            }
            // The state at the kick, averaged across it, against the increment
            // of this step keeps the input-output phase error second order in dt.
            for (std::size_t q = 0; q < ports.size(); ++q) {
                const std::size_t p = ports[q];
                const cplx out = damping[2 * p] * (y[2 * p] + 0.5 * damping[2 * p] * dw[p]) - dw[p] / dt;
                x[q][s] = std::numbers::sqrt2 * (out * rot).real();
            }
            for (std::size_t i = 0; i < n; ++i) {
                const cplx noise = (i % 2 == 0) ? dw[i / 2] : std::conj(dw[i / 2]);
                y[i] += damping[i] * noise;
            }
            for (std::size_t i = 0; i < n; ++i) {
                cplx acc{};
                for (std::size_t k = 0; k < n; ++k) acc += half(i, k) * y[k];
                next[i] = acc;
            }
            z.swap(next);
            for (std::size_t j = 0; j < modes; ++j) {
                const cplx a = z[2 * j];
                const double mag = std::abs(a);
                if (!std::isfinite(mag) || mag > kDivergenceLimit) {
                    throw InstabilityError(verdict.spectral_abscissa, "oracle: trajectory diverged at step " +
                                                                          std::to_string(s));
                }
                const double d = std::abs(z[2 * j + 1] - std::conj(a)) / std::max(1.0, mag);
                drift = std::max(drift, d);
            }
            if (drift > kDriftLimit) {
                throw IntegrationError("oracle: conjugate-pair drift " + std::to_string(drift) + " exceeds 1e-6");
            }
        }

        MemberResult res;
        res.drift = drift;
        for (std::size_t q = 0; q < ports.size(); ++q) {
            WelchEstimate w = welch_psd(x[q], dt, cfg.segment_length, cfg.overlap);
            if (q == 0) res.omega = std::move(w.omega);
            res.psd.push_back(std::move(w.psd));
        }
        members[member] = std::move(res);
    });

    OracleRun run;
    run.config = cfg;
    run.dt = dt;
    run.bin_width = 2.0 * std::numbers::pi / (static_cast<double>(cfg.segment_length) * dt);
    run.steps_per_member = steps;
    for (const auto& mr : members) run.max_conjugate_drift = std::max(run.max_conjugate_drift, mr.drift);

    std::vector<std::size_t> keep;
    const auto& grid = members.front().omega;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (std::abs(grid[i]) <= cfg.max_omega) keep.push_back(i);
    for (std::size_t i : keep) run.omega.push_back(grid[i]);

    const double count = static_cast<double>(cfg.ensemble);
    for (std::size_t q = 0; q < ports.size(); ++q) {
        PortSpectrum ps;
        ps.port = ports[q];
        ps.label = cfg.model.modes[ports[q]].label;
        for (std::size_t i : keep) {
            // Members are reduced in index order, so the sum is schedule independent.
            double mean = 0.0;
            for (const auto& mr : members) mean += mr.psd[q][i];
            mean /= count;
            double var = 0.0;
            for (const auto& mr : members) var += (mr.psd[q][i] - mean) * (mr.psd[q][i] - mean);
            const double se = cfg.ensemble > 1 ? std::sqrt(var / (count - 1.0) / count) : 0.0;
            ps.psd.push_back(mean);
            ps.standard_error.push_back(se);
        }
        run.ports.push_back(std::move(ps));
    }
    return run;
}

std::vector<std::pair<double, double>> unresolved_bands(const StabilityVerdict& verdict, double bin_width,
                                                        double half_width_bins) {
    std::vector<std::pair<double, double>> bands;
    const double half = half_width_bins * bin_width;
    for (const auto& l : verdict.eigenvalues) {
        if (std::abs(l.real()) >= bin_width) continue;
        for (const double c : {l.imag(), -l.imag()}) bands.emplace_back(c - half, c + half);
    }
    return bands;
}

double hann_kernel(double u, double dt, std::size_t segment_length) {
    const double n = static_cast<double>(segment_length);
    const double alpha = 2.0 * std::numbers::pi / n;
    // Dirichlet kernel sin(n x / 2) / sin(x / 2) with its limit at multiples of 2 pi.
    const auto dirichlet = [n](double x) {
        const double s = std::sin(0.5 * x);
        if (std::abs(s) < 1e-12) return std::cos(0.5 * (n - 1.0) * x) >= 0.0 ? n : -n;
        return std::sin(0.5 * n * x) / s;
    };
    const double x = u * dt;
    const cplx shift = std::polar(1.0, std::numbers::pi / n);
    const cplx w = 0.5 * dirichlet(x) + 0.25 * std::conj(shift) * dirichlet(x + alpha) +
                   0.25 * shift * dirichlet(x - alpha);
    // sum of w_n^2 for the periodic Hann window is 3n/8
    return std::norm(w) * dt / (2.0 * std::numbers::pi * 0.375 * n);
}

std::vector<double> welch_expectation(const std::function<double(double)>& psd, std::span<const cplx> poles,
                                      std::span<const double> omega, double dt, std::size_t segment_length) {
    if (omega.empty()) return {};
    const double bin = 2.0 * std::numbers::pi / (static_cast<double>(segment_length) * dt);
    const double h = bin / 32.0;
    const auto [lo_it, hi_it] = std::minmax_element(omega.begin(), omega.end());
    const double lo = *lo_it - 16.0 * bin;
    const double hi = *hi_it + 16.0 * bin;

    std::vector<double> nodes;
    const auto count = static_cast<std::size_t>(std::ceil((hi - lo) / h));
    for (std::size_t i = 0; i <= count; ++i) nodes.push_back(lo + (hi - lo) * static_cast<double>(i) / count);
    // A Lorentzian of half-width g around c is flat in phi under c + g tan(phi);
    // an even node count keeps the centre (a pole on the real axis) off the grid.
    // Past 10 g the tan nodes thin out too fast for the trapezoid rule, so the
    // tails up to 4 h get geometrically spaced nodes instead.
    constexpr int kCluster = 400;
    constexpr double kCore = 10.0;
    constexpr double kRatio = 1.02;
    for (const auto& p : poles) {
        const double c = p.real();
        const double g = std::max(std::abs(p.imag()), 1e-9 * std::max(1.0, std::abs(c)));
        if (g >= h || c < lo || c > hi) continue;
        const auto keep = [&](double x) {
            if (x > lo && x < hi) nodes.push_back(x);
        };
        const double phi_max = std::atan(kCore);
        for (int j = 0; j < kCluster; ++j) keep(c + g * std::tan(phi_max * (2.0 * (j + 0.5) / kCluster - 1.0)));
        for (double d = kCore * g; d <= 4.0 * h; d *= kRatio) {
            keep(c - d);
            keep(c + d);
        }
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    std::vector<double> s(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) s[i] = psd(nodes[i]);
    const double tail = 0.5 * (s.front() + s.back());

    std::vector<double> out(omega.size());
    for (std::size_t k = 0; k < omega.size(); ++k) {
        double integral = 0.0, mass = 0.0;
        double prev_k = hann_kernel(omega[k] - nodes[0], dt, segment_length);
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            const double kk = hann_kernel(omega[k] - nodes[i], dt, segment_length);
            const double dx = nodes[i] - nodes[i - 1];
            integral += 0.5 * dx * (s[i - 1] * prev_k + s[i] * kk);
            mass += 0.5 * dx * (prev_k + kk);
            prev_k = kk;
        }
        out[k] = integral + tail * (1.0 - mass);
    }
    return out;
}

SpectrumTable expected_welch_spectrum(const SystemModel& model, const OracleRun& run, std::size_t port,
                                      const TransferOptions& options) {
    if (port >= model.mode_count()) throw std::invalid_argument("expected_welch_spectrum: port out of range");
    const TransferEvaluator ev(model, options);
    const auto occ = thermal_occupations(model);
    const double psi = run.config.psi;
    const double scale = run.config.noise_scale * run.config.noise_scale;
    const auto psd = [&](double w) { return scale * output_spectrum_at(ev.at(w, psi), port, psi, occ); };
    SpectrumTable table;
    table.omega = run.omega;
    table.add_column("S_out_" + model.modes[port].label,
                     welch_expectation(psd, ev.poles(), run.omega, run.dt, run.config.segment_length));
    return table;
}

ComparisonReport compare(const std::vector<double>& omega, const PortSpectrum& estimate,
                         const SpectrumTable& predicted, const std::string& column, const CompareOptions& options) {
    if (omega.size() != estimate.psd.size() || omega.size() != estimate.standard_error.size()) {
        throw std::invalid_argument("compare: estimate does not match its frequency grid");
    }
    const auto& pw = predicted.omega;
    const auto& pv = predicted.column(column);
    if (pw.size() < 2) throw std::invalid_argument("compare: predicted table needs at least 2 rows");

    ComparisonReport rep;
    bool overlap = false;
    for (std::size_t i = 0; i < omega.size(); ++i) {
        const double w = omega[i];
        if (w < pw.front() || w > pw.back()) continue;
        overlap = true;
        const bool banned = std::any_of(options.excluded_bands.begin(), options.excluded_bands.end(),
                                        [&](const auto& b) { return w >= b.first && w <= b.second; });
        if (banned || !(estimate.standard_error[i] > 0.0)) {
            ++rep.excluded;
            continue;
        }
        const auto hi = std::upper_bound(pw.begin(), pw.end(), w);
        const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(hi - pw.begin()), pw.size() - 1);
        const std::size_t k0 = k - 1;
        const double u = (w - pw[k0]) / (pw[k] - pw[k0]);
        const double pred = pv[k0] + u * (pv[k] - pv[k0]);
        const double z = (estimate.psd[i] - pred) / estimate.standard_error[i];
        rep.omega.push_back(w);
        rep.estimate.push_back(estimate.psd[i]);
        rep.predicted.push_back(pred);
        rep.z.push_back(z);
        ++rep.compared;
        if (std::abs(z) <= options.z_limit) ++rep.within;
    }
    if (!overlap) throw std::invalid_argument("compare: estimate and prediction share no frequency support");
    rep.pass_fraction = rep.compared > 0 ? static_cast<double>(rep.within) / static_cast<double>(rep.compared) : 0.0;
    rep.passed = rep.compared > 0 && rep.pass_fraction >= options.pass_threshold;
    return rep;
}

}  // namespace sasc
