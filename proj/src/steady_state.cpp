#include "sasc/errors.hpp"
#include "sasc/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sasc {

namespace {

struct Reduced {
    double g, eps, delta0, ka, kb, wb;
    double beta;  // Kerr-like shift: D = delta0 - beta |a|^2
};

// All quantities in units of omega_b, where the unit is fixed by the low mode.
Reduced reduce(const BareDriveParams& bare, const ModeParams& high, const ModeParams& low) {
    if (!(high.kappa > 0.0)) throw std::invalid_argument("modes[0].kappa must be positive");
    if (!(low.kappa > 0.0)) throw std::invalid_argument("modes[1].kappa must be positive");
    if (!(low.absolute_frequency > 0.0)) throw std::invalid_argument("modes[1].absolute_frequency must be positive");
    if (!(high.absolute_frequency > 0.0)) throw std::invalid_argument("modes[0].absolute_frequency must be positive");
    if (!(low.detuning > 0.0)) throw std::invalid_argument("modes[1].detuning (low-mode frequency) must be positive");
    if (!(bare.epsilon >= 0.0)) throw std::invalid_argument("drive.epsilon must be non-negative");
    if (!std::isfinite(bare.g) || !std::isfinite(bare.epsilon) || !std::isfinite(bare.drive_frequency)) {
        throw std::invalid_argument("drive parameters must be finite");
    }
    const double unit = low.absolute_frequency / low.detuning;
    Reduced r{};
    r.g = bare.g / unit;
    r.eps = bare.epsilon / unit;
    r.delta0 = (high.absolute_frequency - bare.drive_frequency) / unit;
    r.ka = high.kappa;
    r.kb = low.kappa;
    r.wb = low.detuning;
    r.beta = 2.0 * r.g * r.g * r.wb / (r.wb * r.wb + 0.25 * r.kb * r.kb);
    return r;
}

double cubic(const Reduced& r, double n) {
    const double d = r.delta0 - r.beta * n;
    return n * (d * d + 0.25 * r.ka * r.ka) - r.eps * r.eps;
}

double cubic_derivative(const Reduced& r, double n) {
    return 3.0 * r.beta * r.beta * n * n - 4.0 * r.delta0 * r.beta * n + r.delta0 * r.delta0 + 0.25 * r.ka * r.ka;
}

double polish(const Reduced& r, double n) {
    for (int it = 0; it < 50; ++it) {
        const double d = cubic_derivative(r, n);
        if (d == 0.0) break;
        const double step = cubic(r, n) / d;
        n -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(n))) break;
    }
    return n;
}

MeanFieldBranch make_branch(const Reduced& r, double n) {
    const cplx i{0.0, 1.0};
    MeanFieldBranch br;
    br.occupation = n;
    br.effective_detuning = r.delta0 - r.beta * n;
    br.a = r.eps / (i * br.effective_detuning + 0.5 * r.ka);
    br.b = -i * r.g * std::norm(br.a) / (i * r.wb + 0.5 * r.kb);

    // Substitute back into both fixed-point equations.
    const double d_check = r.delta0 + r.g * 2.0 * br.b.real();
    const cplx a_check = r.eps / (i * d_check + 0.5 * r.ka);
    const cplx b_check = -i * r.g * std::norm(a_check) / (i * r.wb + 0.5 * r.kb);
    const double tiny = 1e-300;
    const double ra = std::abs(a_check - br.a) / std::max(std::abs(br.a), tiny);
    const double rb = std::abs(b_check - br.b) / std::max(std::abs(br.b), tiny);
    br.residual = std::max(br.a == cplx{} ? 0.0 : ra, br.b == cplx{} ? 0.0 : rb);
    return br;
}

}  // namespace

SteadyState solve_steady_state(const BareDriveParams& bare, const ModeParams& high, const ModeParams& low,
                               std::optional<std::size_t> branch_override) {
    const Reduced r = reduce(bare, high, low);
    SteadyState ss;

    std::vector<double> roots;
    if (r.eps == 0.0) {
        // n ((D0 - beta n)^2 + ka^2/4) = 0 has the single real root n = 0.
        roots.push_back(0.0);
    } else if (r.beta == 0.0) {
        roots.push_back(r.eps * r.eps / (r.delta0 * r.delta0 + 0.25 * r.ka * r.ka));
    } else {
        // Monic form n^3 + c2 n^2 + c1 n + c0, then depressed t^3 + p t + q with n = t - c2/3.
        const double b2 = r.beta * r.beta;
        const double c2 = -2.0 * r.delta0 / r.beta;
        const double c1 = (r.delta0 * r.delta0 + 0.25 * r.ka * r.ka) / b2;
        const double c0 = -r.eps * r.eps / b2;
        const double p = c1 - c2 * c2 / 3.0;
        const double q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
        const double shift = -c2 / 3.0;

        const double disc = 4.0 * p * p * p + 27.0 * q * q;  // < 0: three real roots
        const double scale = 4.0 * std::abs(p * p * p) + 27.0 * q * q;
        const double tol = 1e-10 * scale;

        if (std::abs(disc) <= tol) {
            ss.degenerate = true;
            if (p == 0.0) {
                roots = {shift, shift, shift};
            } else {
                const double simple = 3.0 * q / p;
                const double twice = -1.5 * q / p;
                roots = {simple + shift, twice + shift, twice + shift};
            }
        } else if (disc < 0.0) {
            const double m = 2.0 * std::sqrt(-p / 3.0);
            const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
            const double phi = std::acos(arg) / 3.0;
            for (int k = 0; k < 3; ++k) {
                roots.push_back(m * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) + shift);
            }
        } else {
            const double s = std::sqrt(disc / 108.0);
            roots.push_back(std::cbrt(-0.5 * q + s) + std::cbrt(-0.5 * q - s) + shift);
        }
        for (double& n : roots) n = polish(r, n);
        std::sort(roots.begin(), roots.end());
    }

    for (double n : roots) {
        if (!(n >= 0.0)) {
            throw ConvergenceError("solve_steady_state: cubic produced a negative occupation " + std::to_string(n));
        }
        ss.branches.push_back(make_branch(r, n));
        if (ss.branches.back().residual > 1e-10) {
            throw ConvergenceError("solve_steady_state: branch residual " +
                                   std::to_string(ss.branches.back().residual) + " exceeds 1e-10");
        }
    }

    // The smallest occupation is the branch reached from zero drive.
    ss.selected = 0;
    if (branch_override) {
        if (*branch_override >= ss.branches.size()) {
            throw std::invalid_argument("solve_steady_state: branch index " + std::to_string(*branch_override) +
                                        " out of range (" + std::to_string(ss.branches.size()) + " branches)");
        }
        ss.selected = *branch_override;
    }
    return ss;
}

SystemModel linearize_unit(const BareDriveParams& bare, ModeParams high, ModeParams low, double temperature,
                           std::optional<std::size_t> branch_override) {
    const SteadyState ss = solve_steady_state(bare, high, low, branch_override);
    const MeanFieldBranch& br = ss.selected_branch();
    const double unit = low.absolute_frequency / low.detuning;
    const cplx g = (bare.g / unit) * br.a;
    high.detuning = br.effective_detuning;
    return SystemModel::dispersive_unit(std::move(high), std::move(low), CouplingParams{std::abs(g), std::arg(g)},
                                        temperature);
}

}  // namespace sasc
