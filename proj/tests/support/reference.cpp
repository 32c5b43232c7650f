#include "reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ref {

namespace {

constexpr cplx kI{0.0, 1.0};

ComplexMatrix minor_of(const ComplexMatrix& a, std::size_t row, std::size_t col) {
    const std::size_t n = a.rows();
    ComplexMatrix m(n - 1, n - 1);
    for (std::size_t i = 0, r = 0; i < n; ++i) {
        if (i == row) continue;
        for (std::size_t j = 0, c = 0; j < n; ++j) {
            if (j == col) continue;
            m(r, c++) = a(i, j);
        }
        ++r;
    }
    return m;
}

sasc::ModeParams mode(const char* label, sasc::ModeKind kind, double hz, double kappa, double detuning) {
    return sasc::ModeParams{label, kind, 2.0 * std::numbers::pi * hz, kappa, detuning};
}

}  // namespace

std::vector<cplx> charpoly(const ComplexMatrix& a) {
    const std::size_t n = a.rows();
    std::vector<cplx> c(n + 1);
    c[n] = 1.0;
    ComplexMatrix mk(n, n);  // M_0 = 0
    for (std::size_t k = 1; k <= n; ++k) {
        ComplexMatrix next = a * mk;
        for (std::size_t i = 0; i < n; ++i) next(i, i) += c[n - k + 1];
        mk = next;
        const ComplexMatrix am = a * mk;
        cplx tr{};
        for (std::size_t i = 0; i < n; ++i) tr += am(i, i);
        c[n - k] = -tr / static_cast<double>(k);
    }
    return c;
}

std::vector<cplx> poly_roots(const std::vector<cplx>& coeffs) {
    const std::size_t n = coeffs.size() - 1;
    const cplx lead = coeffs[n];
    // Cauchy bound for the initial circle.
    double radius = 0.0;
    for (std::size_t k = 0; k < n; ++k) radius = std::max(radius, std::abs(coeffs[k] / lead));
    radius += 1.0;
    std::vector<cplx> z(n);
    for (std::size_t k = 0; k < n; ++k) z[k] = std::polar(radius, 2.0 * std::numbers::pi * (k + 0.25) / n + 0.4);

    const auto eval = [&](cplx x, cplx& dp) {
        cplx p = coeffs[n];
        dp = 0.0;
        for (std::size_t k = n; k-- > 0;) {
            dp = dp * x + p;
            p = p * x + coeffs[k];
        }
        return p;
    };
    for (int it = 0; it < 500; ++it) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cplx dp;
            const cplx p = eval(z[i], dp);
            if (p == cplx{}) continue;
            const cplx ratio = p / dp;
            cplx sum{};
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) sum += 1.0 / (z[i] - z[j]);
            const cplx w = ratio / (1.0 - ratio * sum);
            z[i] -= w;
            worst = std::max(worst, std::abs(w) / std::max(1.0, std::abs(z[i])));
        }
        if (worst < 1e-15) break;
    }
    return z;
}

cplx determinant(const ComplexMatrix& a) {
    const std::size_t n = a.rows();
    if (n == 0) return 1.0;
    if (n == 1) return a(0, 0);
    if (n == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    cplx det{};
    for (std::size_t j = 0; j < n; ++j) {
        if (a(0, j) == cplx{}) continue;
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        det += sign * a(0, j) * determinant(minor_of(a, 0, j));
    }
    return det;
}

ComplexMatrix cofactor_inverse(const ComplexMatrix& a) {
    const std::size_t n = a.rows();
    const cplx det = determinant(a);
    if (det == cplx{}) throw std::runtime_error("cofactor_inverse: singular");
    ComplexMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            inv(j, i) = sign * determinant(minor_of(a, i, j)) / det;
        }
    return inv;
}

ComplexMatrix drift_from_equations(const sasc::SystemModel& model) {
    const std::size_t n = model.mode_count();
    ComplexMatrix m(2 * n, 2 * n);
    // H = sum_high D a^+ a + sum_low w b^+ b + sum_links (G* a + G a^+)(b + b^+)
    // da/dt = -i[a, H] - k/2 a, so each annihilation row reads off -i dH/da^+.
    for (std::size_t j = 0; j < n; ++j) {
        const auto& md = model.modes[j];
        m(2 * j, 2 * j) = -(kI * md.detuning + 0.5 * md.kappa);
    }
    for (std::size_t k = 0; k < model.couplings.size(); ++k) {
        const std::size_t left = k;
        const std::size_t right = k + 1;
        const bool left_high = model.modes[left].kind == sasc::ModeKind::kHigh;
        const std::size_t h = left_high ? left : right;
        const std::size_t l = left_high ? right : left;
        const cplx g = model.couplings[k].value();
        // high: da/dt += -i G (b + b^+)
        m(2 * h, 2 * l) += -kI * g;
        m(2 * h, 2 * l + 1) += -kI * g;
        // low: db/dt += -i (G* a + G a^+)
        m(2 * l, 2 * h) += -kI * std::conj(g);
        m(2 * l, 2 * h + 1) += -kI * g;
    }
    // Creation rows: d(x^+)/dt is the conjugate of d(x)/dt with every operator daggered.
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t c = 0; c < 2 * n; ++c) {
            const std::size_t partner = (c % 2 == 0) ? c + 1 : c - 1;
            m(2 * j + 1, partner) = std::conj(m(2 * j, c));
        }
    return m;
}

ComplexMatrix transfer(const sasc::SystemModel& model, double omega, bool fourier) {
    const ComplexMatrix m = drift_from_equations(model);
    const std::size_t n = m.rows();
    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a(i, j) = -m(i, j);
        const double lambda = (fourier || i % 2 == 0) ? -1.0 : 1.0;
        a(i, i) += kI * omega * lambda;
    }
    ComplexMatrix g = cofactor_inverse(a);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            g(i, j) *= std::sqrt(model.modes[i / 2].kappa * model.modes[j / 2].kappa);
            if (i == j) g(i, j) -= 1.0;
        }
    return g;
}

MeanField integrate_mean_field(const sasc::BareDriveParams& bare, const sasc::ModeParams& high,
                               const sasc::ModeParams& low, cplx a0, cplx b0, double t_end, double dt) {
    const double unit = low.absolute_frequency / low.detuning;
    const double g = bare.g / unit;
    const double eps = bare.epsilon / unit;
    const double d0 = (high.absolute_frequency - bare.drive_frequency) / unit;
    const double wb = low.detuning;
    const auto rhs = [&](cplx a, cplx b, cplx& da, cplx& db) {
        const double d = d0 + g * 2.0 * b.real();
        da = -(kI * d + 0.5 * high.kappa) * a + eps;
        db = -(kI * wb + 0.5 * low.kappa) * b - kI * g * std::norm(a);
    };
    cplx a = a0, b = b0;
    const auto steps = static_cast<long>(std::ceil(t_end / dt));
    for (long s = 0; s < steps; ++s) {
        cplx ka1, kb1, ka2, kb2, ka3, kb3, ka4, kb4;
        rhs(a, b, ka1, kb1);
        rhs(a + 0.5 * dt * ka1, b + 0.5 * dt * kb1, ka2, kb2);
        rhs(a + 0.5 * dt * ka2, b + 0.5 * dt * kb2, ka3, kb3);
        rhs(a + dt * ka3, b + dt * kb3, ka4, kb4);
        a += dt / 6.0 * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
        b += dt / 6.0 * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4);
    }
    return {a, b};
}

double growth_rate(const ComplexMatrix& m, double t_end, double dt) {
    const std::size_t n = m.rows();
    std::vector<cplx> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = cplx{1.0 + 0.1 * i, 0.3 - 0.05 * i};
    const auto norm = [](const std::vector<cplx>& v) {
        double s = 0.0;
        for (const auto& x : v) s += std::norm(x);
        return std::sqrt(s);
    };
    const double n0 = norm(z);
    double log_scale = 0.0;
    const auto steps = static_cast<long>(std::ceil(t_end / dt));
    const auto f = [&](const std::vector<cplx>& x) { return m * std::span<const cplx>(x); };
    for (long s = 0; s < steps; ++s) {
        const auto k1 = f(z);
        std::vector<cplx> t(n);
        for (std::size_t i = 0; i < n; ++i) t[i] = z[i] + 0.5 * dt * k1[i];
        const auto k2 = f(t);
        for (std::size_t i = 0; i < n; ++i) t[i] = z[i] + 0.5 * dt * k2[i];
        const auto k3 = f(t);
        for (std::size_t i = 0; i < n; ++i) t[i] = z[i] + dt * k3[i];
        const auto k4 = f(t);
        for (std::size_t i = 0; i < n; ++i) z[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        // Renormalize to keep growing solutions representable.
        const double nz = norm(z);
        log_scale += std::log(nz);
        for (auto& x : z) x /= nz;
    }
    return (log_scale - std::log(n0)) / (steps * dt);
}

sasc::SystemModel random_stable_du(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        const auto a = mode("a", sasc::ModeKind::kHigh, 1e10, std::pow(10.0, -2.0 + 4.0 * u(rng)), -2.0 + 4.0 * u(rng));
        const auto b = mode("b", sasc::ModeKind::kLow, 1e7, std::pow(10.0, -4.0 + 3.0 * u(rng)), 1.0);
        const sasc::CouplingParams g{0.3 * u(rng), 2.0 * std::numbers::pi * u(rng)};
        auto model = sasc::SystemModel::dispersive_unit(a, b, g, 0.01 * u(rng));
        if (sasc::check_stability(sasc::build_drift_matrix(model)).stable) return model;
    }
}

sasc::SystemModel random_stable_three(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        const auto m = mode("m", sasc::ModeKind::kHigh, 1e10, std::pow(10.0, -2.0 + 3.0 * u(rng)), -2.0 + 4.0 * u(rng));
        const auto b = mode("b", sasc::ModeKind::kLow, 1e7, std::pow(10.0, -4.0 + 3.0 * u(rng)), 1.0);
        const auto c = mode("c", sasc::ModeKind::kHigh, 2.8e14, std::pow(10.0, -2.0 + 3.0 * u(rng)), -2.0 + 4.0 * u(rng));
        const sasc::CouplingParams gm{0.3 * u(rng), 2.0 * std::numbers::pi * u(rng)};
        const sasc::CouplingParams gc{0.3 * u(rng), 2.0 * std::numbers::pi * u(rng)};
        auto model = sasc::SystemModel::three_mode(m, b, c, gm, gc, 0.01 * u(rng));
        if (sasc::check_stability(sasc::build_drift_matrix(model)).stable) return model;
    }
}

sasc::SystemModel fig2_model(double kappa_a) {
    return sasc::SystemModel::dispersive_unit(mode("a", sasc::ModeKind::kHigh, 1e10, kappa_a, 0.0),
                                              mode("b", sasc::ModeKind::kLow, 1e7, 1e-4, 1.0),
                                              sasc::CouplingParams{0.1, 0.0}, 0.01);
}

sasc::SystemModel fig3_model() {
    return sasc::SystemModel::three_mode(mode("m", sasc::ModeKind::kHigh, 1e10, 1.0, 0.0),
                                         mode("b", sasc::ModeKind::kLow, 1e7, 1e-4, 1.0),
                                         mode("c", sasc::ModeKind::kHigh, 2.8176e14, 1.0, 0.0),
                                         sasc::CouplingParams{0.1, 0.0}, sasc::CouplingParams{0.1, 0.0}, 0.01);
}

sasc::SystemModel fig4_model() {
    return sasc::SystemModel::three_mode(mode("m", sasc::ModeKind::kHigh, 1e10, 1.0, 0.0),
                                         mode("b", sasc::ModeKind::kLow, 1e7, 1e-4, 1.0),
                                         mode("c", sasc::ModeKind::kHigh, 2.8176e14, 0.1, 0.0),
                                         sasc::CouplingParams{0.2, 1.161}, sasc::CouplingParams{0.1, 1.617}, 0.01);
}

ComplexMatrix random_well_conditioned(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = cplx{g(rng), g(rng)};
    for (std::size_t i = 0; i < n; ++i) a(i, i) += cplx{2.0 * static_cast<double>(n), 0.0};
    return a;
}

}  // namespace ref
