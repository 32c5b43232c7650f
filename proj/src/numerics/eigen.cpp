#include "sasc/errors.hpp"
#include "sasc/numerics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace sasc {

namespace {

// Householder reduction to upper Hessenberg form, in place.
void reduce_to_hessenberg(ComplexMatrix& h) {
    const std::size_t n = h.rows();
    if (n < 3) return;
    std::vector<cplx> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double norm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) norm2 += std::norm(h(i, k));
        const double norm = std::sqrt(norm2);
        if (norm == 0.0) continue;

        const cplx x0 = h(k + 1, k);
        const cplx phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx{1.0, 0.0};
        const cplx alpha = -phase * norm;

        for (std::size_t i = 0; i < n; ++i) v[i] = 0.0;
        v[k + 1] = x0 - alpha;
        for (std::size_t i = k + 2; i < n; ++i) v[i] = h(i, k);
        double vnorm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vnorm2 += std::norm(v[i]);
        if (vnorm2 == 0.0) continue;
        const double scale = 2.0 / vnorm2;

        // H <- (I - scale v v^H) H
        for (std::size_t j = 0; j < n; ++j) {
            cplx s{};
            for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * h(i, j);
            s *= scale;
            for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= v[i] * s;
        }
        // H <- H (I - scale v v^H)
        for (std::size_t i = 0; i < n; ++i) {
            cplx s{};
            for (std::size_t j = k + 1; j < n; ++j) s += h(i, j) * v[j];
            s *= scale;
            for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= s * std::conj(v[j]);
        }
        for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
    }
}

struct Givens {
    double c = 1.0;
    cplx s{};
};

// G [a; b] = [r; 0] with G = [[c, s], [-conj(s), c]].
Givens make_givens(cplx a, cplx b) {
    const double abs_a = std::abs(a);
    const double abs_b = std::abs(b);
    if (abs_b == 0.0) return {};
    if (abs_a == 0.0) return {0.0, std::conj(b) / abs_b};
    const double r = std::hypot(abs_a, abs_b);
    return {abs_a / r, (a / abs_a) * std::conj(b) / r};
}

}  // namespace

std::vector<cplx> eigenvalues(const ComplexMatrix& a, int max_sweeps) {
    if (!a.is_square()) throw std::invalid_argument("eigenvalues: matrix is not square");
    const std::size_t n = a.rows();
    if (n > kMaxEigenSize) throw std::invalid_argument("eigenvalues: matrix larger than supported size");
    if (n == 0) return {};

    ComplexMatrix h = a;
    reduce_to_hessenberg(h);

    const double eps = std::numeric_limits<double>::epsilon();
    const double anorm = std::max(h.norm_inf(), std::numeric_limits<double>::min());
    std::vector<cplx> eig(n);
    std::vector<Givens> rot(n);

    int sweeps = 0;
    int since_deflation = 0;
    std::size_t hi = n - 1;
    while (true) {
        if (hi == 0) {
            eig[0] = h(0, 0);
            break;
        }
        std::size_t lo = hi;
        while (lo > 0) {
            const double sub = std::abs(h(lo, lo - 1));
            const double diag = std::abs(h(lo, lo)) + std::abs(h(lo - 1, lo - 1));
            if (sub <= eps * (diag > 0.0 ? diag : anorm)) {
                h(lo, lo - 1) = 0.0;
                break;
            }
            --lo;
        }
        if (lo == hi) {
            eig[hi] = h(hi, hi);
            --hi;
            since_deflation = 0;
            continue;
        }
        if (++sweeps > max_sweeps) {
            throw ConvergenceError("eigenvalues: QR iteration did not converge within " +
                                   std::to_string(max_sweeps) + " sweeps");
        }
        ++since_deflation;

        // Wilkinson shift from the trailing 2x2 block of the active window.
        const cplx p = h(hi - 1, hi - 1);
        const cplx q = h(hi - 1, hi);
        const cplx r = h(hi, hi - 1);
        const cplx s = h(hi, hi);
        cplx mu;
        if (since_deflation % 11 == 0) {
            mu = s + cplx{0.75 * std::abs(r), 0.0};  // exceptional shift
        } else {
            const cplx half = 0.5 * (p - s);
            const cplx disc = std::sqrt(half * half + q * r);
            const cplx mid = 0.5 * (p + s);
            const cplx c1 = mid - disc;
            const cplx c2 = mid + disc;
            mu = std::abs(c1 - s) < std::abs(c2 - s) ? c1 : c2;
        }

        for (std::size_t k = lo; k <= hi; ++k) h(k, k) -= mu;
        for (std::size_t k = lo; k < hi; ++k) {
            const Givens g = make_givens(h(k, k), h(k + 1, k));
            rot[k] = g;
            for (std::size_t j = k; j <= hi; ++j) {
                const cplx x = h(k, j);
                const cplx y = h(k + 1, j);
                h(k, j) = g.c * x + g.s * y;
                h(k + 1, j) = -std::conj(g.s) * x + g.c * y;
            }
        }
        for (std::size_t k = lo; k < hi; ++k) {
            const Givens& g = rot[k];
            const std::size_t last = std::min(k + 2, hi);
            for (std::size_t i = lo; i <= last; ++i) {
                const cplx x = h(i, k);
                const cplx y = h(i, k + 1);
                h(i, k) = g.c * x + std::conj(g.s) * y;
                h(i, k + 1) = -g.s * x + g.c * y;
            }
        }
        for (std::size_t k = lo; k <= hi; ++k) h(k, k) += mu;
    }
    return eig;
}

}  // namespace sasc
