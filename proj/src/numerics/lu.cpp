#include "sasc/errors.hpp"
#include "sasc/numerics.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace sasc {

LuFactors lu_factor(const ComplexMatrix& a) {
    if (!a.is_square()) throw std::invalid_argument("lu_factor: matrix is not square");
    const std::size_t n = a.rows();
    LuFactors f{a, std::vector<std::size_t>(n)};
    std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});
    ComplexMatrix& lu = f.lu;

    const double tiny = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * a.norm_inf();

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(lu(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(lu(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (!(best > tiny)) {
            throw SingularMatrixError(k, "lu_factor: matrix is singular to working precision at pivot " +
                                             std::to_string(k));
        }
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
            std::swap(f.perm[k], f.perm[p]);
        }
        const cplx inv_pivot = 1.0 / lu(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx m = lu(i, k) * inv_pivot;
            lu(i, k) = m;
            if (m == cplx{}) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= m * lu(k, j);
        }
    }
    return f;
}

ComplexMatrix lu_solve(const LuFactors& f, const ComplexMatrix& b) {
    const std::size_t n = f.lu.rows();
    if (b.rows() != n) throw std::invalid_argument("lu_solve: right-hand side is not conformal");
    const std::size_t m = b.cols();
    ComplexMatrix x(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) x(i, j) = b(f.perm[i], j);

    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 1; i < n; ++i) {
            cplx s = x(i, j);
            for (std::size_t k = 0; k < i; ++k) s -= f.lu(i, k) * x(k, j);
            x(i, j) = s;
        }
        for (std::size_t ii = n; ii-- > 0;) {
            cplx s = x(ii, j);
            for (std::size_t k = ii + 1; k < n; ++k) s -= f.lu(ii, k) * x(k, j);
            x(ii, j) = s / f.lu(ii, ii);
        }
    }
    return x;
}

ComplexMatrix lu_solve(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (b.rows() != a.rows()) throw std::invalid_argument("lu_solve: right-hand side is not conformal");
    return lu_solve(lu_factor(a), b);
}

ComplexMatrix invert(const ComplexMatrix& a) {
    return lu_solve(lu_factor(a), ComplexMatrix::identity(a.rows()));
}

ComplexMatrix solve_lyapunov(const ComplexMatrix& a, const ComplexMatrix& q) {
    if (!a.is_square() || q.rows() != a.rows() || q.cols() != a.cols()) {
        throw std::invalid_argument("solve_lyapunov: shape mismatch");
    }
    const std::size_t n = a.rows();
    // Row-major vec: vec(A X) = (A kron I) x, vec(X A^H) = (I kron conj(A)) x.
    ComplexMatrix k(n * n, n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t row = i * n + j;
            for (std::size_t m = 0; m < n; ++m) {
                k(row, m * n + j) += a(i, m);
                k(row, i * n + m) += std::conj(a(j, m));
            }
        }
    }
    ComplexMatrix rhs(n * n, 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) rhs(i * n + j, 0) = -q(i, j);
    const ComplexMatrix x = lu_solve(k, rhs);
    ComplexMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = x(i * n + j, 0);
    return out;
}

}  // namespace sasc
