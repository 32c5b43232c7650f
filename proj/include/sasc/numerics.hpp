// numerics.hpp: small dense complex linear algebra kernel.
//
// Everything here is sized for drift matrices of a handful of modes
// (at most 64x64). Row-major storage, partial pivoting, no BLAS.
#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace sasc {

using cplx = std::complex<double>;

class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);

    // Validates that every entry is finite and all rows have equal length.
    static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows);
    static ComplexMatrix from_data(std::size_t rows, std::size_t cols, std::vector<cplx> data);
    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const cplx> d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }
    bool empty() const noexcept { return data_.empty(); }

    cplx& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<const cplx> data() const noexcept { return data_; }
    std::span<cplx> data() noexcept { return data_; }

    ComplexMatrix conj() const;
    ComplexMatrix transpose() const;
    ComplexMatrix adjoint() const;

    // Max absolute row sum.
    double norm_inf() const noexcept;
    // Max absolute elementwise difference; shapes must agree.
    double max_abs_diff(const ComplexMatrix& other) const;
    bool all_finite() const noexcept;

    ComplexMatrix& operator+=(const ComplexMatrix& rhs);
    ComplexMatrix& operator-=(const ComplexMatrix& rhs);
    ComplexMatrix& operator*=(cplx s) noexcept;

    friend ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
    friend ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
    friend ComplexMatrix operator*(ComplexMatrix m, cplx s) { return m *= s; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix m) { return m *= s; }
    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

std::vector<cplx> operator*(const ComplexMatrix& a, std::span<const cplx> x);

// P A P where P swaps index pairs (0,1), (2,3), ... ; A must be square of even size.
ComplexMatrix pair_swap(const ComplexMatrix& a);

// ---------------------------------------------------------------------------
// LU with partial pivoting

struct LuFactors {
    ComplexMatrix lu;               // unit-lower L below the diagonal, U on and above
    std::vector<std::size_t> perm;  // row i of PA is row perm[i] of A
};

// Throws SingularMatrixError when a pivot is below n * eps * ||A||_inf.
LuFactors lu_factor(const ComplexMatrix& a);
ComplexMatrix lu_solve(const LuFactors& f, const ComplexMatrix& b);
ComplexMatrix lu_solve(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix invert(const ComplexMatrix& a);

// ---------------------------------------------------------------------------
// Eigenvalues: Householder Hessenberg reduction followed by single-shift
// complex QR with Wilkinson shifts. Throws ConvergenceError when more than
// max_sweeps QR sweeps are needed in total.

inline constexpr std::size_t kMaxEigenSize = 64;
inline constexpr int kDefaultMaxSweeps = 10'000;

std::vector<cplx> eigenvalues(const ComplexMatrix& a, int max_sweeps = kDefaultMaxSweeps);

// ---------------------------------------------------------------------------
// Continuous Lyapunov equation A X + X A^H + Q = 0 via the Kronecker form.
ComplexMatrix solve_lyapunov(const ComplexMatrix& a, const ComplexMatrix& q);

// Matrix exponential by scaling and squaring of a truncated Taylor series.
ComplexMatrix expm(const ComplexMatrix& a);

// ---------------------------------------------------------------------------
// Ordinary least squares line.

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::optional<double> r_squared;  // only reported for >= 3 points
    std::size_t points = 0;
};

LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

// ---------------------------------------------------------------------------
// 1-D search helpers.

struct ScalarOptimum {
    double x = 0.0;
    double value = 0.0;
};

// Golden-section search for a maximum of f on [a, b]. Assumes f unimodal there.
ScalarOptimum golden_section_maximize(const std::function<double(double)>& f, double a, double b,
                                      double x_tol = 1e-12, int max_iter = 200);

// ---------------------------------------------------------------------------
// Spectral estimation support.

// In-place radix-2 FFT, X_k = sum_n x_n exp(sign * 2 pi i k n / N). Size must be a power of two.
void fft_inplace(std::span<cplx> x, int sign = -1);
std::vector<double> hann_window(std::size_t n);

struct WelchEstimate {
    std::vector<double> omega;  // angular frequency, ascending, two-sided
    std::vector<double> psd;    // S(omega) = int <x(t) x(0)> e^{i omega t} dt
    std::size_t segments = 0;
};

// Hann-windowed Welch average of a real, uniformly sampled signal.
WelchEstimate welch_psd(std::span<const double> x, double dt, std::size_t segment_length,
                        std::size_t overlap);

}  // namespace sasc
