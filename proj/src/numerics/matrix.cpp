#include "sasc/numerics.hpp"

#include "sasc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sasc {

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument(std::string(op) + ": shape mismatch");
    }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

ComplexMatrix ComplexMatrix::from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<cplx> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw std::invalid_argument("ComplexMatrix::from_rows: ragged rows");
        data.insert(data.end(), row.begin(), row.end());
    }
    return from_data(r, c, std::move(data));
}

ComplexMatrix ComplexMatrix::from_data(std::size_t rows, std::size_t cols, std::vector<cplx> data) {
    if (data.size() != rows * cols) throw std::invalid_argument("ComplexMatrix::from_data: size mismatch");
    ComplexMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(data);
    if (!m.all_finite()) throw std::invalid_argument("ComplexMatrix: non-finite entry");
    return m;
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

ComplexMatrix ComplexMatrix::conj() const {
    ComplexMatrix m = *this;
    for (auto& v : m.data_) v = std::conj(v);
    return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const { return transpose().conj(); }

double ComplexMatrix::norm_inf() const noexcept {
    double best = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
        best = std::max(best, s);
    }
    return best;
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix& other) const {
    require_same_shape(*this, other, "max_abs_diff");
    double d = 0.0;
    for (std::size_t k = 0; k < data_.size(); ++k) d = std::max(d, std::abs(data_[k] - other.data_[k]));
    return d;
}

bool ComplexMatrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(),
                       [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
    require_same_shape(*this, rhs, "operator+");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += rhs.data_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
    require_same_shape(*this, rhs, "operator-");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= rhs.data_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) noexcept {
    for (auto& v : data_) v *= s;
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("operator*: inner dimension mismatch");
    ComplexMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

std::vector<cplx> operator*(const ComplexMatrix& a, std::span<const cplx> x) {
    if (a.cols() != x.size()) throw std::invalid_argument("operator*: vector size mismatch");
    std::vector<cplx> y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        cplx s{};
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

ComplexMatrix pair_swap(const ComplexMatrix& a) {
    if (!a.is_square() || a.rows() % 2 != 0) throw std::invalid_argument("pair_swap: need square even-sized matrix");
    const auto partner = [](std::size_t i) { return i ^ std::size_t{1}; };
    ComplexMatrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(partner(i), partner(j));
    return out;
}

ComplexMatrix expm(const ComplexMatrix& a) {
    if (!a.is_square()) throw std::invalid_argument("expm: matrix must be square");
    if (!a.all_finite()) throw std::invalid_argument("expm: matrix has non-finite entries");
    const std::size_t n = a.rows();
    // Scale until ||A / 2^s|| <= 1/4; 18 Taylor terms then sit far below eps.
    int s = 0;
    const double norm = a.norm_inf();
    if (norm > 0.25) s = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
    const ComplexMatrix x = a * cplx{std::ldexp(1.0, -s), 0.0};
    ComplexMatrix result = ComplexMatrix::identity(n);
    ComplexMatrix term = ComplexMatrix::identity(n);
    for (int k = 1; k <= 18; ++k) {
        term = term * x;
        term *= cplx{1.0 / k, 0.0};
        result += term;
    }
    for (int i = 0; i < s; ++i) result = result * result;
    return result;
}

}  // namespace sasc
