#include "sasc/numerics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sasc {

void fft_inplace(std::span<cplx> x, int sign) {
    const std::size_t n = x.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft_inplace: size must be a power of two");

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = x[i + k];
                const cplx v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Periodic Hann window (standard for Welch averaging).
std::vector<double> hann_window(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    }
    return w;
}

WelchEstimate welch_psd(std::span<const double> x, double dt, std::size_t segment_length, std::size_t overlap) {
    if (segment_length < 2 || (segment_length & (segment_length - 1)) != 0) {
        throw std::invalid_argument("welch_psd: segment length must be a power of two");
    }
    if (overlap >= segment_length) throw std::invalid_argument("welch_psd: overlap must be below segment length");
    if (x.size() < segment_length) throw std::invalid_argument("welch_psd: signal shorter than one segment");
    if (!(dt > 0.0)) throw std::invalid_argument("welch_psd: dt must be positive");

    const std::size_t n = segment_length;
    const std::size_t step = n - overlap;
    const auto w = hann_window(n);
    double wsum2 = 0.0;
    for (double v : w) wsum2 += v * v;

    std::vector<double> acc(n, 0.0);
    std::vector<cplx> buf(n);
    std::size_t segments = 0;
    for (std::size_t start = 0; start + n <= x.size(); start += step) {
        for (std::size_t i = 0; i < n; ++i) buf[i] = w[i] * x[start + i];
        fft_inplace(buf, +1);
        for (std::size_t k = 0; k < n; ++k) acc[k] += std::norm(buf[k]);
        ++segments;
    }

    WelchEstimate est;
    est.segments = segments;
    est.omega.resize(n);
    est.psd.resize(n);
    const double norm = dt / (wsum2 * static_cast<double>(segments));
    const double dw = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
    // fftshift: bin k maps to frequency (k - n/2) * dw.
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = (i + n / 2) % n;
        est.omega[i] = (static_cast<double>(i) - static_cast<double>(n / 2)) * dw;
        est.psd[i] = acc[k] * norm;
    }
    return est;
}

}  // namespace sasc
