#include "sasc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sasc {

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("fit_line: xs and ys differ in length");
    const std::size_t n = xs.size();
    if (n < 2) throw std::invalid_argument("fit_line: need at least two points");

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_line: degenerate abscissae (all xs equal)");

    LineFit fit;
    fit.points = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (n >= 3) {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
            ss_res += r * r;
        }
        // Constant ys are fitted exactly by slope 0.
        double r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
        fit.r_squared = std::clamp(r2, 0.0, 1.0);
    }
    return fit;
}

ScalarOptimum golden_section_maximize(const std::function<double(double)>& f, double a, double b,
                                      double x_tol, int max_iter) {
    if (b < a) std::swap(a, b);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > x_tol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc > fd ? ScalarOptimum{c, fc} : ScalarOptimum{d, fd};
}

}  // namespace sasc
