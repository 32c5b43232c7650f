#include "sasc/errors.hpp"
#include "sasc/metrics.hpp"
#include "sasc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace sasc {

ScalarOptimum maximize_on_grid(const std::function<double(double)>& f, std::vector<double> grid) {
    if (grid.empty()) throw std::invalid_argument("maximize_on_grid: empty grid");
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::size_t best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = f(grid[i]);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    ScalarOptimum out{grid[best], best_value};
    if (grid.size() < 3) return out;

    const double lo = grid[best == 0 ? 0 : best - 1];
    const double hi = grid[std::min(best + 1, grid.size() - 1)];
    const ScalarOptimum refined = golden_section_maximize(f, lo, hi);
    if (refined.value > out.value) out = refined;
    return out;
}

std::vector<double> resonance_points(std::span<const cplx> poles, double lo, double hi) {
    static constexpr double kOffsets[] = {0.0, 0.25, -0.25, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0,
                                          4.0, -4.0, 8.0, -8.0, 16.0, -16.0};
    std::vector<double> pts;
    for (const auto& p : poles) {
        // Poles on the real axis (possible under the paired convention) still
        // get a spread of points; the pole itself is singular.
        const double width = std::max(std::abs(p.imag()), 1e-7 * std::max(1.0, std::abs(p.real())));
        for (const double centre : {p.real(), -p.real()}) {
            for (double k : kOffsets) {
                const double x = centre + k * width;
                if (x >= lo && x <= hi) pts.push_back(x);
            }
        }
    }
    return pts;
}

SnrOptimum max_snr_over_omega(const SystemModel& model, const SnrSearch& search) {
    if (search.coarse_points < kMinCoarsePoints) {
        throw std::invalid_argument("max_snr_over_omega: coarse grid needs at least " +
                                    std::to_string(kMinCoarsePoints) + " points");
    }
    const TransferEvaluator ev(model, search.transfer);
    const std::size_t readout = search.readout_port.value_or(model.mode_count() - 1);
    const auto occ = thermal_occupations(model);

    std::vector<double> grid = FrequencyGrid{search.omega_min, search.omega_max, search.coarse_points}.values();
    if (search.resonance_points) {
        const auto extra = resonance_points(ev.poles(), search.omega_min, search.omega_max);
        grid.insert(grid.end(), extra.begin(), extra.end());
    }
    const auto snr = [&](double w) {
        try {
            return snr_at(ev.at(w), search.signal_port, readout, search.psi, occ);
        } catch (const SingularMatrixError&) {
            return -std::numeric_limits<double>::infinity();
        }
    };
    const ScalarOptimum best = maximize_on_grid(snr, std::move(grid));
    return SnrOptimum{best.x, best.value, amplification_at(ev.at(best.x), search.signal_port, readout, search.psi)};
}

// ---------------------------------------------------------------------------

ComparisonConfig ComparisonConfig::with_default_baseline(const SystemModel& cs, const SnrSearch& search) {
    if (cs.topology != Topology::kThreeMode) {
        throw std::invalid_argument("ComparisonConfig: the CS model must be a three-mode system");
    }
    SystemModel ics = cs;
    for (std::size_t j : {std::size_t{0}, std::size_t{2}}) {
        ics.modes[j].kappa = 0.1;
        ics.modes[j].detuning = 1.0;
    }
    return ComparisonConfig{cs, std::move(ics), search};
}

SystemModel with_detunings(SystemModel model, double delta_c, double delta_m) {
    if (model.topology != Topology::kThreeMode) {
        throw std::invalid_argument("with_detunings: expected a three-mode model");
    }
    model.modes[0].detuning = delta_m;
    model.modes[2].detuning = delta_c;
    return model;
}

FFactor f_factor(const ComparisonConfig& cfg, double delta_c, double delta_m, const SnrOptimum& ics) {
    if (!(ics.snr > 0.0)) throw std::invalid_argument("f_factor: ICS baseline SNR is not positive");
    FFactor out;
    out.ics = ics;
    out.cs = max_snr_over_omega(with_detunings(cfg.cs, delta_c, delta_m), cfg.search);
    out.f = out.cs.snr / ics.snr;
    return out;
}

FFactor f_factor(const ComparisonConfig& cfg, double delta_c, double delta_m) {
    return f_factor(cfg, delta_c, delta_m, max_snr_over_omega(cfg.ics, cfg.search));
}

std::size_t MapResult::unstable_count() const {
    return static_cast<std::size_t>(std::count(stable.begin(), stable.end(), std::uint8_t{0}));
}

MapResult f_map(const ComparisonConfig& cfg, std::span<const double> delta_c, std::span<const double> delta_m,
                unsigned threads) {
    if (delta_c.empty() || delta_m.empty()) throw std::invalid_argument("f_map: empty detuning grid");
    MapResult map;
    map.delta_c.assign(delta_c.begin(), delta_c.end());
    map.delta_m.assign(delta_m.begin(), delta_m.end());
    const SnrOptimum ics = max_snr_over_omega(cfg.ics, cfg.search);
    map.ics_snr = ics.snr;

    const std::size_t cells = delta_c.size() * delta_m.size();
    map.f.assign(cells, 0.0);
    map.amplification.assign(cells, 0.0);
    map.omega_star.assign(cells, 0.0);
    map.stable.assign(cells, 0);
    parallel_for(cells, threads, [&](std::size_t k) {
        const std::size_t ic = k / delta_m.size();
        const std::size_t im = k % delta_m.size();
        try {
            const FFactor r = f_factor(cfg, delta_c[ic], delta_m[im], ics);
            map.f[k] = r.f;
            map.amplification[k] = r.cs.amplification;
            map.omega_star[k] = r.cs.omega;
            map.stable[k] = 1;
        } catch (const InstabilityError&) {
            map.stable[k] = 0;
        }
    });
    return map;
}

RegionStats connected_region(const std::vector<std::uint8_t>& mask, std::size_t rows, std::size_t cols,
                             std::size_t start_row, std::size_t start_col) {
    if (mask.size() != rows * cols) throw std::invalid_argument("connected_region: mask size mismatch");
    if (start_row >= rows || start_col >= cols) throw std::invalid_argument("connected_region: start out of range");
    RegionStats s;
    s.total = static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](auto v) { return v != 0; }));
    const std::size_t start = start_row * cols + start_col;
    if (!mask[start]) return s;
    s.start_inside = true;

    std::vector<std::uint8_t> seen(mask.size(), 0);
    std::queue<std::size_t> todo;
    todo.push(start);
    seen[start] = 1;
    while (!todo.empty()) {
        const std::size_t k = todo.front();
        todo.pop();
        ++s.component;
        const std::size_t r = k / cols, c = k % cols;
        const auto visit = [&](std::size_t rr, std::size_t cc) {
            const std::size_t j = rr * cols + cc;
            if (mask[j] && !seen[j]) {
                seen[j] = 1;
                todo.push(j);
            }
        };
        if (r > 0) visit(r - 1, c);
        if (r + 1 < rows) visit(r + 1, c);
        if (c > 0) visit(r, c - 1);
        if (c + 1 < cols) visit(r, c + 1);
    }
    return s;
}

// ---------------------------------------------------------------------------

PhaseSearchResult find_phase_for_target(const std::function<double(double)>& r, double target,
                                        std::size_t grid_points) {
    if (grid_points < 3) throw std::invalid_argument("find_phase_for_target: need at least 3 grid points");
    if (!(target >= -1.0 && target <= 1.0)) throw std::invalid_argument("find_phase_for_target: target outside [-1, 1]");

    const double inf = std::numeric_limits<double>::infinity();
    const auto distance = [&](double theta) {
        try {
            return std::abs(r(theta) - target);
        } catch (const UndefinedAsymmetryError&) {
            return inf;
        }
    };

    const double step = 2.0 * std::numbers::pi / static_cast<double>(grid_points);
    std::size_t best = 0;
    double best_d = inf;
    for (std::size_t k = 0; k < grid_points; ++k) {
        const double d = distance(step * static_cast<double>(k));
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    PhaseSearchResult out;
    if (best_d == inf) {
        out.residual = inf;
        out.value = 0.0;
        return out;
    }
    double theta = step * static_cast<double>(best);
    const double centre = theta;
    const ScalarOptimum refined =
        golden_section_maximize([&](double t) { return -distance(t); }, centre - step, centre + step);
    if (-refined.value < best_d) {
        theta = refined.x;
        best_d = -refined.value;
    }
    theta = std::fmod(theta, 2.0 * std::numbers::pi);
    if (theta < 0.0) theta += 2.0 * std::numbers::pi;
    out.theta = theta;
    out.value = r(theta);
    out.residual = std::abs(out.value - target);
    out.reached = out.residual < kPhaseReachedTolerance;
    return out;
}

double asymmetry_at(const SystemModel& model, AsymmetryIndex which, double omega, const TransferOptions& options) {
    if (model.topology != Topology::kThreeMode) throw std::invalid_argument("asymmetry_at: expected a three-mode model");
    const auto t = transmission_three(transfer_matrix(model, omega, options));
    return which == AsymmetryIndex::kMB ? r_mb(t) : r_bc(t);
}

PhaseSearchResult find_phase_for_target_r(const SystemModel& model, double target, AsymmetryIndex which,
                                          double omega, std::size_t grid_points, const TransferOptions& options) {
    if (model.topology != Topology::kThreeMode) {
        throw std::invalid_argument("find_phase_for_target_r: expected a three-mode model");
    }
    const std::size_t idx = which == AsymmetryIndex::kMB ? 0 : 1;
    return find_phase_for_target(
        [&](double theta) {
            SystemModel m = model;
            m.couplings[idx].phase = theta;
            return asymmetry_at(m, which, omega, options);
        },
        target, grid_points);
}

IndependenceReport independence_check(const SystemModel& model, std::span<const double> theta_m,
                                      std::span<const double> theta_c, double omega,
                                      const TransferOptions& options) {
    if (model.topology != Topology::kThreeMode) {
        throw std::invalid_argument("independence_check: expected a three-mode model");
    }
    if (theta_m.empty() || theta_c.empty()) throw std::invalid_argument("independence_check: empty phase grid");
    const std::size_t nm = theta_m.size(), nc = theta_c.size();
    std::vector<double> rmb(nm * nc), rbc(nm * nc);
    bool mb_defined = true, bc_defined = true;
    for (std::size_t i = 0; i < nm; ++i) {
        for (std::size_t j = 0; j < nc; ++j) {
            SystemModel m = model;
            m.couplings[0].phase = theta_m[i];
            m.couplings[1].phase = theta_c[j];
            const auto t = transmission_three(transfer_matrix(m, omega, options));
            try {
                rmb[i * nc + j] = r_mb(t);
            } catch (const UndefinedAsymmetryError&) {
                mb_defined = false;
            }
            try {
                rbc[i * nc + j] = r_bc(t);
            } catch (const UndefinedAsymmetryError&) {
                bc_defined = false;
            }
        }
    }
    IndependenceReport rep;
    if (mb_defined) {
        double worst = 0.0;
        for (std::size_t i = 0; i < nm; ++i) {
            const auto row = std::span<const double>(rmb).subspan(i * nc, nc);
            const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
            worst = std::max(worst, *hi - *lo);
        }
        rep.r_mb_cross_variation = worst;
    }
    if (bc_defined) {
        double worst = 0.0;
        for (std::size_t j = 0; j < nc; ++j) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (std::size_t i = 0; i < nm; ++i) {
                lo = std::min(lo, rbc[i * nc + j]);
                hi = std::max(hi, rbc[i * nc + j]);
            }
            worst = std::max(worst, hi - lo);
        }
        rep.r_bc_cross_variation = worst;
    }
    return rep;
}

}  // namespace sasc
