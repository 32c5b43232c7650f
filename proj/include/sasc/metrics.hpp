// metrics.hpp: SNR maximization, the CS/ICS factor f, detuning maps, phase
// searches for a target asymmetry and the R_mb/R_bc independence measure.
#pragma once

#include "sasc/model.hpp"
#include "sasc/spectra.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sasc {

inline constexpr std::size_t kMinCoarsePoints = 401;

struct SnrSearch {
    double omega_min = -3.0;
    double omega_max = 3.0;
    std::size_t coarse_points = 1201;
    // Adds points clustered around the transfer poles, where peaks narrower
    // than the coarse spacing live.
    bool resonance_points = true;
    std::size_t signal_port = 0;
    std::optional<std::size_t> readout_port;  // default: last mode
    double psi = 0.0;
    TransferOptions transfer;
};

struct SnrOptimum {
    double omega = 0.0;
    double snr = 0.0;
    double amplification = 0.0;  // S_AP at omega
};

// Evaluates f on every grid point, then golden-section refines the bracket
// around the best sample. The result is never below the best sample.
ScalarOptimum maximize_on_grid(const std::function<double(double)>& f, std::vector<double> grid);

SnrOptimum max_snr_over_omega(const SystemModel& model, const SnrSearch& search = {});

// Points clustered at +-Re p of each transfer pole p, spaced in multiples of
// |Im p|, restricted to [lo, hi].
std::vector<double> resonance_points(std::span<const cplx> poles, double lo, double hi);

// ---------------------------------------------------------------------------

struct ComparisonConfig {
    SystemModel cs;   // three-mode model; Delta_c and Delta_m are set per evaluation
    SystemModel ics;  // incoherent-scattering baseline
    SnrSearch search;

    // Baseline shares everything with cs except kappa_c = kappa_m = 0.1 and Delta_c = Delta_m = 1.
    static ComparisonConfig with_default_baseline(const SystemModel& cs, const SnrSearch& search = {});
};

struct FFactor {
    double f = 0.0;
    SnrOptimum cs;
    SnrOptimum ics;
};

SystemModel with_detunings(SystemModel model, double delta_c, double delta_m);

FFactor f_factor(const ComparisonConfig& cfg, double delta_c, double delta_m);
// Reuses a precomputed ICS optimum.
FFactor f_factor(const ComparisonConfig& cfg, double delta_c, double delta_m, const SnrOptimum& ics);

struct MapResult {
    std::vector<double> delta_c;
    std::vector<double> delta_m;
    // Row-major over (delta_c index, delta_m index). Unstable cells hold 0 and stable == 0.
    std::vector<double> f;
    std::vector<double> amplification;  // S_AP at the CS optimum frequency
    std::vector<double> omega_star;
    std::vector<std::uint8_t> stable;
    double ics_snr = 0.0;
    nlohmann::json metadata = nlohmann::json::object();

    std::size_t index(std::size_t ic, std::size_t im) const { return ic * delta_m.size() + im; }
    std::size_t unstable_count() const;
};

MapResult f_map(const ComparisonConfig& cfg, std::span<const double> delta_c, std::span<const double> delta_m,
                unsigned threads = 1);

// Cells reachable from `start` through 4-neighbours that satisfy `mask`,
// and the total number of cells satisfying it.
struct RegionStats {
    std::size_t component = 0;
    std::size_t total = 0;
    bool start_inside = false;
};
RegionStats connected_region(const std::vector<std::uint8_t>& mask, std::size_t rows, std::size_t cols,
                             std::size_t start_row, std::size_t start_col);

// ---------------------------------------------------------------------------

enum class AsymmetryIndex { kMB, kBC };

struct PhaseSearchResult {
    double theta = 0.0;
    double value = 0.0;     // achieved R
    double residual = 0.0;  // |R - target|
    bool reached = false;   // residual < 1e-3
};

inline constexpr double kPhaseReachedTolerance = 1e-3;

// Minimizes |r(theta) - target| over [0, 2 pi): uniform grid then golden
// section on the best bracket. Points where r throws UndefinedAsymmetryError
// are skipped.
PhaseSearchResult find_phase_for_target(const std::function<double(double)>& r, double target,
                                        std::size_t grid_points = 721);

// R_mb is searched over theta_m, R_bc over theta_c; the other phase stays as in the model.
PhaseSearchResult find_phase_for_target_r(const SystemModel& model, double target, AsymmetryIndex which,
                                          double omega, std::size_t grid_points = 721,
                                          const TransferOptions& options = {});

double asymmetry_at(const SystemModel& model, AsymmetryIndex which, double omega,
                    const TransferOptions& options = {});

struct IndependenceReport {
    // max over theta_m of the spread of R_mb over theta_c, and the mirror.
    std::optional<double> r_mb_cross_variation;
    std::optional<double> r_bc_cross_variation;
};

IndependenceReport independence_check(const SystemModel& model, std::span<const double> theta_m,
                                      std::span<const double> theta_c, double omega,
                                      const TransferOptions& options = {});

}  // namespace sasc
