// model.hpp: physical parameters, linearized drift matrices, mean fields and
// stability for dispersively coupled units, the three-mode system and chains.
//
// Unit system: the reference low-frequency mode sets omega_b = 1. Every rate,
// detuning and coupling below is stored in units of omega_b. Absolute
// frequencies (rad/s) are kept only to evaluate thermal occupations.
//
// Basis: each mode j contributes the pair (delta j, delta j^dagger), so a
// system of n modes has a 2n x 2n drift matrix.
#pragma once

#include "sasc/numerics.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace sasc {

enum class ModeKind { kHigh, kLow };

struct ModeParams {
    std::string label;
    ModeKind kind = ModeKind::kHigh;
    double absolute_frequency = 0.0;  // rad/s
    double kappa = 1.0;
    // Effective detuning for a driven high mode. For a low mode this holds
    // the mode frequency itself (1 for the reference mode).
    double detuning = 0.0;
};

struct CouplingParams {
    double magnitude = 0.0;
    double phase = 0.0;  // rad, taken modulo 2 pi

    cplx value() const { return std::polar(magnitude, phase); }
};

// Bare drive of a single unit, all in rad/s.
struct BareDriveParams {
    double g = 0.0;                // single-excitation dispersive coupling
    double epsilon = 0.0;          // drive amplitude
    double drive_frequency = 0.0;  // omega_d
};

enum class Topology { kDispersiveUnit, kThreeMode, kChain };

const char* to_string(Topology t) noexcept;

struct SystemModel {
    Topology topology = Topology::kDispersiveUnit;
    std::vector<ModeParams> modes;          // (a,b) | (m,b,c) | alternating chain
    std::vector<CouplingParams> couplings;  // one per adjacent pair
    double temperature = 0.0;               // kelvin

    std::size_t mode_count() const noexcept { return modes.size(); }
    std::size_t channel_count() const noexcept { return 2 * modes.size(); }

    // Throws std::invalid_argument naming the offending field.
    void validate() const;

    static SystemModel dispersive_unit(ModeParams a, ModeParams b, CouplingParams g, double temperature);
    static SystemModel three_mode(ModeParams m, ModeParams b, ModeParams c, CouplingParams gm, CouplingParams gc,
                                  double temperature);
    static SystemModel chain(std::vector<ModeParams> modes, std::vector<CouplingParams> couplings,
                             double temperature);
};

// Drift matrices. The DU and three-mode builders instantiate the templates
// entry by entry; the chain builder tiles one 4-entry coupling stamp per
// adjacent pair and accepts any model whose neighbours alternate high/low.
ComplexMatrix build_drift_matrix_du(const SystemModel& model);
ComplexMatrix build_drift_matrix_three(const SystemModel& model);
ComplexMatrix build_drift_matrix_chain(const SystemModel& model);
ComplexMatrix build_drift_matrix(const SystemModel& model);

// Damping matrix L = diag(sqrt(kappa_j) for both channels of each mode).
std::vector<double> damping_diagonal(const SystemModel& model);

// ---------------------------------------------------------------------------
// Mean-field steady state of a single driven unit.

struct MeanFieldBranch {
    double occupation = 0.0;          // |<a>|^2
    cplx a{};                         // <a>
    cplx b{};                         // <b>
    double effective_detuning = 0.0;  // units of omega_b
    double residual = 0.0;            // max relative fixed-point residual
};

struct SteadyState {
    std::vector<MeanFieldBranch> branches;  // ascending occupation
    std::size_t selected = 0;
    bool degenerate = false;  // discriminant vanishes within tolerance

    std::size_t branch_count() const noexcept { return branches.size(); }
    const MeanFieldBranch& selected_branch() const { return branches.at(selected); }
};

// Solves <b> = -i g |<a>|^2 / (i w_b + k_b/2), <a> = eps / (i D + k_a/2),
// D = (w_a - w_d) + g (<b> + <b>*) via the cubic in |<a>|^2.
// The default branch is the one continuously connected to zero drive.
SteadyState solve_steady_state(const BareDriveParams& bare, const ModeParams& high, const ModeParams& low,
                               std::optional<std::size_t> branch_override = std::nullopt);

// Linearized unit from a bare drive: detuning and G = g <a> from the selected branch.
SystemModel linearize_unit(const BareDriveParams& bare, ModeParams high, ModeParams low, double temperature,
                           std::optional<std::size_t> branch_override = std::nullopt);

// ---------------------------------------------------------------------------

inline constexpr double kStabilityMargin = 1e-12;

struct StabilityVerdict {
    bool stable = false;
    double spectral_abscissa = 0.0;
    std::vector<cplx> eigenvalues;
};

// Stable iff every eigenvalue has Re < -margin. Eigen-solver failures propagate.
StabilityVerdict check_stability(const ComplexMatrix& drift, double margin = kStabilityMargin);

}  // namespace sasc
