#include "sasc/errors.hpp"
#include "sasc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sasc {

namespace {

const cplx kI{0.0, 1.0};

std::string field(std::size_t i, const char* name) {
    return "modes[" + std::to_string(i) + "]." + name;
}

void require_kind(const SystemModel& m, std::size_t i, ModeKind kind) {
    if (m.modes[i].kind != kind) {
        throw std::invalid_argument(field(i, "kind") + ": expected " +
                                    (kind == ModeKind::kHigh ? "a high-frequency mode" : "a low-frequency mode"));
    }
}

// Diagonal 2x2 block of a mode on channels (2j, 2j+1). For a low mode the
// detuning field carries its frequency, so one form serves both kinds.
void stamp_mode(ComplexMatrix& m, std::size_t j, const ModeParams& p) {
    const double k = 0.5 * p.kappa;
    m(2 * j, 2 * j) = -(kI * p.detuning + k);
    m(2 * j + 1, 2 * j + 1) = kI * p.detuning - k;
}

// Dispersive coupling between high mode h and low mode l with G = g <h>.
void stamp_coupling(ComplexMatrix& m, std::size_t h, std::size_t l, cplx g) {
    const cplx gc = std::conj(g);
    m(2 * h, 2 * l) += -kI * g;
    m(2 * h, 2 * l + 1) += -kI * g;
    m(2 * h + 1, 2 * l) += kI * gc;
    m(2 * h + 1, 2 * l + 1) += kI * gc;
    m(2 * l, 2 * h) += -kI * gc;
    m(2 * l, 2 * h + 1) += -kI * g;
    m(2 * l + 1, 2 * h) += kI * gc;
    m(2 * l + 1, 2 * h + 1) += kI * g;
}

}  // namespace

const char* to_string(Topology t) noexcept {
    switch (t) {
        case Topology::kDispersiveUnit: return "du";
        case Topology::kThreeMode: return "three_mode";
        case Topology::kChain: return "chain";
    }
    return "unknown";
}

void SystemModel::validate() const {
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const auto& m = modes[i];
        if (!(m.kappa > 0.0) || !std::isfinite(m.kappa)) {
            throw std::invalid_argument(field(i, "kappa") + " must be positive and finite");
        }
        if (!(m.absolute_frequency > 0.0) || !std::isfinite(m.absolute_frequency)) {
            throw std::invalid_argument(field(i, "absolute_frequency") + " must be positive and finite");
        }
        if (!std::isfinite(m.detuning)) throw std::invalid_argument(field(i, "detuning") + " must be finite");
    }
    for (std::size_t i = 0; i < couplings.size(); ++i) {
        const auto& c = couplings[i];
        const std::string base = "couplings[" + std::to_string(i) + "]";
        if (!(c.magnitude >= 0.0) || !std::isfinite(c.magnitude)) {
            throw std::invalid_argument(base + ".magnitude must be non-negative and finite");
        }
        if (!std::isfinite(c.phase)) throw std::invalid_argument(base + ".phase must be finite");
    }
    if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
        throw std::invalid_argument("temperature must be non-negative and finite");
    }

    switch (topology) {
        case Topology::kDispersiveUnit:
            if (modes.size() != 2) throw std::invalid_argument("modes: a dispersive unit has exactly 2 modes");
            if (couplings.size() != 1) throw std::invalid_argument("couplings: a dispersive unit has exactly 1 coupling");
            require_kind(*this, 0, ModeKind::kHigh);
            require_kind(*this, 1, ModeKind::kLow);
            break;
        case Topology::kThreeMode:
            if (modes.size() != 3) throw std::invalid_argument("modes: the three-mode system has exactly 3 modes");
            if (couplings.size() != 2) throw std::invalid_argument("couplings: the three-mode system has exactly 2 couplings");
            require_kind(*this, 0, ModeKind::kHigh);
            require_kind(*this, 1, ModeKind::kLow);
            require_kind(*this, 2, ModeKind::kHigh);
            break;
        case Topology::kChain:
            if (modes.size() < 2) throw std::invalid_argument("modes: a chain needs at least 2 modes");
            if (couplings.size() + 1 != modes.size()) {
                throw std::invalid_argument("couplings: a chain of N modes has N-1 couplings");
            }
            for (std::size_t i = 1; i < modes.size(); ++i) {
                if (modes[i].kind == modes[i - 1].kind) {
                    throw std::invalid_argument(field(i, "kind") + ": chain modes must alternate high/low");
                }
            }
            break;
    }
}

SystemModel SystemModel::dispersive_unit(ModeParams a, ModeParams b, CouplingParams g, double temperature) {
    a.kind = ModeKind::kHigh;
    b.kind = ModeKind::kLow;
    SystemModel m{Topology::kDispersiveUnit, {std::move(a), std::move(b)}, {g}, temperature};
    m.validate();
    return m;
}

SystemModel SystemModel::three_mode(ModeParams m, ModeParams b, ModeParams c, CouplingParams gm,
                                    CouplingParams gc, double temperature) {
    m.kind = ModeKind::kHigh;
    b.kind = ModeKind::kLow;
    c.kind = ModeKind::kHigh;
    SystemModel s{Topology::kThreeMode, {std::move(m), std::move(b), std::move(c)}, {gm, gc}, temperature};
    s.validate();
    return s;
}

SystemModel SystemModel::chain(std::vector<ModeParams> modes, std::vector<CouplingParams> couplings,
                               double temperature) {
    SystemModel s{Topology::kChain, std::move(modes), std::move(couplings), temperature};
    s.validate();
    return s;
}

ComplexMatrix build_drift_matrix_du(const SystemModel& model) {
    if (model.topology != Topology::kDispersiveUnit) {
        throw std::invalid_argument("build_drift_matrix_du: model is not a dispersive unit");
    }
    model.validate();
    const auto& a = model.modes[0];
    const auto& b = model.modes[1];
    const cplx g = model.couplings[0].value();
    const cplx gc = std::conj(g);
    const double da = a.detuning, wb = b.detuning;
    const double ka = 0.5 * a.kappa, kb = 0.5 * b.kappa;
    return ComplexMatrix::from_rows({
        {-(kI * da + ka), 0.0, -kI * g, -kI * g},
        {0.0, kI * da - ka, kI * gc, kI * gc},
        {-kI * gc, -kI * g, -(kI * wb + kb), 0.0},
        {kI * gc, kI * g, 0.0, kI * wb - kb},
    });
}

ComplexMatrix build_drift_matrix_three(const SystemModel& model) {
    if (model.topology != Topology::kThreeMode) {
        throw std::invalid_argument("build_drift_matrix_three: model is not a three-mode system");
    }
    model.validate();
    const auto& m = model.modes[0];
    const auto& b = model.modes[1];
    const auto& c = model.modes[2];
    const cplx gm = model.couplings[0].value();
    const cplx gmc = std::conj(gm);
    const cplx gc = model.couplings[1].value();
    const cplx gcc = std::conj(gc);
    const double dm = m.detuning, wb = b.detuning, dc = c.detuning;
    const double km = 0.5 * m.kappa, kb = 0.5 * b.kappa, kc = 0.5 * c.kappa;
    return ComplexMatrix::from_rows({
        {-(kI * dm + km), 0.0, -kI * gm, -kI * gm, 0.0, 0.0},
        {0.0, kI * dm - km, kI * gmc, kI * gmc, 0.0, 0.0},
        {-kI * gmc, -kI * gm, -(kI * wb + kb), 0.0, -kI * gcc, -kI * gc},
        {kI * gmc, kI * gm, 0.0, kI * wb - kb, kI * gcc, kI * gc},
        {0.0, 0.0, -kI * gc, -kI * gc, -(kI * dc + kc), 0.0},
        {0.0, 0.0, kI * gcc, kI * gcc, 0.0, kI * dc - kc},
    });
}

ComplexMatrix build_drift_matrix_chain(const SystemModel& model) {
    model.validate();
    const std::size_t n = model.mode_count();
    for (std::size_t i = 1; i < n; ++i) {
        if (model.modes[i].kind == model.modes[i - 1].kind) {
            throw std::invalid_argument(field(i, "kind") + ": chain modes must alternate high/low");
        }
    }
    ComplexMatrix m(2 * n, 2 * n);
    for (std::size_t j = 0; j < n; ++j) stamp_mode(m, j, model.modes[j]);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const bool left_high = model.modes[j].kind == ModeKind::kHigh;
        const std::size_t h = left_high ? j : j + 1;
        const std::size_t l = left_high ? j + 1 : j;
        stamp_coupling(m, h, l, model.couplings[j].value());
    }
    return m;
}

ComplexMatrix build_drift_matrix(const SystemModel& model) {
    switch (model.topology) {
        case Topology::kDispersiveUnit: return build_drift_matrix_du(model);
        case Topology::kThreeMode: return build_drift_matrix_three(model);
        case Topology::kChain: return build_drift_matrix_chain(model);
    }
    throw std::invalid_argument("build_drift_matrix: unknown topology");
}

std::vector<double> damping_diagonal(const SystemModel& model) {
    std::vector<double> d;
    d.reserve(model.channel_count());
    for (const auto& m : model.modes) {
        const double s = std::sqrt(m.kappa);
        d.push_back(s);
        d.push_back(s);
    }
    return d;
}

StabilityVerdict check_stability(const ComplexMatrix& drift, double margin) {
    if (!drift.is_square()) throw std::invalid_argument("check_stability: matrix is not square");
    StabilityVerdict v;
    v.eigenvalues = eigenvalues(drift);
    v.spectral_abscissa = -std::numeric_limits<double>::infinity();
    for (const auto& l : v.eigenvalues) v.spectral_abscissa = std::max(v.spectral_abscissa, l.real());
    v.stable = v.spectral_abscissa < -margin;
    return v;
}

}  // namespace sasc
