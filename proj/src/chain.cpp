#include "sasc/chain.hpp"
#include "sasc/errors.hpp"
#include "sasc/spectra.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sasc {

SystemModel ChainSpec::to_model() const {
    if (modes < 2) throw std::invalid_argument("chain: need at least 2 modes");
    if (couplings.size() + 1 != modes) {
        throw std::invalid_argument("chain: expected " + std::to_string(modes - 1) + " couplings, got " +
                                    std::to_string(couplings.size()));
    }
    if (kappas.size() != modes) {
        throw std::invalid_argument("chain: expected " + std::to_string(modes) + " kappas, got " +
                                    std::to_string(kappas.size()));
    }
    std::vector<ModeParams> ms;
    ms.reserve(modes);
    std::size_t high_seen = 0;
    for (std::size_t j = 0; j < modes; ++j) {
        ModeParams p;
        p.kappa = kappas[j];
        if (j % 2 == 0) {
            p.kind = ModeKind::kHigh;
            p.label = "h" + std::to_string(j / 2 + 1);
            p.detuning = detuning_pattern[high_seen++ % 2];
            p.absolute_frequency = high_absolute_frequency;
        } else {
            p.kind = ModeKind::kLow;
            p.label = "l" + std::to_string(j / 2 + 1);
            p.detuning = low_frequency;
            p.absolute_frequency = low_absolute_frequency;
        }
        ms.push_back(std::move(p));
    }
    return SystemModel::chain(std::move(ms), couplings, temperature);
}

ChainSpec ChainTemplate::spec(std::size_t modes) const {
    if (coupling_cycle.empty()) throw std::invalid_argument("chain template: empty coupling cycle");
    ChainSpec s;
    s.modes = modes;
    for (std::size_t j = 0; j + 1 < modes; ++j) s.couplings.push_back(coupling_cycle[j % coupling_cycle.size()]);
    for (std::size_t j = 0; j < modes; ++j) {
        if (j == 0) s.kappas.push_back(kappa_first_high);
        else s.kappas.push_back(j % 2 == 0 ? kappa_high : kappa_low);
    }
    s.detuning_pattern = detuning_pattern;
    s.low_frequency = low_frequency;
    s.high_absolute_frequency = high_absolute_frequency;
    s.low_absolute_frequency = low_absolute_frequency;
    s.temperature = temperature;
    return s;
}

double end_to_end_gain(const ChainSpec& spec, double omega, double psi) {
    const SystemModel model = spec.to_model();
    const TransferEvaluator ev(model);
    return amplification_at(ev.at(omega), 0, model.mode_count() - 1, psi);
}

ScalingReport scaling_fit_from_gains(std::vector<std::size_t> modes, std::vector<double> gains) {
    if (modes.size() != gains.size()) throw std::invalid_argument("scaling_fit: size mismatch");
    if (modes.size() < 3) throw std::invalid_argument("scaling_fit: need at least 3 chain lengths");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (!(gains[i] > 0.0)) throw std::invalid_argument("scaling_fit: gains must be positive");
        xs.push_back(static_cast<double>(modes[i]));
        ys.push_back(std::log(gains[i]));
    }
    ScalingReport rep;
    rep.fit = fit_line(xs, ys);
    rep.base = std::exp(rep.fit.slope);
    rep.modes = std::move(modes);
    rep.gains = std::move(gains);
    return rep;
}

ScalingReport scaling_fit(const std::vector<ChainSpec>& specs, double omega, double psi) {
    std::vector<std::size_t> modes;
    std::vector<double> gains;
    std::vector<ExcludedLength> excluded;
    for (const auto& s : specs) {
        try {
            const double g = end_to_end_gain(s, omega, psi);
            if (g > 0.0) {
                modes.push_back(s.modes);
                gains.push_back(g);
            } else {
                excluded.push_back({s.modes, "zero gain", 0.0});
            }
        } catch (const InstabilityError& e) {
            excluded.push_back({s.modes, "unstable", e.spectral_abscissa});
        }
    }
    if (modes.size() < 3) {
        throw std::invalid_argument("scaling_fit: only " + std::to_string(modes.size()) +
                                    " usable chain lengths, need at least 3");
    }
    ScalingReport rep = scaling_fit_from_gains(std::move(modes), std::move(gains));
    rep.excluded = std::move(excluded);
    rep.warning = !rep.excluded.empty();
    return rep;
}

ScalingReport scaling_fit(const ChainTemplate& unit, std::size_t n_min, std::size_t n_max, double omega,
                          double psi) {
    if (n_min < 2 || n_max < n_min) throw std::invalid_argument("scaling_fit: invalid chain length range");
    std::vector<ChainSpec> specs;
    for (std::size_t n = n_min; n <= n_max; ++n) specs.push_back(unit.spec(n));
    return scaling_fit(specs, omega, psi);
}

}  // namespace sasc
