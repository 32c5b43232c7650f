#include "commands.hpp"

#include "sasc/app/cli.hpp"
#include "sasc/app/config.hpp"
#include "sasc/chain.hpp"
#include "sasc/errors.hpp"
#include "sasc/metrics.hpp"
#include "sasc/oracle.hpp"
#include "sasc/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

namespace sasc::app {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

const json& task(const Session& s, const char* name) { return s.cfg().at("task").at(name); }

TransferOptions transfer_options(const json& section, const std::string& key) {
    TransferOptions o;
    o.convention = parse_convention(section.at("convention").get<std::string>(), key);
    return o;
}

void require_topology(const SystemModel& m, std::initializer_list<Topology> allowed, const std::string& command) {
    if (std::find(allowed.begin(), allowed.end(), m.topology) != allowed.end()) return;
    std::string list;
    for (auto t : allowed) list += (list.empty() ? "" : " or ") + std::string(to_string(t));
    throw ConfigError("system.topology", "system.topology: " + command + " needs " + list + ", got " +
                                             to_string(m.topology));
}

std::vector<double> theta_grid(std::size_t points) {
    std::vector<double> t(points);
    for (std::size_t i = 0; i < points; ++i) {
        t[i] = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return t;
}

// Asymmetry with the 0/0 case reported through a flag instead of an exception.
std::pair<double, double> safe_asymmetry(double plus, double minus) {
    if (plus < kAsymmetryFloor && minus < kAsymmetryFloor) return {0.0, 0.0};
    return {asymmetry(plus, minus), 1.0};
}

struct Variant {
    std::string suffix;
    SystemModel model;
};

std::vector<Variant> sweep_variants(const json& cfg) {
    const json& spec = cfg.at("task").at("spectrum");
    if (!spec.contains("sweep")) return {{"", build_model(cfg)}};
    const json& sweep = spec.at("sweep");
    const auto path = sweep.at("path").get<std::string>();
    const auto name = sweep.at("name").get<std::string>();
    std::vector<Variant> out;
    for (const auto& v : sweep.at("values")) {
        json c = cfg;
        apply_override(c, path + "=" + v.dump());
        out.push_back({"@" + name + "=" + fmt(v.get<double>()), build_model(normalize_config(c))});
    }
    return out;
}

void append(SpectrumTable& into, const SpectrumTable& from, const std::string& suffix,
            const std::vector<std::string>& only = {}) {
    for (std::size_t c = 0; c < from.names.size(); ++c) {
        if (!only.empty() && std::find(only.begin(), only.end(), from.names[c]) == only.end()) continue;
        into.add_column(from.names[c] + suffix, from.columns[c]);
    }
}

SpectrumTable du_phase_table(const SystemModel& model, const std::vector<double>& thetas,
                             const std::vector<double>& omegas, const TransferOptions& opt, bool full) {
    SpectrumTable t;
    t.axis = "theta";
    t.omega = thetas;
    for (double w : omegas) {
        std::vector<double> r(thetas.size()), def(thetas.size()), tp(thetas.size()), tm(thetas.size());
        for (std::size_t i = 0; i < thetas.size(); ++i) {
            SystemModel m = model;
            m.couplings[0].phase = thetas[i];
            const auto tr = transmission_du(transfer_matrix(m, w, opt));
            std::tie(r[i], def[i]) = safe_asymmetry(tr.t_a_plus, tr.t_b_minus);
            tp[i] = tr.t_a_plus;
            tm[i] = tr.t_b_minus;
        }
        const std::string sfx = "@w=" + fmt(w);
        t.add_column("R_ab" + sfx, std::move(r));
        if (full) {
            t.add_column("R_ab_defined" + sfx, std::move(def));
            t.add_column("T_a+" + sfx, std::move(tp));
            t.add_column("T_b-" + sfx, std::move(tm));
        }
    }
    return t;
}

RowTable three_phase_rows(const SystemModel& model, const std::vector<double>& thetas, double omega,
                          const TransferOptions& opt) {
    RowTable rows;
    rows.header = {"theta_m", "theta_c", "R_mb", "R_bc", "R_mb_defined", "R_bc_defined"};
    for (double tm : thetas) {
        for (double tc : thetas) {
            SystemModel m = model;
            m.couplings[0].phase = tm;
            m.couplings[1].phase = tc;
            const auto tr = transmission_three(transfer_matrix(m, omega, opt));
            const auto [rmb, dmb] = safe_asymmetry(tr.t_m_pm, tr.t_pm_b);
            const auto [rbc, dbc] = safe_asymmetry(tr.t_b_pm, tr.t_pm_c);
            rows.add_row({tm, tc, rmb, rbc, dmb, dbc});
        }
    }
    return rows;
}

SnrSearch snr_search(const json& cfg, const json& section, const SystemModel& model, const std::string& key) {
    SnrSearch s;
    const FrequencyGrid g = omega_grid(cfg);
    s.omega_min = g.min;
    s.omega_max = g.max;
    s.coarse_points = section.at("coarse_points").get<std::size_t>();
    s.resonance_points = section.at("resonance_points").get<bool>();
    s.psi = section.at("psi").get<double>();
    s.transfer = transfer_options(section, key + ".convention");
    if (section.contains("signal_port")) s.signal_port = resolve_port(model, section.at("signal_port"), key + ".signal_port");
    if (section.contains("readout_port") && !section.at("readout_port").is_null()) {
        s.readout_port = resolve_port(model, section.at("readout_port"), key + ".readout_port");
    }
    return s;
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto k = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
    const double t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return ys[k - 1] + t * (ys[k] - ys[k - 1]);
}

json optimum_json(const SnrOptimum& o) {
    return {{"omega", o.omega}, {"snr", o.snr}, {"amplification", o.amplification}};
}

}  // namespace

void require_stable(const SystemModel& model, const std::string& what) {
    const StabilityVerdict v = check_stability(build_drift_matrix(model));
    if (!v.stable) {
        throw InstabilityError(v.spectral_abscissa,
                               what + ": model is unstable (spectral abscissa " + fmt(v.spectral_abscissa) + ")");
    }
    log(LogLevel::kDebug, what + ": stable, spectral abscissa " + fmt(v.spectral_abscissa));
}

// ---------------------------------------------------------------------------

SpectrumTable spectrum_table(Session& s, const std::vector<std::string>& only) {
    const json& sec = task(s, "spectrum");
    const auto variants = sweep_variants(s.cfg());
    for (const auto& v : variants) require_stable(v.model, "spectrum" + v.suffix);
    const auto opt = transfer_options(sec, "task.spectrum.convention");
    const auto grid = omega_grid(s.cfg()).values();
    const double psi = sec.at("psi").get<double>();

    SpectrumTable out;
    out.omega = grid;
    for (const auto& v : variants) {
        if (v.model.topology != Topology::kChain) {
            append(out, transmission_spectrum(v.model, grid, opt, s.threads()), v.suffix, only);
        }
        std::vector<std::size_t> ports;
        if (sec.at("port") == "all") {
            for (std::size_t p = 0; p < v.model.mode_count(); ++p) ports.push_back(p);
        } else {
            ports.push_back(resolve_port(v.model, sec.at("port"), "task.spectrum.port"));
        }
        for (std::size_t p : ports) {
            append(out, output_spectrum(v.model, grid, p, psi, opt, s.threads()), v.suffix, only);
        }
    }
    return out;
}

int cmd_spectrum(Session& s) {
    s.table("spectrum", spectrum_table(s));
    return kExitOk;
}

int cmd_asymmetry(Session& s) {
    const SystemModel model = build_model(s.cfg());
    require_topology(model, {Topology::kDispersiveUnit, Topology::kThreeMode}, "asymmetry");
    require_stable(model, "asymmetry");
    const json& sec = task(s, "asymmetry");
    const auto opt = transfer_options(sec, "task.asymmetry.convention");
    const auto thetas = theta_grid(sec.at("theta_points").get<std::size_t>());
    const auto omegas = sec.at("omegas").get<std::vector<double>>();
    if (model.topology == Topology::kDispersiveUnit) {
        s.table("asymmetry", du_phase_table(model, thetas, omegas, opt, true));
    } else {
        for (double w : omegas) s.rows("asymmetry_w" + fmt(w), three_phase_rows(model, thetas, w, opt));
    }
    return kExitOk;
}

int cmd_snr(Session& s, const std::string& name) {
    const SystemModel model = build_model(s.cfg());
    require_topology(model, {Topology::kThreeMode, Topology::kChain}, "snr");
    require_stable(model, "snr");
    const json& sec = task(s, "snr");
    const SnrSearch search = snr_search(s.cfg(), sec, model, "task.snr");
    const std::size_t readout = search.readout_port.value_or(model.mode_count() - 1);
    const auto grid = omega_grid(s.cfg()).values();

    SpectrumTable table = snr_spectrum(model, grid, search.signal_port, readout, search.psi, search.transfer,
                                       s.threads());
    const SnrOptimum cs = max_snr_over_omega(model, search);
    json summary = {{"cs", optimum_json(cs)}, {"signal_port", search.signal_port}, {"readout_port", readout}};
    if (sec.at("compare_ics").get<bool>() && model.topology == Topology::kThreeMode) {
        const auto cmp = ComparisonConfig::with_default_baseline(model, search);
        require_stable(cmp.ics, "snr (ICS baseline)");
        const auto ics_table = snr_spectrum(cmp.ics, grid, search.signal_port, readout, search.psi, search.transfer,
                                            s.threads());
        table.add_column("S_SNR_ICS", ics_table.column("S_SNR"));
        const SnrOptimum ics = max_snr_over_omega(cmp.ics, search);
        summary["ics"] = optimum_json(ics);
        summary["f"] = cs.snr / ics.snr;
    }
    s.table(name, table);
    s.report(name + "_summary", summary);
    return kExitOk;
}

MapResult run_fmap(Session& s, json& summary) {
    const SystemModel model = build_model(s.cfg());
    require_topology(model, {Topology::kThreeMode}, "fmap");
    const json& sec = task(s, "fmap");
    SnrSearch search = snr_search(s.cfg(), sec, model, "task.fmap");
    const auto cmp = ComparisonConfig::with_default_baseline(model, search);
    require_stable(cmp.ics, "fmap (ICS baseline)");
    const auto grid = delta_grid(s.cfg());
    MapResult map = f_map(cmp, grid, grid, s.threads());

    const std::size_t n = grid.size();
    std::size_t origin = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(grid[i]) < std::abs(grid[origin])) origin = i;
    std::vector<std::uint8_t> above(map.f.size());
    for (std::size_t k = 0; k < map.f.size(); ++k) above[k] = map.stable[k] && map.f[k] > 1.0;
    const RegionStats region = connected_region(above, n, n, origin, origin);

    json unstable = json::array();
    for (std::size_t k = 0; k < map.f.size(); ++k) {
        if (!map.stable[k]) unstable.push_back({map.delta_c[k / n], map.delta_m[k % n]});
    }
    summary = {{"ics", {{"snr", map.ics_snr}}},
               {"grid", {{"delta_min", grid.front()}, {"delta_max", grid.back()}, {"points", n}}},
               {"origin", {{"delta_c", grid[origin]}, {"delta_m", grid[origin]},
                           {"f", map.f[map.index(origin, origin)]}, {"stable", map.stable[map.index(origin, origin)] != 0}}},
               {"f_above_one", {{"cells", region.total}, {"connected_to_origin", region.component},
                                {"contiguous", region.start_inside && region.component == region.total}}},
               {"unstable_cells", unstable}};
    if (map.unstable_count() > 0) {
        log(LogLevel::kWarn, "fmap: " + std::to_string(map.unstable_count()) + " unstable cells omitted from the map");
    }
    return map;
}

RowTable fmap_rows(const MapResult& map) {
    RowTable rows;
    rows.header = {"delta_c", "delta_m", "f", "lg_f", "S_AP", "lg_S_AP", "omega_star"};
    for (std::size_t ic = 0; ic < map.delta_c.size(); ++ic) {
        for (std::size_t im = 0; im < map.delta_m.size(); ++im) {
            const std::size_t k = map.index(ic, im);
            if (!map.stable[k]) continue;
            const double ap = map.amplification[k];
            rows.add_row({map.delta_c[ic], map.delta_m[im], map.f[k], std::log10(map.f[k]), ap,
                          ap > 0.0 ? std::log10(ap) : -300.0, map.omega_star[k]});
        }
    }
    return rows;
}

int cmd_fmap(Session& s) {
    json summary;
    const MapResult map = run_fmap(s, summary);
    s.rows("fmap", fmap_rows(map));
    s.report("fmap_summary", summary);
    return kExitOk;
}

int cmd_chain(Session& s) {
    if (s.cfg().at("system").at("topology") != "chain") {
        throw ConfigError("system.topology", "system.topology: chain needs the chain topology");
    }
    const ChainTemplate unit = build_chain_template(s.cfg());
    const json& sec = task(s, "chain");
    const auto lo = sec.at("modes_min").get<std::size_t>();
    const auto hi = sec.at("modes_max").get<std::size_t>();
    const double omega = sec.at("omega").get<double>();
    const double psi = sec.at("psi").get<double>();

    std::vector<ChainSpec> specs;
    std::size_t stable = 0;
    for (std::size_t n = lo; n <= hi; ++n) {
        specs.push_back(unit.spec(n));
        if (check_stability(build_drift_matrix(specs.back().to_model())).stable) ++stable;
    }
    if (stable < 3) {
        const auto v = check_stability(build_drift_matrix(specs.back().to_model()));
        throw InstabilityError(v.spectral_abscissa, "chain: fewer than three stable chain lengths");
    }
    const ScalingReport rep = scaling_fit(specs, omega, psi);

    RowTable rows;
    rows.header = {"modes", "gain", "ln_gain"};
    for (std::size_t i = 0; i < rep.modes.size(); ++i) {
        rows.add_row({static_cast<double>(rep.modes[i]), rep.gains[i], std::log(rep.gains[i])});
    }
    json excluded = json::array();
    for (const auto& e : rep.excluded) {
        excluded.push_back({{"modes", e.modes}, {"reason", e.reason}, {"spectral_abscissa", e.spectral_abscissa}});
        log(LogLevel::kWarn, "chain: excluded N=" + std::to_string(e.modes) + " (" + e.reason + ")");
    }
    s.rows("chain", rows);
    s.report("chain_report", {{"omega", omega},
                              {"base", rep.base},
                              {"slope", rep.fit.slope},
                              {"intercept", rep.fit.intercept},
                              {"r_squared", rep.fit.r_squared ? json(*rep.fit.r_squared) : json(nullptr)},
                              {"modes", rep.modes},
                              {"gains", rep.gains},
                              {"excluded", excluded},
                              {"warning", rep.warning},
                              {"reference_base", sec.at("reference_base")}});
    return kExitOk;
}

int cmd_oracle(Session& s) {
    const SystemModel model = build_model(s.cfg());
    require_stable(model, "oracle");
    const json& sec = task(s, "oracle");
    OracleConfig oc;
    oc.model = model;
    oc.dt = sec.at("dt").get<double>();
    oc.ensemble = sec.at("ensemble").get<std::size_t>();
    oc.segments_per_member = sec.at("segments_per_member").get<std::size_t>();
    oc.segment_length = sec.at("segment_length").get<std::size_t>();
    oc.overlap = sec.at("overlap").get<std::size_t>();
    oc.seed = sec.at("seed").get<std::uint64_t>();
    oc.psi = sec.at("psi").get<double>();
    oc.noise_scale = sec.at("noise_scale").get<double>();
    oc.max_omega = sec.at("max_omega").get<double>();
    oc.threads = s.threads();
    for (std::size_t i = 0; i < sec.at("ports").size(); ++i) {
        oc.ports.push_back(resolve_port(model, sec.at("ports")[i], "task.oracle.ports." + std::to_string(i)));
    }
    try {
        oc.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("task.oracle", std::string("task.oracle: ") + e.what());
    }
    const OracleRun run = simulate(oc);

    const auto opt = transfer_options(sec, "task.oracle.convention");
    const bool windowed = sec.at("window_correction").get<bool>();
    const std::size_t points = std::max<std::size_t>(omega_grid(s.cfg()).points, 2001);
    const auto grid = FrequencyGrid{-oc.max_omega, oc.max_omega, points}.values();
    CompareOptions co;
    co.z_limit = sec.at("z_limit").get<double>();
    co.pass_threshold = sec.at("pass_threshold").get<double>();
    if (sec.at("exclude_unresolved").get<bool>()) {
        co.excluded_bands = unresolved_bands(check_stability(build_drift_matrix(model)), run.bin_width);
    }

    bool all_passed = true;
    json ports = json::array();
    for (const auto& ps : run.ports) {
        const SpectrumTable pred = windowed ? expected_welch_spectrum(model, run, ps.port, opt)
                                            : output_spectrum(model, grid, ps.port, oc.psi, opt, s.threads());
        const ComparisonReport rep = compare(run.omega, ps, pred, pred.names.front(), co);
        all_passed = all_passed && rep.passed;

        std::map<double, std::size_t> scored;
        for (std::size_t i = 0; i < rep.omega.size(); ++i) scored[rep.omega[i]] = i;
        const auto& pv = pred.column(pred.names.front());
        RowTable rows;
        rows.header = {"omega", "psd", "standard_error", "predicted", "z", "included"};
        for (std::size_t i = 0; i < run.omega.size(); ++i) {
            const double w = run.omega[i];
            const auto it = scored.find(w);
            const double p = it != scored.end() ? rep.predicted[it->second] : interpolate(pred.omega, pv, w);
            rows.add_row({w, ps.psd[i], ps.standard_error[i], p, it != scored.end() ? rep.z[it->second] : 0.0,
                          it != scored.end() ? 1.0 : 0.0});
        }
        s.rows("oracle_" + ps.label, rows);
        ports.push_back({{"port", ps.port},
                         {"label", ps.label},
                         {"compared", rep.compared},
                         {"within", rep.within},
                         {"excluded", rep.excluded},
                         {"pass_fraction", rep.pass_fraction},
                         {"passed", rep.passed}});
        log(rep.passed ? LogLevel::kInfo : LogLevel::kWarn,
            "oracle: port " + ps.label + " pass fraction " + fmt(rep.pass_fraction));
    }
    s.report("oracle_report", {{"dt", run.dt},
                               {"bin_width", run.bin_width},
                               {"steps_per_member", run.steps_per_member},
                               {"ensemble", oc.ensemble},
                               {"seed", oc.seed},
                               {"max_conjugate_drift", run.max_conjugate_drift},
                               {"convention", sec.at("convention")},
                               {"window_correction", windowed},
                               {"ports", ports},
                               {"passed", all_passed}});
    return all_passed ? kExitOk : kExitOracle;
}

int cmd_optimize(Session& s) {
    const SystemModel model = build_model(s.cfg());
    const json& sec = task(s, "optimize");
    const auto which = sec.at("which").get<std::string>();
    const double target = sec.at("target").get<double>();
    const double omega = sec.at("omega").get<double>();
    const auto points = sec.at("grid_points").get<std::size_t>();
    const auto opt = transfer_options(sec, "task.optimize.convention");
    require_stable(model, "optimize");

    PhaseSearchResult r;
    if (which == "ab") {
        require_topology(model, {Topology::kDispersiveUnit}, "optimize (which=ab)");
        r = find_phase_for_target(
            [&](double theta) {
                SystemModel m = model;
                m.couplings[0].phase = theta;
                return r_ab(transmission_du(transfer_matrix(m, omega, opt)));
            },
            target, points);
    } else {
        require_topology(model, {Topology::kThreeMode}, "optimize (which=" + which + ")");
        r = find_phase_for_target_r(model, target, which == "mb" ? AsymmetryIndex::kMB : AsymmetryIndex::kBC, omega,
                                    points, opt);
    }
    s.report("optimize", {{"which", which},
                          {"target", target},
                          {"omega", omega},
                          {"theta", r.theta},
                          {"value", r.value},
                          {"residual", r.residual},
                          {"reached", r.reached}});
    return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_figure(Session& s, const std::string& which) {
    if (which == "fig2") {
        s.table("fig2_abc", spectrum_table(s, {"T_a+", "T_b+", "R_ab"}));
        const SystemModel base = build_model(s.cfg());
        require_stable(base, "fig2");
        const json& sec = task(s, "asymmetry");
        const auto thetas = theta_grid(sec.at("theta_points").get<std::size_t>());
        s.table("fig2_d", du_phase_table(base, thetas, sec.at("omegas").get<std::vector<double>>(),
                                         transfer_options(sec, "task.asymmetry.convention"), false));
        s.text("fig2.gp",
               "# gnuplot stub for the transmission and asymmetry panels\n"
               "set datafile separator ','\n"
               "set datafile commentschars '#'\n"
               "set key autotitle columnhead\n"
               "set logscale y\n"
               "plot for [i=2:*:3] 'fig2_abc.csv' using 1:i with lines, \\\n"
               "     for [i=3:*:3] 'fig2_abc.csv' using 1:i with lines dashtype 2\n"
               "pause -1\n"
               "unset logscale y\n"
               "plot for [i=2:*] 'fig2_d.csv' using 1:i with lines\n"
               "pause -1\n");
        return kExitOk;
    }
    if (which == "fig3") {
        const SystemModel model = build_model(s.cfg());
        require_topology(model, {Topology::kThreeMode}, "figures fig3");
        require_stable(model, "fig3");
        const json& sec = task(s, "asymmetry");
        const auto thetas = theta_grid(sec.at("theta_points").get<std::size_t>());
        const auto opt = transfer_options(sec, "task.asymmetry.convention");
        std::string gp =
            "# gnuplot stub for the phase maps\n"
            "set datafile separator ','\n"
            "set datafile commentschars '#'\n"
            "set xlabel 'theta_m'\nset ylabel 'theta_c'\n";
        for (double w : sec.at("omegas").get<std::vector<double>>()) {
            const std::string name = "fig3_w" + fmt(w);
            s.rows(name, three_phase_rows(model, thetas, w, opt));
            gp += "splot '" + name + ".csv' using 1:2:3 with points title 'R_mb', '" + name +
                  ".csv' using 1:2:4 with points title 'R_bc'\npause -1\n";
        }
        s.text("fig3.gp", gp);
        return kExitOk;
    }
    if (which == "fig4") {
        json summary;
        const MapResult map = run_fmap(s, summary);
        s.rows("fig4_ab", fmap_rows(map));
        s.report("fig4_summary", summary);
        cmd_snr(s, "fig4_c");
        s.text("fig4.gp",
               "# gnuplot stub for the f map, the amplification map and the SNR comparison\n"
               "set datafile separator ','\n"
               "set datafile commentschars '#'\n"
               "set view map\nset xlabel 'Delta_m'\nset ylabel 'Delta_c'\n"
               "splot 'fig4_ab.csv' using 2:1:4 with points palette pointtype 5 title 'lg f'\npause -1\n"
               "splot 'fig4_ab.csv' using 2:1:6 with points palette pointtype 5 title 'lg S_AP'\npause -1\n"
               "unset view\nset xlabel 'omega'\nset ylabel 'S_SNR'\n"
               "plot 'fig4_c.csv' using 1:3 with lines title 'CS', 'fig4_c.csv' using 1:4 with lines title 'ICS'\n"
               "pause -1\n");
        return kExitOk;
    }
    throw ConfigError("figure", "unknown figure '" + which + "'");
}

}  // namespace sasc::app
