#include "sasc/app/config.hpp"
#include "sasc/metrics.hpp"
#include "sasc/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace sasc::app {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw ConfigError(key, key + ": " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items()) {
        if (!ok.count(k)) fail(join(path, k), "unknown key");
    }
}

json& child_object(json& parent, const std::string& path, const char* key) {
    if (!parent.contains(key)) parent[key] = json::object();
    json& c = parent[key];
    if (!c.is_object()) fail(join(path, key), "expected an object");
    return c;
}

enum class Range { kAny, kPositive, kNonNegative };

double number(json& o, const std::string& path, const char* key, std::optional<double> def,
              Range range = Range::kAny) {
    const std::string k = join(path, key);
    if (!o.contains(key)) {
        if (!def) fail(k, "required number is missing");
        o[key] = *def;
    }
    const json& v = o[key];
    if (!v.is_number()) fail(k, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(k, "must be finite");
    if (range == Range::kPositive && !(x > 0.0)) fail(k, "must be positive (got " + v.dump() + ")");
    if (range == Range::kNonNegative && !(x >= 0.0)) fail(k, "must be non-negative (got " + v.dump() + ")");
    return x;
}

std::int64_t integer(json& o, const std::string& path, const char* key, std::optional<std::int64_t> def,
                     std::int64_t min) {
    const std::string k = join(path, key);
    if (!o.contains(key)) {
        if (!def) fail(k, "required integer is missing");
        o[key] = *def;
    }
    const json& v = o[key];
    if (!v.is_number_integer()) fail(k, "expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < min) fail(k, "must be at least " + std::to_string(min) + " (got " + v.dump() + ")");
    return x;
}

std::string string_of(json& o, const std::string& path, const char* key, std::optional<std::string> def,
                      std::initializer_list<const char*> allowed = {}) {
    const std::string k = join(path, key);
    if (!o.contains(key)) {
        if (!def) fail(k, "required string is missing");
        o[key] = *def;
    }
    const json& v = o[key];
    if (!v.is_string()) fail(k, "expected a string");
    const auto s = v.get<std::string>();
    if (allowed.size() > 0) {
        bool hit = false;
        std::string list;
        for (const char* a : allowed) {
            hit = hit || s == a;
            list += list.empty() ? a : std::string("|") + a;
        }
        if (!hit) fail(k, "must be one of " + list + " (got \"" + s + "\")");
    }
    return s;
}

bool boolean(json& o, const std::string& path, const char* key, bool def) {
    if (!o.contains(key)) o[key] = def;
    if (!o[key].is_boolean()) fail(join(path, key), "expected true or false");
    return o[key].get<bool>();
}

std::vector<double> number_list(json& o, const std::string& path, const char* key,
                                std::optional<std::vector<double>> def) {
    const std::string k = join(path, key);
    if (!o.contains(key)) {
        if (!def) fail(k, "required list is missing");
        o[key] = *def;
    }
    const json& v = o[key];
    if (!v.is_array()) fail(k, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
            fail(k + "." + std::to_string(i), "expected a finite number");
        }
        out.push_back(v[i].get<double>());
    }
    return out;
}

void port_value(json& o, const std::string& path, const char* key, const json& def) {
    if (!o.contains(key)) o[key] = def;
    const json& v = o[key];
    if (!(v.is_string() || (v.is_number_integer() && v.get<std::int64_t>() >= 0) || v.is_null())) {
        fail(join(path, key), "expected a mode label or a non-negative index");
    }
}

void normalize_mode(json& m, const std::string& path, std::size_t index, const std::string& default_kind,
                    bool detuning_from_drive) {
    check_keys(m, path, {"label", "kind", "kappa", "detuning", "frequency_hz"});
    string_of(m, path, "label", "mode" + std::to_string(index));
    const auto kind = string_of(m, path, "kind", default_kind, {"high", "low"});
    if (kind != default_kind) fail(join(path, "kind"), "this topology needs a " + default_kind + " mode here");
    number(m, path, "kappa", std::nullopt, Range::kPositive);
    number(m, path, "frequency_hz", std::nullopt, Range::kPositive);
    if (kind == "high") {
        if (detuning_from_drive) {
            if (m.contains("detuning")) {
                fail(join(path, "detuning"), "a bare drive sets the detuning; remove one of the two");
            }
        } else {
            number(m, path, "detuning", 0.0);
        }
    } else {
        number(m, path, "detuning", 1.0, Range::kPositive);
    }
}

void normalize_coupling(json& c, const std::string& path) {
    check_keys(c, path, {"magnitude", "phase"});
    number(c, path, "magnitude", std::nullopt, Range::kNonNegative);
    number(c, path, "phase", 0.0);
}

void normalize_system(json& s) {
    const std::string p = "system";
    check_keys(s, p, {"topology", "temperature", "modes", "couplings", "drive", "chain"});
    const auto topo = string_of(s, p, "topology", std::nullopt, {"du", "three_mode", "chain"});
    number(s, p, "temperature", 0.0, Range::kNonNegative);

    if (topo == "chain") {
        for (const char* k : {"modes", "couplings", "drive"}) {
            if (s.contains(k)) fail(join(p, k), "not used by the chain topology (use system.chain)");
        }
        json& c = child_object(s, p, "chain");
        const std::string cp = "system.chain";
        check_keys(c, cp, {"modes", "coupling_cycle", "kappa_first_high", "kappa_high", "kappa_low",
                           "detuning_pattern", "low_frequency", "high_frequency_hz", "low_frequency_hz"});
        integer(c, cp, "modes", 3, 2);
        if (!c.contains("coupling_cycle") || !c["coupling_cycle"].is_array() || c["coupling_cycle"].empty()) {
            fail(join(cp, "coupling_cycle"), "expected a non-empty list of couplings");
        }
        for (std::size_t i = 0; i < c["coupling_cycle"].size(); ++i) {
            normalize_coupling(c["coupling_cycle"][i], cp + ".coupling_cycle." + std::to_string(i));
        }
        number(c, cp, "kappa_first_high", std::nullopt, Range::kPositive);
        number(c, cp, "kappa_high", std::nullopt, Range::kPositive);
        number(c, cp, "kappa_low", std::nullopt, Range::kPositive);
        const auto pattern = number_list(c, cp, "detuning_pattern", std::vector<double>{0.0, 0.0});
        if (pattern.size() != 2) fail(join(cp, "detuning_pattern"), "expected exactly two values");
        number(c, cp, "low_frequency", 1.0, Range::kPositive);
        number(c, cp, "high_frequency_hz", std::nullopt, Range::kPositive);
        number(c, cp, "low_frequency_hz", std::nullopt, Range::kPositive);
        return;
    }

    if (s.contains("chain")) fail(join(p, "chain"), "only used by the chain topology");
    const bool du = topo == "du";
    const bool has_drive = s.contains("drive");
    if (has_drive && !du) fail(join(p, "drive"), "a bare drive is only supported for the du topology");
    if (has_drive && s.contains("couplings")) {
        fail(join(p, "couplings"), "a bare drive sets the coupling; remove one of the two");
    }

    if (!s.contains("modes") || !s["modes"].is_array()) fail(join(p, "modes"), "expected a list of modes");
    json& modes = s["modes"];
    const std::vector<std::string> kinds = du ? std::vector<std::string>{"high", "low"}
                                              : std::vector<std::string>{"high", "low", "high"};
    if (modes.size() != kinds.size()) {
        fail(join(p, "modes"), "expected " + std::to_string(kinds.size()) + " modes for topology " + topo);
    }
    for (std::size_t i = 0; i < modes.size(); ++i) {
        normalize_mode(modes[i], "system.modes." + std::to_string(i), i, kinds[i], has_drive && i == 0);
    }

    if (has_drive) {
        json& d = s["drive"];
        const std::string dp = "system.drive";
        check_keys(d, dp, {"g", "epsilon", "drive_frequency", "branch"});
        number(d, dp, "g", std::nullopt);
        number(d, dp, "epsilon", std::nullopt, Range::kNonNegative);
        number(d, dp, "drive_frequency", std::nullopt);
        if (d.contains("branch")) integer(d, dp, "branch", std::nullopt, 0);
        return;
    }
    if (!s.contains("couplings") || !s["couplings"].is_array()) fail(join(p, "couplings"), "expected a list of couplings");
    json& cs = s["couplings"];
    const std::size_t want = du ? 1 : 2;
    if (cs.size() != want) fail(join(p, "couplings"), "expected " + std::to_string(want) + " couplings for topology " + topo);
    for (std::size_t i = 0; i < cs.size(); ++i) normalize_coupling(cs[i], "system.couplings." + std::to_string(i));
}

void normalize_task(json& t) {
    const std::string p = "task";
    check_keys(t, p, {"kind", "spectrum", "asymmetry", "snr", "fmap", "chain", "oracle", "optimize", "figure"});
    if (t.contains("kind")) {
        string_of(t, p, "kind", std::nullopt,
                  {"spectrum", "asymmetry", "snr", "fmap", "chain", "oracle", "optimize", "figure"});
    }
    {
        json& s = child_object(t, p, "spectrum");
        const std::string sp = "task.spectrum";
        check_keys(s, sp, {"port", "psi", "convention", "sweep"});
        port_value(s, sp, "port", "all");
        number(s, sp, "psi", 0.0);
        string_of(s, sp, "convention", "paired_conjugate", {"paired_conjugate", "fourier"});
        if (s.contains("sweep")) {
            json& w = s["sweep"];
            const std::string wp = "task.spectrum.sweep";
            check_keys(w, wp, {"path", "values", "name"});
            const auto path = string_of(w, wp, "path", std::nullopt);
            if (path.rfind("system.", 0) != 0) fail(join(wp, "path"), "must point into the system block");
            const auto values = number_list(w, wp, "values", std::nullopt);
            if (values.empty()) fail(join(wp, "values"), "expected at least one value");
            string_of(w, wp, "name", path.substr(path.find_last_of('.') + 1));
        }
    }
    {
        json& a = child_object(t, p, "asymmetry");
        const std::string ap = "task.asymmetry";
        check_keys(a, ap, {"omegas", "theta_points", "convention"});
        number_list(a, ap, "omegas", std::vector<double>{0.0, 1.0});
        integer(a, ap, "theta_points", 121, 2);
        string_of(a, ap, "convention", "paired_conjugate", {"paired_conjugate", "fourier"});
    }
    const auto search_keys = [](json& o, const std::string& op) {
        integer(o, op, "coarse_points", 1201, static_cast<std::int64_t>(kMinCoarsePoints));
        boolean(o, op, "resonance_points", true);
        string_of(o, op, "convention", "paired_conjugate", {"paired_conjugate", "fourier"});
    };
    {
        json& s = child_object(t, p, "snr");
        const std::string sp = "task.snr";
        check_keys(s, sp, {"signal_port", "readout_port", "psi", "compare_ics", "coarse_points", "resonance_points",
                           "convention"});
        port_value(s, sp, "signal_port", 0);
        port_value(s, sp, "readout_port", nullptr);
        number(s, sp, "psi", 0.0);
        boolean(s, sp, "compare_ics", true);
        search_keys(s, sp);
    }
    {
        json& f = child_object(t, p, "fmap");
        const std::string fp = "task.fmap";
        check_keys(f, fp, {"coarse_points", "resonance_points", "convention", "psi"});
        number(f, fp, "psi", 0.0);
        search_keys(f, fp);
    }
    {
        json& c = child_object(t, p, "chain");
        const std::string cp = "task.chain";
        check_keys(c, cp, {"modes_min", "modes_max", "omega", "psi", "reference_base"});
        const auto lo = integer(c, cp, "modes_min", 2, 2);
        const auto hi = integer(c, cp, "modes_max", 6, 2);
        if (hi < lo + 2) fail(join(cp, "modes_max"), "need at least three chain lengths");
        number(c, cp, "omega", 0.0);
        number(c, cp, "psi", 0.0);
        number(c, cp, "reference_base", 3.68, Range::kPositive);
    }
    {
        json& o = child_object(t, p, "oracle");
        const std::string op = "task.oracle";
        check_keys(o, op, {"ensemble", "segments_per_member", "segment_length", "overlap", "seed", "dt", "ports", "psi",
                           "noise_scale", "max_omega", "convention", "z_limit", "pass_threshold",
                           "exclude_unresolved", "window_correction"});
        integer(o, op, "ensemble", 64, 1);
        integer(o, op, "segments_per_member", 16, 1);
        const auto seg = integer(o, op, "segment_length", 4096, 16);
        if ((seg & (seg - 1)) != 0) fail(join(op, "segment_length"), "must be a power of two");
        const auto ov = integer(o, op, "overlap", seg / 2, 0);
        if (ov >= seg) fail(join(op, "overlap"), "must be below segment_length");
        integer(o, op, "seed", 1, 0);
        number(o, op, "dt", 0.0, Range::kNonNegative);
        if (!o.contains("ports")) o["ports"] = json::array();
        if (!o["ports"].is_array()) fail(join(op, "ports"), "expected a list of ports");
        for (std::size_t i = 0; i < o["ports"].size(); ++i) {
            const json& v = o["ports"][i];
            if (!(v.is_string() || (v.is_number_integer() && v.get<std::int64_t>() >= 0))) {
                fail(op + ".ports." + std::to_string(i), "expected a mode label or a non-negative index");
            }
        }
        number(o, op, "psi", 0.0);
        number(o, op, "noise_scale", 1.0, Range::kNonNegative);
        number(o, op, "max_omega", 3.0, Range::kPositive);
        string_of(o, op, "convention", "paired_conjugate", {"paired_conjugate", "fourier"});
        number(o, op, "z_limit", 3.0, Range::kPositive);
        const double thr = number(o, op, "pass_threshold", 0.99, Range::kNonNegative);
        if (thr > 1.0) fail(join(op, "pass_threshold"), "must not exceed 1");
        boolean(o, op, "exclude_unresolved", true);
        boolean(o, op, "window_correction", true);
    }
    {
        json& o = child_object(t, p, "optimize");
        const std::string op = "task.optimize";
        check_keys(o, op, {"target", "which", "omega", "grid_points", "convention"});
        const double target = number(o, op, "target", -1.0);
        if (target < -1.0 || target > 1.0) fail(join(op, "target"), "must lie in [-1, 1]");
        string_of(o, op, "which", "mb", {"ab", "mb", "bc"});
        number(o, op, "omega", 1.0);
        integer(o, op, "grid_points", 721, 3);
        string_of(o, op, "convention", "paired_conjugate", {"paired_conjugate", "fourier"});
    }
    {
        json& f = child_object(t, p, "figure");
        check_keys(f, "task.figure", {"name"});
        if (f.contains("name")) string_of(f, "task.figure", "name", std::nullopt, {"fig2", "fig3", "fig4"});
    }
}

void normalize_grid(json& g) {
    const std::string p = "grid";
    check_keys(g, p, {"omega_min", "omega_max", "points", "delta_min", "delta_max", "delta_points"});
    const double lo = number(g, p, "omega_min", -3.0);
    const double hi = number(g, p, "omega_max", 3.0);
    if (!(hi > lo)) fail("grid.omega_max", "must exceed grid.omega_min");
    integer(g, p, "points", 1201, 2);
    const double dlo = number(g, p, "delta_min", -2.0);
    const double dhi = number(g, p, "delta_max", 2.0);
    if (!(dhi > dlo)) fail("grid.delta_max", "must exceed grid.delta_min");
    integer(g, p, "delta_points", 41, 2);
}

void normalize_output(json& o) {
    const std::string p = "output";
    check_keys(o, p, {"dir", "format", "prefix"});
    string_of(o, p, "dir", ".");
    string_of(o, p, "format", "csv", {"csv", "json"});
    string_of(o, p, "prefix", "");
}

}  // namespace

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot read config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("--config", "config file '" + path + "' is not valid JSON: " + e.what());
    }
}

void apply_override(json& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("--set", "--set expects key=value (got '" + assignment + "')");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }

    json* node = &cfg;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string& key = parts[i];
        if (key.empty()) throw ConfigError(path, path + ": empty path component");
        const bool last = i + 1 == parts.size();
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                std::size_t used = 0;
                idx = std::stoul(key, &used);
                if (used != key.size()) throw std::invalid_argument(key);
            } catch (const std::exception&) {
                throw ConfigError(path, path + ": '" + key + "' is not a list index");
            }
            if (idx >= node->size()) throw ConfigError(path, path + ": index " + key + " out of range");
            node = &(*node)[idx];
        } else {
            if (node->is_null()) *node = json::object();
            if (!node->is_object()) throw ConfigError(path, path + ": cannot descend into a scalar");
            node = &(*node)[key];
        }
        if (last) *node = value;
    }
}

json normalize_config(const json& input) {
    if (!input.is_object()) throw ConfigError("", "config must be a JSON object");
    json cfg = input;
    check_keys(cfg, "", {"system", "task", "grid", "output"});
    if (!cfg.contains("system")) fail("system", "required block is missing");
    normalize_system(cfg["system"]);
    normalize_task(child_object(cfg, "", "task"));
    normalize_grid(child_object(cfg, "", "grid"));
    normalize_output(child_object(cfg, "", "output"));
    return cfg;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string config_hash(const json& cfg) {
    json hashed = cfg;
    if (hashed.is_object()) hashed.erase("output");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(hashed.dump())));
    return buf;
}

namespace {

ModeParams mode_from(const json& m) {
    ModeParams p;
    p.label = m.at("label").get<std::string>();
    p.kind = m.at("kind").get<std::string>() == "high" ? ModeKind::kHigh : ModeKind::kLow;
    p.kappa = m.at("kappa").get<double>();
    p.detuning = m.value("detuning", 0.0);
    p.absolute_frequency = kTwoPi * m.at("frequency_hz").get<double>();
    return p;
}

CouplingParams coupling_from(const json& c) {
    return CouplingParams{c.at("magnitude").get<double>(), c.at("phase").get<double>()};
}

}  // namespace

ChainTemplate build_chain_template(const json& cfg) {
    const json& s = cfg.at("system");
    if (s.at("topology") != "chain") throw ConfigError("system.topology", "system.topology: expected chain");
    const json& c = s.at("chain");
    ChainTemplate t;
    t.coupling_cycle.clear();
    for (const auto& g : c.at("coupling_cycle")) t.coupling_cycle.push_back(coupling_from(g));
    t.kappa_first_high = c.at("kappa_first_high").get<double>();
    t.kappa_high = c.at("kappa_high").get<double>();
    t.kappa_low = c.at("kappa_low").get<double>();
    t.detuning_pattern = {c.at("detuning_pattern")[0].get<double>(), c.at("detuning_pattern")[1].get<double>()};
    t.low_frequency = c.at("low_frequency").get<double>();
    t.high_absolute_frequency = kTwoPi * c.at("high_frequency_hz").get<double>();
    t.low_absolute_frequency = kTwoPi * c.at("low_frequency_hz").get<double>();
    t.temperature = s.at("temperature").get<double>();
    return t;
}

SystemModel build_model(const json& cfg) {
    const json& s = cfg.at("system");
    const std::string topo = s.at("topology").get<std::string>();
    const double temperature = s.at("temperature").get<double>();
    try {
        if (topo == "chain") {
            const auto n = s.at("chain").at("modes").get<std::size_t>();
            return build_chain_template(cfg).spec(n).to_model();
        }
        std::vector<ModeParams> modes;
        for (const auto& m : s.at("modes")) modes.push_back(mode_from(m));
        if (s.contains("drive")) {
            const json& d = s.at("drive");
            const BareDriveParams bare{d.at("g").get<double>(), d.at("epsilon").get<double>(),
                                       d.at("drive_frequency").get<double>()};
            std::optional<std::size_t> branch;
            if (d.contains("branch")) branch = d.at("branch").get<std::size_t>();
            return linearize_unit(bare, modes[0], modes[1], temperature, branch);
        }
        std::vector<CouplingParams> cs;
        for (const auto& c : s.at("couplings")) cs.push_back(coupling_from(c));
        if (topo == "du") return SystemModel::dispersive_unit(modes[0], modes[1], cs[0], temperature);
        return SystemModel::three_mode(modes[0], modes[1], modes[2], cs[0], cs[1], temperature);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("system", std::string("system: ") + e.what());
    }
}

FrequencyGrid omega_grid(const json& cfg) {
    const json& g = cfg.at("grid");
    return FrequencyGrid{g.at("omega_min").get<double>(), g.at("omega_max").get<double>(),
                         g.at("points").get<std::size_t>()};
}

std::vector<double> delta_grid(const json& cfg) {
    const json& g = cfg.at("grid");
    return FrequencyGrid{g.at("delta_min").get<double>(), g.at("delta_max").get<double>(),
                         g.at("delta_points").get<std::size_t>()}
        .values();
}

std::size_t resolve_port(const SystemModel& model, const json& port, const std::string& key) {
    if (port.is_number_integer()) {
        const auto i = port.get<std::int64_t>();
        if (i < 0 || static_cast<std::size_t>(i) >= model.mode_count()) {
            throw ConfigError(key, key + ": port index " + std::to_string(i) + " out of range");
        }
        return static_cast<std::size_t>(i);
    }
    if (port.is_string()) {
        const auto label = port.get<std::string>();
        for (std::size_t i = 0; i < model.mode_count(); ++i)
            if (model.modes[i].label == label) return i;
        throw ConfigError(key, key + ": no mode labelled '" + label + "'");
    }
    throw ConfigError(key, key + ": expected a mode label or index");
}

FrequencyConvention parse_convention(const std::string& name, const std::string& key) {
    if (name == "paired_conjugate") return FrequencyConvention::kPairedConjugate;
    if (name == "fourier") return FrequencyConvention::kFourier;
    throw ConfigError(key, key + ": unknown convention '" + name + "'");
}

}  // namespace sasc::app
