#include "sasc/app/cli.hpp"

#include "commands.hpp"
#include "session.hpp"

#include "sasc/app/config.hpp"
#include "sasc/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <stdexcept>

#ifndef SASC_VERSION
#define SASC_VERSION "0.0.0"
#endif
#ifndef SASC_CONFIG_DIR
#define SASC_CONFIG_DIR "configs"
#endif

namespace sasc::app {

const char* tool_version() noexcept { return SASC_VERSION; }

std::filesystem::path builtin_config_dir() {
    if (const char* env = std::getenv("SASC_CONFIG_DIR")) return env;
    return SASC_CONFIG_DIR;
}

namespace {

json assemble_config(const RunOptions& o) {
    json cfg;
    if (!o.config_path.empty()) {
        cfg = load_config_file(o.config_path);
    } else if (o.command == "figures") {
        cfg = load_config_file((builtin_config_dir() / (o.figure + ".json")).string());
    } else {
        throw ConfigError("config", "--config is required for " + o.command);
    }
    for (const auto& a : o.overrides) apply_override(cfg, a);
    if (o.seed >= 0) apply_override(cfg, "task.oracle.seed=" + std::to_string(o.seed));
    if (!o.format.empty()) apply_override(cfg, "output.format=" + json(o.format).dump());
    if (!o.out_dir.empty()) apply_override(cfg, "output.dir=" + json(o.out_dir).dump());
    return normalize_config(cfg);
}

int dispatch(Session& s, const RunOptions& o) {
    if (o.command == "spectrum") return cmd_spectrum(s);
    if (o.command == "asymmetry") return cmd_asymmetry(s);
    if (o.command == "snr") return cmd_snr(s);
    if (o.command == "fmap") return cmd_fmap(s);
    if (o.command == "chain") return cmd_chain(s);
    if (o.command == "oracle") return cmd_oracle(s);
    if (o.command == "optimize") return cmd_optimize(s);
    if (o.command == "figures") return cmd_figure(s, o.figure);
    throw ConfigError("command", "unknown command '" + o.command + "'");
}

}  // namespace

int run(const RunOptions& options) {
    try {
        Session session(assemble_config(options), options.command, options.threads);
        log(LogLevel::kDebug, "config hash " + session.hash());
        const int code = dispatch(session, options);
        session.flush();
        return code;
    } catch (const ConfigError& e) {
        log(LogLevel::kError, std::string("config: ") + e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        log(LogLevel::kError, std::string("config: ") + e.what());
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        log(LogLevel::kError, std::string("config: ") + e.what());
        return kExitConfig;
    } catch (const InstabilityError& e) {
        log(LogLevel::kError, e.what());
        return kExitUnstable;
    } catch (const std::exception& e) {
        log(LogLevel::kError, e.what());
        return kExitNumerical;
    }
}

int main_entry(int argc, char** argv) {
    CLI::App app{"Steady-state and spectral analysis of coupled bosonic modes"};
    app.set_version_flag("--version", std::string("sasc ") + tool_version());
    app.require_subcommand(1);

    RunOptions o;
    auto common = [&o](CLI::App* sub) {
        sub->add_option("-c,--config", o.config_path, "scenario file (JSON)");
        sub->add_option("-s,--set", o.overrides, "override, e.g. system.couplings.0.phase=1.57")->take_all();
        sub->add_option("-o,--out", o.out_dir, "output directory");
        sub->add_option("--seed", o.seed, "oracle seed")->check(CLI::NonNegativeNumber);
        sub->add_option("-j,--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    };
    const std::pair<const char*, const char*> commands[] = {
        {"spectrum", "transmission and output spectra over omega"},
        {"asymmetry", "isolation ratios over coupling phases"},
        {"snr", "amplification and SNR spectra, with the incoherent baseline"},
        {"fmap", "SNR improvement map over the two detunings"},
        {"chain", "end-to-end gain against chain length"},
        {"oracle", "stochastic simulation checked against the analytic spectra"},
        {"optimize", "coupling phase reaching a target isolation ratio"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        common(sub);
        sub->callback([&o, n = name] { o.command = n; });
    }
    auto* fig = app.add_subcommand("figures", "regenerate the data behind one figure");
    common(fig);
    fig->add_option("which", o.figure, "fig2, fig3 or fig4")->required()->check(CLI::IsMember({"fig2", "fig3", "fig4"}));
    fig->callback([&o] { o.command = "figures"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }
    return run(o);
}

}  // namespace sasc::app
