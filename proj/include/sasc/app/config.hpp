// config.hpp: scenario configuration files for the command-line tool.
//
// A scenario is a JSON object with four blocks:
//   system  topology, modes, couplings (or a bare drive), temperature, chain template
//   task    per-command sections (spectrum, asymmetry, snr, fmap, chain, oracle, optimize, figure)
//   grid    omega grid and the detuning grid of maps
//   output  directory, format, file prefix
// Unknown keys anywhere are rejected before any computation.
#pragma once

#include "sasc/chain.hpp"
#include "sasc/model.hpp"
#include "sasc/spectra.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sasc::app {

using nlohmann::json;

json load_config_file(const std::string& path);

// Applies "dotted.path.0.key=value". The value is parsed as JSON when
// possible and kept as a string otherwise. Throws ConfigError.
void apply_override(json& cfg, const std::string& assignment);

// Fills defaults and checks keys, types and ranges. Throws ConfigError naming the key.
json normalize_config(const json& cfg);

// FNV-1a 64 of the canonical dump (sorted keys, no whitespace), as 16 hex digits.
std::string config_hash(const json& cfg);
std::uint64_t fnv1a64(const std::string& bytes);

// Model of the system block. Chains use chain.modes as their length.
SystemModel build_model(const json& cfg);
ChainTemplate build_chain_template(const json& cfg);

FrequencyGrid omega_grid(const json& cfg);
std::vector<double> delta_grid(const json& cfg);

// Port index from a label or an integer.
std::size_t resolve_port(const SystemModel& model, const json& port, const std::string& key);

FrequencyConvention parse_convention(const std::string& name, const std::string& key);

}  // namespace sasc::app
