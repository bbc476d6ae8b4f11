#pragma once

// Strict JSON experiment configuration: a single top-level "experiment"
// object; unknown fields are errors.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "xylab/ensemble.hpp"

namespace xylab {

/// Throws ConfigError naming the line and field path of the problem.
EnsembleConfig parse_config(const std::string& text);
EnsembleConfig load_config(const std::filesystem::path& path);

/// Canonical document that parse_config maps back to the same configuration (threads excluded).
nlohmann::json config_to_json(const EnsembleConfig& config);

ExperimentKind parse_kind(const std::string& name);

}  // namespace xylab
