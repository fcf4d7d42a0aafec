#pragma once

#include "mpfluct/montecarlo.hpp"

#include <json.hpp>

#include <string>

namespace mpfluct::config {

/// Reads an ExperimentConfig from a JSON object mirroring its fields.
/// Rationals are "num/den" strings or integers. Throws ConfigError naming
/// the offending field, prefixed by `source`.
montecarlo::ExperimentConfig from_json(const nlohmann::json& doc, const std::string& source = "config");
nlohmann::json to_json(const montecarlo::ExperimentConfig& cfg);

montecarlo::ExperimentConfig load(const std::string& path);
montecarlo::ExperimentConfig parse(const std::string& text, const std::string& source = "config");

}  // namespace mpfluct::config
