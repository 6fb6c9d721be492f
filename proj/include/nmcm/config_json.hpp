// config_json.hpp: JSON mapping of SimulationConfig (nlohmann/json).
#pragma once

#include "json.hpp"
#include "nmcm/config.hpp"

namespace nmcm {

nlohmann::json config_to_json(const SimulationConfig& config);

/// Strict conversion: unknown keys and wrong types raise ConfigError.
SimulationConfig config_from_json(const nlohmann::json& j);

}  // namespace nmcm
