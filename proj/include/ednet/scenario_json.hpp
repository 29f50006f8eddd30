#pragma once

#include <string>

#include "ednet/scenario.hpp"

namespace ednet {

/// Parses a scenario generator config document (see docs/formats.md).
ScenarioConfig parse_scenario_config(const std::string& json_text);
ScenarioConfig load_scenario_config(const std::string& path);

/// Fully materialized scenario (all sampled values inlined), round-trippable.
std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& json_text);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);

}  // namespace ednet
