#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "dpa/simulation.hpp"

namespace dpa {

// A scenario loaded from file, together with the fully resolved
// configuration (defaults filled in, equilibrium prices computed) that every
// report embeds so its outputs are self-reproducing.
struct ScenarioDoc {
  Scenario scenario;
  std::string family;   // wm-rp | vwm-rp | vwm-pia | ama | broken-*
  bool broken = false;  // verification fixtures; only `verify` accepts them
  nlohmann::ordered_json config;
};

ScenarioDoc parse_scenario(const std::string& text, const std::string& origin);
ScenarioDoc load_scenario_file(const std::string& path);

void apply_overrides(ScenarioDoc& doc, std::optional<std::uint64_t> seed,
                     std::optional<std::size_t> samples);

}  // namespace dpa
