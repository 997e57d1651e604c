#pragma once

#include <json.hpp>

#include "chiplet/optim_hybrid.hpp"

namespace chiplet {

// Optimizer settings file:
//   {"sa": {...}, "ppo": {...}, "hybrid": {...}, "env": {...}}
// Missing keys keep their defaults; unknown keys are rejected.
HybridConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HybridConfig& c);

}  // namespace chiplet
