#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "portalloc/domain.hpp"

namespace portalloc {

// Instance document:
//   { "markets": ["A", ...],
//     "contracts": [{"market": "A", "wholesale_price": [..T..], "max_volume": 20,
//                    "flex_above_min": 0}, ...],
//     "supply_steps": [{"capacity": 500, "unit_cost": 0}],
//     "transport_cost": {"A": 0.0},
//     "production_limits": [{"lower": 500, "upper": 500}, ..T..],
//     "periods": T,
//     "elasticity": {"A": {"steps": 20, "width": 25, "decrement": 0.2}} }   (optional)
//
// `wholesale_price` and `production_limits` may hold a single entry, which is
// broadcast to every period. Missing `flex_above_min` and transport costs are 0.
//
// Scenario document:
//   { "probabilities": [...],
//     "spot": [{"market": "A", "step": 0, "period": 0, "scenario": 0,
//               "price": 50.0, "width": 100.0}, ...] }

MarketInstance parse_instance(std::string_view json_text);
MarketInstance load_instance(const std::filesystem::path& path);
std::string instance_to_json(const MarketInstance& instance);

/// Step counts per market come from the instance's elasticity rules when
/// present, otherwise from the largest step index seen in `spot`.
ScenarioSet parse_scenarios(std::string_view json_text, const MarketInstance& instance);
ScenarioSet load_scenarios(const std::filesystem::path& path, const MarketInstance& instance);
std::string scenarios_to_json(const ScenarioSet& scenarios, const MarketInstance& instance);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace portalloc
