#pragma once

#include <filesystem>
#include <optional>

#include <nlohmann/json.hpp>

#include "drt/radar.hpp"
#include "drt/rate.hpp"

namespace drt {

/// A radar scenario plus an optional communication channel, as read from a
/// JSON config:
///
///   {
///     "gram": [[1, 0], [0, 0.5]],          // or "h_s"; complex as {"re": .., "im": ..}
///     "mean_square_amp": 1.0,
///     "snapshots": 4,
///     "noise_psd": 4.0,
///     "pfa": 1e-5,
///     "power_budget": 1.0,
///     "comm_channel": {"h_c": {"re": [[..]], "im": [[..]]}, "noise_psd": 1.0}
///   }
struct ScenarioConfig {
  RadarScenario radar;
  std::optional<CommChannel> comm;
};

/// Throws ConfigError naming the offending field.
ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Matrix as {"re": [[..]], "im": [[..]]} (or a plain nested array when real).
CMatrix parse_matrix(const nlohmann::json& node, const std::string& field);
nlohmann::json matrix_to_json(const CMatrix& m);
nlohmann::json scenario_to_json(const ScenarioConfig& config);

}  // namespace drt
