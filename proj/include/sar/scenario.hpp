// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sar/mission.hpp"

namespace sar {

/// Outer ring of a GeoJSON Polygon, Feature or FeatureCollection (first
/// feature). Positions are [lon, lat]; a repeated closing vertex is dropped.
/// Throws ValidationError.
std::vector<GeoPoint> polygon_from_geojson(const nlohmann::json& j);

/// A scripted simulation: mission config, ground truth and weather.
///
///   {"config": {...}, "world": [beacon...],
///    "users": {"code": "beacon url", ...},       optional
///    "weather": {"wind_mps": .., "precipitation_probability": ..}}  optional
///
/// Without "users", every world beacon registers its own code and URL.
struct Scenario {
  MissionConfig config;
  std::vector<SimulatedBeacon> world;
  UserUrlDirectory users;
  WeatherReport weather{};
};

/// Throws ValidationError.
Scenario scenario_from_json(const nlohmann::json& j);

struct LocationError {
  std::string user_code;
  double error_m = 0.0;  // first detection vs true beacon position
};

struct SimulationOutcome {
  MissionRecord record;
  MissionResult result;
  std::vector<LocationError> location_errors;
};

SimulationOutcome run_scenario(const Scenario& s, std::size_t max_ticks = 1'000'000);

nlohmann::json to_json(const SimulationOutcome& o);

}  // namespace sar
