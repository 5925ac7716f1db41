// SPDX-License-Identifier: Apache-2.0
#include "sar/scenario.hpp"

#include "sar/error.hpp"

namespace sar {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ValidationError, what); }

const json& polygon_geometry(const json& j) {
  if (!j.is_object()) invalid("GeoJSON must be an object");
  const auto type = j.value("type", std::string());
  if (type == "Polygon") return j;
  if (type == "Feature") return polygon_geometry(j.at("geometry"));
  if (type == "FeatureCollection") {
    const auto& features = j.at("features");
    if (!features.is_array() || features.empty()) invalid("FeatureCollection has no features");
    return polygon_geometry(features.front());
  }
  invalid("expected a GeoJSON Polygon, Feature or FeatureCollection, got '" + type + "'");
}

}  // namespace

std::vector<GeoPoint> polygon_from_geojson(const json& j) {
  try {
    const auto& geom = polygon_geometry(j);
    const auto& rings = geom.at("coordinates");
    if (!rings.is_array() || rings.empty() || !rings.front().is_array()) invalid("polygon has no outer ring");
    std::vector<GeoPoint> pts;
    for (const auto& pos : rings.front()) {
      if (!pos.is_array() || pos.size() < 2) invalid("position must be [lon, lat]");
      pts.push_back({pos[1].get<double>(), pos[0].get<double>(), 0.0});
    }
    if (pts.size() >= 2 && pts.front() == pts.back()) pts.pop_back();
    if (pts.size() < 3) invalid("polygon needs at least 3 distinct vertices");
    return pts;
  } catch (const json::exception& e) {
    invalid(std::string("GeoJSON: ") + e.what());
  }
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) invalid("scenario must be a JSON object");
  Scenario s;
  try {
    s.config = j.at("config").get<MissionConfig>();
    if (j.contains("world")) s.world = j["world"].get<std::vector<SimulatedBeacon>>();
    if (j.contains("users")) {
      s.users = j["users"].get<UserUrlDirectory>();
    } else {
      for (const auto& b : s.world) {
        if (!b.user_code.empty()) s.users.emplace(b.user_code, b.url);
      }
    }
    if (j.contains("weather")) {
      s.weather.wind_mps = j["weather"].at("wind_mps").get<double>();
      s.weather.precipitation_probability = j["weather"].at("precipitation_probability").get<double>();
    }
  } catch (const json::exception& e) {
    invalid(std::string("scenario: ") + e.what());
  }
  validate(s.config);
  for (const auto& b : s.world) {
    try {
      validate(b);
    } catch (const Error& e) {
      invalid(std::string("world beacon: ") + e.what());
    }
  }
  return s;
}

SimulationOutcome run_scenario(const Scenario& s, std::size_t max_ticks) {
  StubWeatherProvider weather(s.weather);
  SimulationOutcome out;
  out.record = start_mission("sim", s.config, s.users, weather);
  if (out.record.phase == MissionPhase::Planning) {
    launch(out.record);
    advance(out.record, s.world, max_ticks);
  }
  out.result = mission_result(out.record);
  for (const auto& u : out.result.users) {
    if (!u.first) continue;
    for (const auto& b : s.world) {
      if (b.user_code == u.user_code) {
        GeoPoint truth = b.position;
        GeoPoint seen = u.first->position;
        out.location_errors.push_back({u.user_code, haversine_distance(seen, truth)});
        break;
      }
    }
  }
  return out;
}

json to_json(const SimulationOutcome& o) {
  json j;
  j["result"] = o.result;
  j["found"] = json::array();
  for (const auto& u : o.result.users) {
    if (u.found) j["found"].push_back(u.user_code);
  }
  j["location_errors_m"] = json::object();
  for (const auto& e : o.location_errors) j["location_errors_m"][e.user_code] = e.error_m;
  j["ticks"] = o.record.ticks;
  j["events"] = o.record.events.size();
  return j;
}

}  // namespace sar
