// SPDX-License-Identifier: Apache-2.0
#include "sar/mission.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "sar/error.hpp"

namespace sar {

using nlohmann::json;

// ---------------------------------------------------------------- weather

StubWeatherProvider StubWeatherProvider::from_json(const json& fixture) {
  if (fixture.is_null() || (fixture.is_object() && fixture.value("unavailable", false))) return {};
  WeatherReport r;
  r.wind_mps = fixture.at("wind_mps").get<double>();
  r.precipitation_probability = fixture.at("precipitation_probability").get<double>();
  return StubWeatherProvider(r);
}

WeatherReport StubWeatherProvider::query(const GeoPoint&) {
  ++calls_;
  if (!report_) throw Error(ErrorCode::WeatherUnavailable, "stub provider has no report");
  return *report_;
}

WeatherDecision check_weather(const GeoPoint& area_centroid, WeatherProvider& provider, bool override_weather,
                              const WeatherThresholds& thresholds) {
  WeatherDecision d;
  try {
    d.report = provider.query(area_centroid);
  } catch (const std::exception& e) {
    if (!override_weather) throw Error(ErrorCode::WeatherUnavailable, e.what());
    d.go = true;
    d.reason = "override: weather unavailable";
    return d;
  }
  std::string cause = "clear";
  if (d.report->precipitation_probability >= thresholds.precipitation_probability) {
    cause = "rain";
  } else if (d.report->wind_mps >= thresholds.wind_mps) {
    cause = "wind";
  }
  if (cause == "clear") {
    d.go = true;
    d.reason = cause;
  } else if (override_weather) {
    d.go = true;
    d.reason = "override: " + cause;
  } else {
    d.go = false;
    d.reason = cause;
  }
  return d;
}

// ---------------------------------------------------------------- phases

std::string_view to_string(MissionPhase phase) {
  switch (phase) {
    case MissionPhase::Created: return "Created";
    case MissionPhase::WeatherCheck: return "WeatherCheck";
    case MissionPhase::CancelledWeather: return "CancelledWeather";
    case MissionPhase::Planning: return "Planning";
    case MissionPhase::Flying: return "Flying";
    case MissionPhase::Completed: return "Completed";
    case MissionPhase::Aborted: return "Aborted";
  }
  return "?";
}

MissionPhase phase_from_string(std::string_view name) {
  for (auto p : kAllPhases) {
    if (to_string(p) == name) return p;
  }
  throw Error(ErrorCode::ValidationError, "unknown phase '" + std::string(name) + "'");
}

bool transition_allowed(MissionPhase from, MissionPhase to) noexcept {
  using P = MissionPhase;
  switch (from) {
    case P::Created: return to == P::WeatherCheck;
    case P::WeatherCheck: return to == P::CancelledWeather || to == P::Planning;
    case P::Planning: return to == P::Flying;
    case P::Flying: return to == P::Completed || to == P::Aborted;
    case P::CancelledWeather:
    case P::Completed:
    case P::Aborted: return false;
  }
  return false;
}

bool is_terminal(MissionPhase phase) noexcept {
  return phase == MissionPhase::CancelledWeather || phase == MissionPhase::Completed ||
         phase == MissionPhase::Aborted;
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Phase: return "phase";
    case EventKind::Sync: return "sync";
    case EventKind::Telemetry: return "telemetry";
    case EventKind::Detection: return "detection";
    case EventKind::Photo: return "photo";
  }
  return "?";
}

namespace {

EventKind event_kind_from_string(std::string_view s) {
  for (auto k : {EventKind::Phase, EventKind::Sync, EventKind::Telemetry, EventKind::Detection, EventKind::Photo}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::ValidationError, "unknown event kind '" + std::string(s) + "'");
}

MissionEvent& log_event(MissionRecord& r, int drone_id, EventKind kind, json data) {
  MissionEvent e;
  e.seq = r.last_seq() + 1;
  e.t_s = r.sim_time_s;
  e.drone_id = drone_id;
  e.kind = kind;
  e.data = std::move(data);
  r.events.push_back(std::move(e));
  return r.events.back();
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ValidationError, what); }

}  // namespace

void transition(MissionRecord& record, MissionPhase to) {
  if (!transition_allowed(record.phase, to)) {
    throw Error(ErrorCode::InvalidPhase, "cannot move from " + std::string(to_string(record.phase)) + " to " +
                                             std::string(to_string(to)));
  }
  const auto from = record.phase;
  record.phase = to;
  log_event(record, -1, EventKind::Phase, {{"from", to_string(from)}, {"to", to_string(to)}});
}

// ---------------------------------------------------------------- config

void validate(const MissionConfig& c) {
  if (c.searched_user_codes.empty()) invalid("searched_user_codes must not be empty");
  std::set<std::string> seen;
  for (const auto& code : c.searched_user_codes) {
    if (code.empty()) invalid("searched user code is empty");
    if (!seen.insert(code).second) invalid("searched user code '" + code + "' listed twice");
  }
  try {
    SearchPolygon poly(c.polygon);
  } catch (const Error& e) {
    invalid(std::string("polygon: ") + e.what());
  }
  if (c.n_drones < 1) invalid("n_drones must be >= 1");
  if (!(c.altitude_m > 0.0)) invalid("altitude_m must be > 0");
  if (!(c.spacing_m > 0.0)) invalid("spacing_m must be > 0");
  if (!(c.speed_mps > 0.0)) invalid("speed_mps must be > 0");
  if (!is_valid(c.base)) invalid("base is not a valid coordinate");
  if (!(c.endurance_s > 0.0)) invalid("endurance_s must be > 0");
  if (!(c.tick_s > 0.0)) invalid("tick_s must be > 0");
  if (!(c.weather.wind_mps > 0.0)) invalid("wind threshold must be > 0");
  if (!(c.weather.precipitation_probability > 0.0 && c.weather.precipitation_probability <= 1.0)) {
    invalid("precipitation threshold must be in (0, 1]");
  }
}

// ---------------------------------------------------------------- lifecycle

std::vector<MissionEvent> MissionRecord::events_since(std::uint64_t since) const {
  auto it = std::upper_bound(events.begin(), events.end(), since,
                             [](std::uint64_t s, const MissionEvent& e) { return s < e.seq; });
  return {it, events.end()};
}

MissionRecord create_mission(std::string id, MissionConfig config) {
  validate(config);
  MissionRecord r;
  r.id = std::move(id);
  r.config = std::move(config);
  return r;
}

void start_mission(MissionRecord& record, const UserUrlDirectory& users, WeatherProvider& weather) {
  if (record.phase != MissionPhase::Created) {
    throw Error(ErrorCode::InvalidPhase, "mission already started (" + std::string(to_string(record.phase)) + ")");
  }
  const auto& cfg = record.config;
  validate(cfg);
  std::map<std::string, std::string> searched;
  for (const auto& code : cfg.searched_user_codes) {
    auto it = users.find(code);
    if (it == users.end()) throw Error(ErrorCode::UnknownUser, "user '" + code + "' is not registered");
    searched[it->second] = code;
  }

  const SearchPolygon poly(cfg.polygon);
  // Nothing is written to the record until both the weather query and the
  // planner have succeeded, so a failed start can be retried.
  auto decision = check_weather(poly.centroid(), weather, cfg.weather_override, cfg.weather);
  std::optional<MissionPlan> plan;
  if (decision.go) {
    MissionPlanRequest req;
    req.spacing_m = cfg.spacing_m;
    req.n_drones = cfg.n_drones;
    req.base = cfg.base;
    req.seed = cfg.seed;
    req.altitude_m = cfg.altitude_m;
    req.return_to_base = cfg.return_to_base;
    plan = plan_mission_routes(poly, req);
  }

  transition(record, MissionPhase::WeatherCheck);
  record.weather = decision;
  json wx = {{"go", decision.go}, {"reason", decision.reason}};
  if (decision.report) {
    wx["wind_mps"] = decision.report->wind_mps;
    wx["precipitation_probability"] = decision.report->precipitation_probability;
  }
  log_event(record, -1, EventKind::Sync, {{"weather", wx}});
  if (!decision.go) {
    record.cancel_reason = decision.reason;
    transition(record, MissionPhase::CancelledWeather);
    return;
  }
  record.searched_urls = std::move(searched);
  log_event(record, -1, EventKind::Sync, {{"searched_users", record.searched_urls.size()}});
  record.grid_points = plan->grid.points.size();
  record.routes = std::move(plan->routes);
  transition(record, MissionPhase::Planning);
}

MissionRecord start_mission(std::string id, const MissionConfig& config, const UserUrlDirectory& users,
                            WeatherProvider& weather) {
  auto record = create_mission(std::move(id), config);
  start_mission(record, users, weather);
  return record;
}

void launch(MissionRecord& record) {
  if (record.phase != MissionPhase::Planning) {
    throw Error(ErrorCode::InvalidPhase, "launch requires Planning, mission is " +
                                             std::string(to_string(record.phase)));
  }
  if (record.routes.empty()) throw Error(ErrorCode::InvalidPhase, "mission has no routes");
  record.drones.clear();
  for (const auto& route : record.routes) {
    if (route.waypoints.empty() || route.leg_lengths_m.size() + 1 != route.waypoints.size()) {
      throw Error(ErrorCode::InvalidArgument, "route of drone " + std::to_string(route.drone_id) + " is malformed");
    }
    DroneState d;
    d.drone_id = route.drone_id;
    d.position = route.waypoints.front();
    d.position.alt_m = record.config.altitude_m;
    d.done = route.waypoints.size() == 1;
    record.drones.push_back(d);
  }
  transition(record, MissionPhase::Flying);
}

namespace {

GeoPoint position_on(const Route& route, std::size_t leg, double fraction, double altitude) {
  GeoPoint p;
  if (leg + 1 >= route.waypoints.size()) {
    p = route.waypoints.back();
  } else {
    const auto& a = route.waypoints[leg];
    const auto& b = route.waypoints[leg + 1];
    p.lat = a.lat + (b.lat - a.lat) * fraction;
    p.lon = a.lon + (b.lon - a.lon) * fraction;
  }
  p.alt_m = altitude;
  return p;
}

void fly(DroneState& d, const Route& route, double speed, double dt, double endurance, double altitude) {
  if (d.done || d.exhausted) return;
  const double usable_s = std::min(dt, endurance - d.elapsed_s);
  double budget = speed * usable_s;
  const double planned = budget;
  const std::size_t legs = route.leg_lengths_m.size();
  while (d.leg < legs) {
    const double len = route.leg_lengths_m[d.leg];
    const double remaining = len * (1.0 - d.leg_fraction);
    if (budget >= remaining) {
      budget -= remaining;
      d.distance_flown_m += remaining;
      ++d.leg;
      d.leg_fraction = 0.0;
    } else {
      d.leg_fraction += budget / len;
      d.distance_flown_m += budget;
      budget = 0.0;
      break;
    }
  }
  d.elapsed_s += (planned - budget) / speed;
  d.position = position_on(route, d.leg, d.leg_fraction, altitude);
  if (d.leg >= legs) {
    d.done = true;
  } else if (d.elapsed_s >= endurance - 1e-9) {
    d.exhausted = true;
  }
}

bool already_reported(const MissionRecord& r, int drone_id, const std::string& url) {
  return std::any_of(r.detections.begin(), r.detections.end(),
                     [&](const DetectionEvent& e) { return e.drone_id == drone_id && e.url == url; });
}

}  // namespace

std::vector<MissionEvent> tick(MissionRecord& record, std::span<const SimulatedBeacon> world, double dt_s, Rng& rng,
                               const DetectionModel& model) {
  if (record.phase != MissionPhase::Flying) {
    throw Error(ErrorCode::InvalidPhase, "tick requires Flying, mission is " + std::string(to_string(record.phase)));
  }
  if (!(dt_s > 0.0)) throw Error(ErrorCode::DomainError, "dt must be > 0");
  const auto first_new = record.events.size();
  const std::uint64_t tick_stream = rng.next();
  record.sim_time_s += dt_s;
  ++record.ticks;

  for (std::size_t i = 0; i < record.drones.size(); ++i) {
    auto& drone = record.drones[i];
    const auto& route = record.routes[i];
    if (drone.done || drone.exhausted) continue;
    fly(drone, route, record.config.speed_mps, dt_s, record.config.endurance_s, record.config.altitude_m);
    log_event(record, drone.drone_id, EventKind::Telemetry,
              {{"lat", drone.position.lat},
               {"lon", drone.position.lon},
               {"alt_m", drone.position.alt_m},
               {"distance_flown_m", drone.distance_flown_m},
               {"elapsed_s", drone.elapsed_s}});

    Rng drone_rng(Rng::mix(tick_stream + static_cast<std::uint64_t>(drone.drone_id)));
    for (const auto& beacon : world) {
      if (!beacon.battery_ok) continue;
      if (!simulate_scan(model, drone.position, beacon, drone_rng)) continue;
      // What the drone hears is the decoded frame, not the beacon's identity.
      std::string url;
      try {
        url = decode_frame(encode_url(beacon.url, beacon.tx_power_dbm).bytes()).url;
      } catch (const Error&) {
        continue;
      }
      if (already_reported(record, drone.drone_id, url)) continue;
      DetectionEvent det;
      det.drone_id = drone.drone_id;
      det.url = url;
      det.position = drone.position;
      det.t_s = record.sim_time_s;
      if (auto it = record.searched_urls.find(url); it != record.searched_urls.end()) {
        det.user_code = it->second;
        det.verified = true;
      }
      record.detections.push_back(det);
      log_event(record, drone.drone_id, EventKind::Detection,
                {{"user_code", det.user_code},
                 {"url", det.url},
                 {"lat", det.position.lat},
                 {"lon", det.position.lon},
                 {"alt_m", det.position.alt_m},
                 {"verified", det.verified}});
      if (!det.verified) continue;
      for (int k = 0; k < kPhotosPerDetection; ++k) {
        PhotoEvent ph;
        ph.drone_id = drone.drone_id;
        ph.user_code = det.user_code;
        ph.uri = "photo://" + record.id + "/" + std::to_string(drone.drone_id) + "/" + det.user_code + "/" +
                 std::to_string(record.photos.size());
        ph.position = drone.position;
        ph.t_s = record.sim_time_s;
        record.photos.push_back(ph);
        log_event(record, drone.drone_id, EventKind::Photo,
                  {{"user_code", ph.user_code}, {"uri", ph.uri}, {"lat", ph.position.lat}, {"lon", ph.position.lon}});
      }
    }
  }

  const bool all_stopped =
      std::all_of(record.drones.begin(), record.drones.end(), [](const DroneState& d) { return d.done || d.exhausted; });
  if (all_stopped) {
    const bool any_exhausted =
        std::any_of(record.drones.begin(), record.drones.end(), [](const DroneState& d) { return d.exhausted; });
    if (any_exhausted) record.cancel_reason = "endurance exhausted before the route was finished";
    transition(record, any_exhausted ? MissionPhase::Aborted : MissionPhase::Completed);
  }
  return {record.events.begin() + static_cast<std::ptrdiff_t>(first_new), record.events.end()};
}

Rng tick_rng(std::uint64_t seed, std::uint64_t tick_index) {
  return Rng(Rng::mix(seed ^ Rng::mix(tick_index + 1)));
}

std::size_t advance(MissionRecord& record, std::span<const SimulatedBeacon> world, std::size_t max_ticks,
                    const DetectionModel& model) {
  std::size_t n = 0;
  while (n < max_ticks && record.phase == MissionPhase::Flying) {
    auto rng = tick_rng(record.config.seed, record.ticks);
    tick(record, world, record.config.tick_s, rng, model);
    ++n;
  }
  return n;
}

MissionResult mission_result(const MissionRecord& record) {
  if (!is_terminal(record.phase)) {
    throw Error(ErrorCode::MissionStillRunning, "mission is " + std::string(to_string(record.phase)));
  }
  MissionResult res;
  res.id = record.id;
  res.phase = record.phase;
  res.reason = record.cancel_reason;
  if (record.phase == MissionPhase::CancelledWeather) return res;

  for (const auto& code : record.config.searched_user_codes) {
    UserResult u;
    u.user_code = code;
    for (const auto& d : record.detections) {
      if (!d.verified || d.user_code != code) continue;
      if (!u.first || d.t_s < u.first->t_s) u.first = FirstDetection{d.drone_id, d.position, d.t_s};
    }
    u.found = u.first.has_value();
    for (const auto& p : record.photos) {
      if (p.user_code == code) u.photos.push_back(p);
    }
    res.users.push_back(std::move(u));
  }
  for (std::size_t i = 0; i < record.drones.size(); ++i) {
    const auto& d = record.drones[i];
    DroneResult dr;
    dr.drone_id = d.drone_id;
    dr.route_length_m = record.routes[i].total_length_m;
    dr.distance_flown_m = d.distance_flown_m;
    dr.flight_minutes = d.elapsed_s / 60.0;
    dr.completed_route = d.done;
    res.total_route_length_m += dr.route_length_m;
    res.simulated_minutes = std::max(res.simulated_minutes, dr.flight_minutes);
    res.drones.push_back(dr);
  }
  if (!res.drones.empty()) {
    res.predicted =
        coverage_time(res.total_route_length_m, record.config.speed_mps, static_cast<int>(res.drones.size()));
  }
  return res;
}

// ---------------------------------------------------------------- JSON

void to_json(json& j, const GeoPoint& p) { j = json{{"lat", p.lat}, {"lon", p.lon}, {"alt_m", p.alt_m}}; }

void from_json(const json& j, GeoPoint& p) {
  p.lat = j.at("lat").get<double>();
  p.lon = j.at("lon").get<double>();
  p.alt_m = j.value("alt_m", 0.0);
}

void to_json(json& j, const Route& r) {
  j = json{{"drone_id", r.drone_id},
           {"altitude_m", r.altitude_m},
           {"total_length_m", r.total_length_m},
           {"waypoints", r.waypoints},
           {"leg_lengths_m", r.leg_lengths_m}};
}

void from_json(const json& j, Route& r) {
  r.drone_id = j.at("drone_id").get<int>();
  r.altitude_m = j.at("altitude_m").get<double>();
  r.total_length_m = j.at("total_length_m").get<double>();
  r.waypoints = j.at("waypoints").get<std::vector<GeoPoint>>();
  r.leg_lengths_m = j.at("leg_lengths_m").get<std::vector<double>>();
}

void to_json(json& j, const MissionConfig& c) {
  j = json{{"searched_user_codes", c.searched_user_codes},
           {"polygon", c.polygon},
           {"n_drones", c.n_drones},
           {"altitude_m", c.altitude_m},
           {"spacing_m", c.spacing_m},
           {"base", c.base},
           {"speed_mps", c.speed_mps},
           {"weather_override", c.weather_override},
           {"seed", c.seed},
           {"return_to_base", c.return_to_base},
           {"endurance_s", c.endurance_s},
           {"tick_s", c.tick_s},
           {"wind_threshold_mps", c.weather.wind_mps},
           {"precipitation_threshold", c.weather.precipitation_probability}};
}

void from_json(const json& j, MissionConfig& c) {
  try {
    if (!j.is_object()) invalid("mission config must be a JSON object");
    MissionConfig out;
    out.searched_user_codes = j.at("searched_user_codes").get<std::vector<std::string>>();
    out.polygon = j.at("polygon").get<std::vector<GeoPoint>>();
    out.n_drones = j.at("n_drones").get<std::size_t>();
    out.altitude_m = j.at("altitude_m").get<double>();
    out.base = j.at("base").get<GeoPoint>();
    out.spacing_m = j.value("spacing_m", out.spacing_m);
    out.speed_mps = j.value("speed_mps", out.speed_mps);
    out.weather_override = j.value("weather_override", out.weather_override);
    out.seed = j.value("seed", out.seed);
    out.return_to_base = j.value("return_to_base", out.return_to_base);
    out.endurance_s = j.value("endurance_s", out.endurance_s);
    out.tick_s = j.value("tick_s", out.tick_s);
    out.weather.wind_mps = j.value("wind_threshold_mps", out.weather.wind_mps);
    out.weather.precipitation_probability = j.value("precipitation_threshold", out.weather.precipitation_probability);
    c = std::move(out);
  } catch (const json::exception& e) {
    invalid(std::string("mission config: ") + e.what());
  }
}

void to_json(json& j, const SimulatedBeacon& b) {
  j = json{{"user_code", b.user_code},
           {"position", b.position},
           {"url", b.url},
           {"advertising_interval_ms", b.advertising_interval_ms},
           {"tx_power_dbm", b.tx_power_dbm},
           {"battery_ok", b.battery_ok}};
}

void from_json(const json& j, SimulatedBeacon& b) {
  try {
    SimulatedBeacon out;
    out.user_code = j.value("user_code", std::string());
    out.position = j.at("position").get<GeoPoint>();
    out.url = j.at("url").get<std::string>();
    out.advertising_interval_ms = j.value("advertising_interval_ms", out.advertising_interval_ms);
    out.tx_power_dbm = j.value("tx_power_dbm", out.tx_power_dbm);
    out.battery_ok = j.value("battery_ok", out.battery_ok);
    b = std::move(out);
  } catch (const json::exception& e) {
    invalid(std::string("beacon: ") + e.what());
  }
}

void to_json(json& j, const MissionEvent& e) {
  j = json{{"seq", e.seq}, {"t_s", e.t_s}, {"drone_id", e.drone_id}, {"kind", to_string(e.kind)}, {"data", e.data}};
}

void from_json(const json& j, MissionEvent& e) {
  e.seq = j.at("seq").get<std::uint64_t>();
  e.t_s = j.at("t_s").get<double>();
  e.drone_id = j.at("drone_id").get<int>();
  e.kind = event_kind_from_string(j.at("kind").get<std::string>());
  e.data = j.at("data");
}

namespace {

json drone_json(const DroneState& d) {
  return {{"drone_id", d.drone_id}, {"position", d.position},       {"leg", d.leg},
          {"leg_fraction", d.leg_fraction}, {"elapsed_s", d.elapsed_s}, {"distance_flown_m", d.distance_flown_m},
          {"done", d.done},         {"exhausted", d.exhausted}};
}

DroneState drone_from(const json& j) {
  DroneState d;
  d.drone_id = j.at("drone_id").get<int>();
  d.position = j.at("position").get<GeoPoint>();
  d.leg = j.at("leg").get<std::size_t>();
  d.leg_fraction = j.at("leg_fraction").get<double>();
  d.elapsed_s = j.at("elapsed_s").get<double>();
  d.distance_flown_m = j.at("distance_flown_m").get<double>();
  d.done = j.at("done").get<bool>();
  d.exhausted = j.at("exhausted").get<bool>();
  return d;
}

json detection_json(const DetectionEvent& d) {
  return {{"drone_id", d.drone_id}, {"user_code", d.user_code}, {"url", d.url},
          {"position", d.position}, {"t_s", d.t_s},             {"verified", d.verified}};
}

DetectionEvent detection_from(const json& j) {
  DetectionEvent d;
  d.drone_id = j.at("drone_id").get<int>();
  d.user_code = j.at("user_code").get<std::string>();
  d.url = j.at("url").get<std::string>();
  d.position = j.at("position").get<GeoPoint>();
  d.t_s = j.at("t_s").get<double>();
  d.verified = j.at("verified").get<bool>();
  return d;
}

json photo_json(const PhotoEvent& p) {
  return {{"drone_id", p.drone_id}, {"user_code", p.user_code}, {"uri", p.uri}, {"position", p.position}, {"t_s", p.t_s}};
}

PhotoEvent photo_from(const json& j) {
  PhotoEvent p;
  p.drone_id = j.at("drone_id").get<int>();
  p.user_code = j.at("user_code").get<std::string>();
  p.uri = j.at("uri").get<std::string>();
  p.position = j.at("position").get<GeoPoint>();
  p.t_s = j.at("t_s").get<double>();
  return p;
}

}  // namespace

void to_json(json& j, const MissionRecord& r) {
  j = json::object();
  j["id"] = r.id;
  j["config"] = r.config;
  j["phase"] = to_string(r.phase);
  j["cancel_reason"] = r.cancel_reason;
  if (r.weather) {
    json w = {{"go", r.weather->go}, {"reason", r.weather->reason}};
    if (r.weather->report) {
      w["wind_mps"] = r.weather->report->wind_mps;
      w["precipitation_probability"] = r.weather->report->precipitation_probability;
    }
    j["weather"] = w;
  }
  j["searched_urls"] = r.searched_urls;
  j["routes"] = r.routes;
  j["grid_points"] = r.grid_points;
  j["drones"] = json::array();
  for (const auto& d : r.drones) j["drones"].push_back(drone_json(d));
  j["detections"] = json::array();
  for (const auto& d : r.detections) j["detections"].push_back(detection_json(d));
  j["photos"] = json::array();
  for (const auto& p : r.photos) j["photos"].push_back(photo_json(p));
  j["events"] = r.events;
  j["sim_time_s"] = r.sim_time_s;
  j["ticks"] = r.ticks;
}

void from_json(const json& j, MissionRecord& r) {
  MissionRecord out;
  out.id = j.at("id").get<std::string>();
  out.config = j.at("config").get<MissionConfig>();
  out.phase = phase_from_string(j.at("phase").get<std::string>());
  out.cancel_reason = j.at("cancel_reason").get<std::string>();
  if (j.contains("weather")) {
    const auto& w = j["weather"];
    WeatherDecision d;
    d.go = w.at("go").get<bool>();
    d.reason = w.at("reason").get<std::string>();
    if (w.contains("wind_mps")) {
      d.report = WeatherReport{w.at("wind_mps").get<double>(), w.at("precipitation_probability").get<double>()};
    }
    out.weather = d;
  }
  out.searched_urls = j.at("searched_urls").get<std::map<std::string, std::string>>();
  out.routes = j.at("routes").get<std::vector<Route>>();
  out.grid_points = j.at("grid_points").get<std::size_t>();
  for (const auto& d : j.at("drones")) out.drones.push_back(drone_from(d));
  for (const auto& d : j.at("detections")) out.detections.push_back(detection_from(d));
  for (const auto& p : j.at("photos")) out.photos.push_back(photo_from(p));
  out.events = j.at("events").get<std::vector<MissionEvent>>();
  out.sim_time_s = j.at("sim_time_s").get<double>();
  out.ticks = j.at("ticks").get<std::uint64_t>();
  for (std::size_t i = 1; i < out.events.size(); ++i) {
    if (out.events[i].seq <= out.events[i - 1].seq) {
      throw Error(ErrorCode::CorruptStore, "event sequence of mission " + out.id + " is not increasing");
    }
  }
  r = std::move(out);
}

void to_json(json& j, const MissionResult& r) {
  j = json::object();
  j["id"] = r.id;
  j["phase"] = to_string(r.phase);
  j["reason"] = r.reason;
  j["users"] = json::array();
  for (const auto& u : r.users) {
    json ju = {{"user_code", u.user_code}, {"found", u.found}, {"photos", json::array()}};
    if (u.first) {
      ju["first_detection"] = {{"drone_id", u.first->drone_id}, {"position", u.first->position}, {"t_s", u.first->t_s}};
    }
    for (const auto& p : u.photos) ju["photos"].push_back(photo_json(p));
    j["users"].push_back(ju);
  }
  j["drones"] = json::array();
  for (const auto& d : r.drones) {
    j["drones"].push_back({{"drone_id", d.drone_id},
                           {"route_length_m", d.route_length_m},
                           {"distance_flown_m", d.distance_flown_m},
                           {"flight_minutes", d.flight_minutes},
                           {"completed_route", d.completed_route}});
  }
  j["total_route_length_m"] = r.total_route_length_m;
  j["predicted_per_drone_minutes"] = r.predicted.per_drone_minutes;
  j["predicted_cumulative_minutes"] = r.predicted.cumulative_minutes;
  j["simulated_minutes"] = r.simulated_minutes;
}

std::string serialize_events(std::span<const MissionEvent> events) {
  std::string out;
  for (const auto& e : events) {
    out += json(e).dump();
    out += '\n';
  }
  return out;
}

}  // namespace sar
