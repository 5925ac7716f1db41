// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sar/beacon.hpp"
#include "sar/detection.hpp"
#include "sar/geodesy.hpp"
#include "sar/random.hpp"
#include "sar/routing.hpp"

namespace sar {

// ---------------------------------------------------------------- weather

struct WeatherReport {
  double wind_mps = 0.0;
  double precipitation_probability = 0.0;  // in [0, 1]
};

class WeatherProvider {
 public:
  virtual ~WeatherProvider() = default;
  /// Throws on any transport or format failure.
  virtual WeatherReport query(const GeoPoint& where) = 0;
};

/// Fixed answer, or a failure when constructed without one.
class StubWeatherProvider final : public WeatherProvider {
 public:
  StubWeatherProvider() = default;
  explicit StubWeatherProvider(WeatherReport report) : report_(report) {}

  /// Fixture object: {"wind_mps": .., "precipitation_probability": ..}.
  static StubWeatherProvider from_json(const nlohmann::json& fixture);

  WeatherReport query(const GeoPoint& where) override;
  std::size_t calls() const noexcept { return calls_; }

 private:
  std::optional<WeatherReport> report_;
  std::size_t calls_ = 0;
};

/// JSON forecast endpoint reached over HTTP(S). `{lat}` and `{lon}` in the
/// path template are substituted; the two values are read with JSON pointers.
struct HttpWeatherOptions {
  std::string base_url;  // e.g. "https://api.example.org"
  std::string path_template = "/forecast?lat={lat}&lon={lon}";
  std::string wind_pointer = "/wind_mps";
  std::string precipitation_pointer = "/precipitation_probability";
  /// Multiplies the precipitation value; 0.01 for endpoints that report percent.
  double precipitation_scale = 1.0;
  int timeout_s = 5;
};

class HttpWeatherProvider final : public WeatherProvider {
 public:
  explicit HttpWeatherProvider(HttpWeatherOptions options) : options_(std::move(options)) {}
  WeatherReport query(const GeoPoint& where) override;

  /// Extracts a report from a response body; exposed for tests.
  static WeatherReport parse(const nlohmann::json& body, const HttpWeatherOptions& options);

 private:
  HttpWeatherOptions options_;
};

struct WeatherThresholds {
  double wind_mps = 10.0;                  // no-go at or above
  double precipitation_probability = 0.5;  // no-go at or above
};

struct WeatherDecision {
  bool go = false;
  std::string reason;  // "rain", "wind", "clear", or "override: <cause>"
  std::optional<WeatherReport> report;
};

/// Rain is checked before wind. With override set the decision is always
/// go, even if the provider fails. Without it a provider failure throws
/// WeatherUnavailable.
WeatherDecision check_weather(const GeoPoint& area_centroid, WeatherProvider& provider, bool override_weather,
                              const WeatherThresholds& thresholds = {});

// ---------------------------------------------------------------- phases

enum class MissionPhase { Created, WeatherCheck, CancelledWeather, Planning, Flying, Completed, Aborted };

inline constexpr std::array<MissionPhase, 7> kAllPhases = {
    MissionPhase::Created,  MissionPhase::WeatherCheck, MissionPhase::CancelledWeather, MissionPhase::Planning,
    MissionPhase::Flying,   MissionPhase::Completed,    MissionPhase::Aborted,
};

std::string_view to_string(MissionPhase phase);
MissionPhase phase_from_string(std::string_view name);
bool transition_allowed(MissionPhase from, MissionPhase to) noexcept;
bool is_terminal(MissionPhase phase) noexcept;

// ---------------------------------------------------------------- config

inline constexpr double kDefaultEnduranceS = 30.0 * 60.0;
inline constexpr double kDefaultTickS = 1.0;
inline constexpr int kPhotosPerDetection = 3;

struct MissionConfig {
  std::vector<std::string> searched_user_codes;
  std::vector<GeoPoint> polygon;
  std::size_t n_drones = 1;
  double altitude_m = 30.0;
  double spacing_m = 50.0;
  GeoPoint base{};
  double speed_mps = 5.0;
  bool weather_override = false;
  std::uint64_t seed = 0;
  bool return_to_base = false;
  double endurance_s = kDefaultEnduranceS;
  double tick_s = kDefaultTickS;
  WeatherThresholds weather{};
};

/// Throws ValidationError describing the first offending field.
void validate(const MissionConfig& config);

// ---------------------------------------------------------------- records

struct DroneState {
  int drone_id = 0;
  GeoPoint position{};
  std::size_t leg = 0;        // index of the waypoint the drone last passed
  double leg_fraction = 0.0;  // progress along leg [leg, leg+1]
  double elapsed_s = 0.0;
  double distance_flown_m = 0.0;
  bool done = false;       // reached the end of its route
  bool exhausted = false;  // endurance ran out first
};

struct DetectionEvent {
  int drone_id = 0;
  std::string user_code;  // empty when the URL matched no searched user
  std::string url;
  GeoPoint position{};  // drone position at detection
  double t_s = 0.0;
  bool verified = false;
};

struct PhotoEvent {
  int drone_id = 0;
  std::string user_code;
  std::string uri;
  GeoPoint position{};
  double t_s = 0.0;
};

enum class EventKind { Phase, Sync, Telemetry, Detection, Photo };
std::string_view to_string(EventKind kind);

/// Entry of the mission feed. seq starts at 1 and is the poll cursor.
struct MissionEvent {
  std::uint64_t seq = 0;
  double t_s = 0.0;
  int drone_id = -1;  // -1 for mission-level events
  EventKind kind = EventKind::Phase;
  nlohmann::json data;
};

struct MissionRecord {
  std::string id;
  MissionConfig config;
  MissionPhase phase = MissionPhase::Created;
  std::string cancel_reason;
  std::optional<WeatherDecision> weather;
  /// Beacon URL of each searched user, fixed when the mission starts.
  std::map<std::string, std::string> searched_urls;  // url -> user code
  std::vector<Route> routes;
  std::size_t grid_points = 0;
  std::vector<DroneState> drones;
  std::vector<DetectionEvent> detections;
  std::vector<PhotoEvent> photos;
  std::vector<MissionEvent> events;
  double sim_time_s = 0.0;
  std::uint64_t ticks = 0;

  std::uint64_t last_seq() const noexcept { return events.empty() ? 0 : events.back().seq; }
  /// Events with seq > since, in log order.
  std::vector<MissionEvent> events_since(std::uint64_t since) const;
};

/// Moves the record along an allowed edge and logs a phase event. Throws
/// InvalidPhase otherwise.
void transition(MissionRecord& record, MissionPhase to);

/// code -> beacon URL for every registered user.
using UserUrlDirectory = std::map<std::string, std::string>;

MissionRecord create_mission(std::string id, MissionConfig config);

/// Weather gate, then route planning. Ends in Planning (routes attached) or
/// CancelledWeather. Throws UnknownUser, WeatherUnavailable, InvalidPhase,
/// or planning errors.
void start_mission(MissionRecord& record, const UserUrlDirectory& users, WeatherProvider& weather);

/// Convenience wrapper creating the record first.
MissionRecord start_mission(std::string id, const MissionConfig& config, const UserUrlDirectory& users,
                            WeatherProvider& weather);

/// Planning -> Flying; puts every drone at the start of its route.
void launch(MissionRecord& record);

/// One simulation step of dt_s seconds. Returns the events it appended.
std::vector<MissionEvent> tick(MissionRecord& record, std::span<const SimulatedBeacon> world, double dt_s, Rng& rng,
                               const DetectionModel& model = {});

/// Ticks with the configured tick length until the mission leaves Flying
/// or max_ticks have run. The generator for tick i is derived from the
/// config seed and i, so resuming after a reload continues the same stream.
std::size_t advance(MissionRecord& record, std::span<const SimulatedBeacon> world, std::size_t max_ticks,
                    const DetectionModel& model = {});

/// Generator used for the given tick of a mission.
Rng tick_rng(std::uint64_t seed, std::uint64_t tick_index);

struct FirstDetection {
  int drone_id = 0;
  GeoPoint position{};
  double t_s = 0.0;
};

struct UserResult {
  std::string user_code;
  bool found = false;
  std::optional<FirstDetection> first;
  std::vector<PhotoEvent> photos;
};

struct DroneResult {
  int drone_id = 0;
  double route_length_m = 0.0;
  double distance_flown_m = 0.0;
  double flight_minutes = 0.0;
  bool completed_route = false;
};

struct MissionResult {
  std::string id;
  MissionPhase phase = MissionPhase::Created;
  std::string reason;
  std::vector<UserResult> users;
  std::vector<DroneResult> drones;
  double total_route_length_m = 0.0;
  /// Analytic per-drone and cumulative time for the planned length.
  CoverageTime predicted{};
  double simulated_minutes = 0.0;  // longest drone flight
};

/// Throws MissionStillRunning unless the phase is terminal.
MissionResult mission_result(const MissionRecord& record);

// ---------------------------------------------------------------- JSON

void to_json(nlohmann::json& j, const GeoPoint& p);
void from_json(const nlohmann::json& j, GeoPoint& p);
void to_json(nlohmann::json& j, const Route& r);
void from_json(const nlohmann::json& j, Route& r);
void to_json(nlohmann::json& j, const MissionConfig& c);
/// Throws ValidationError on missing or mistyped fields (not on range checks).
void from_json(const nlohmann::json& j, MissionConfig& c);
void to_json(nlohmann::json& j, const SimulatedBeacon& b);
void from_json(const nlohmann::json& j, SimulatedBeacon& b);
void to_json(nlohmann::json& j, const MissionEvent& e);
void from_json(const nlohmann::json& j, MissionEvent& e);
void to_json(nlohmann::json& j, const MissionRecord& r);
void from_json(const nlohmann::json& j, MissionRecord& r);
void to_json(nlohmann::json& j, const MissionResult& r);

/// Event log as newline-separated compact JSON; used for determinism checks.
std::string serialize_events(std::span<const MissionEvent> events);

}  // namespace sar
