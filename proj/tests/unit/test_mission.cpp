// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <set>
#include <thread>

#include "sar/mission.hpp"
#include "support.hpp"

using namespace sar;
using nlohmann::json;
using sar::test::error_of;

namespace {

const GeoPoint kSw{28.45, -16.30, 0};

MissionConfig small_config(std::vector<std::string> users = {"u1"}) {
  const auto rect = SearchPolygon::rectangle(kSw, 300.0, 200.0);
  MissionConfig c;
  c.searched_user_codes = std::move(users);
  c.polygon = rect.vertices();
  c.n_drones = 2;
  c.altitude_m = 10.0;
  c.spacing_m = 50.0;
  c.base = kSw;
  c.seed = 7;
  return c;
}

const UserUrlDirectory kUsers = {{"u1", "https://sos.org/b/aaaa1111"}, {"u2", "https://sos.org/b/bbbb2222"}};

SimulatedBeacon beacon_at(const GeoPoint& p, const std::string& url, const std::string& code = "") {
  SimulatedBeacon b;
  b.user_code = code;
  b.position = {p.lat, p.lon, 0.0};
  b.url = url;
  return b;
}

MissionRecord launched(const MissionConfig& c) {
  StubWeatherProvider clear({2.0, 0.1});
  auto r = start_mission("m-test", c, kUsers, clear);
  REQUIRE(r.phase == MissionPhase::Planning);
  launch(r);
  return r;
}

/// A record flying one straight route north of the base, built without the planner.
MissionRecord straight_line(double length_m, double leg_m, MissionConfig c = small_config()) {
  c.n_drones = 1;
  auto r = create_mission("m-line", c);
  Route route;
  route.altitude_m = c.altitude_m;
  route.waypoints.push_back(c.base);
  for (double d = leg_m; d <= length_m + 1e-9; d += leg_m) {
    route.waypoints.push_back(destination_point(c.base, 0.0, d));
    route.leg_lengths_m.push_back(haversine_distance(route.waypoints[route.waypoints.size() - 2],
                                                     route.waypoints.back()));
    route.total_length_m += route.leg_lengths_m.back();
  }
  r.routes = {route};
  transition(r, MissionPhase::WeatherCheck);
  transition(r, MissionPhase::Planning);
  launch(r);
  return r;
}

}  // namespace

TEST_CASE("phase transition table") {
  using P = MissionPhase;
  const std::set<std::pair<P, P>> allowed = {
      {P::Created, P::WeatherCheck}, {P::WeatherCheck, P::CancelledWeather}, {P::WeatherCheck, P::Planning},
      {P::Planning, P::Flying},      {P::Flying, P::Completed},               {P::Flying, P::Aborted},
  };
  for (auto from : kAllPhases) {
    for (auto to : kAllPhases) {
      CAPTURE(to_string(from));
      CAPTURE(to_string(to));
      const bool expected = allowed.count({from, to}) == 1;
      CHECK(transition_allowed(from, to) == expected);
      MissionRecord r;
      r.phase = from;
      const auto code = error_of([&] { transition(r, to); });
      if (expected) {
        CHECK_FALSE(code.has_value());
        CHECK(r.phase == to);
        REQUIRE(r.events.size() == 1);
        CHECK(r.events[0].kind == EventKind::Phase);
      } else {
        CHECK(code == ErrorCode::InvalidPhase);
        CHECK(r.phase == from);
        CHECK(r.events.empty());
      }
    }
    CHECK(phase_from_string(to_string(from)) == from);
  }
  CHECK(is_terminal(P::CancelledWeather));
  CHECK(is_terminal(P::Completed));
  CHECK(is_terminal(P::Aborted));
  CHECK_FALSE(is_terminal(P::Flying));
  CHECK(error_of([] { (void)phase_from_string("Landing"); }) == ErrorCode::ValidationError);
}

TEST_CASE("weather decision truth table") {
  for (double wind : {0.0, 9.99, 10.0, 25.0}) {
    for (double rain : {0.0, 0.49, 0.5, 0.95}) {
      for (bool override_weather : {false, true}) {
        StubWeatherProvider wx({wind, rain});
        const auto d = check_weather(kSw, wx, override_weather);
        const std::string cause = rain >= 0.5 ? "rain" : (wind >= 10.0 ? "wind" : "clear");
        CAPTURE(wind);
        CAPTURE(rain);
        CAPTURE(override_weather);
        if (cause == "clear") {
          CHECK(d.go);
          CHECK(d.reason == "clear");
        } else if (override_weather) {
          CHECK(d.go);
          CHECK(d.reason == "override: " + cause);
        } else {
          CHECK_FALSE(d.go);
          CHECK(d.reason == cause);
        }
        REQUIRE(d.report.has_value());
        CHECK(d.report->wind_mps == wind);
        CHECK(wx.calls() == 1);
      }
    }
  }
  StubWeatherProvider down;
  CHECK(error_of([&] { (void)check_weather(kSw, down, false); }) == ErrorCode::WeatherUnavailable);
  const auto forced = check_weather(kSw, down, true);
  CHECK(forced.go);
  CHECK(forced.reason == "override: weather unavailable");
  CHECK_FALSE(forced.report.has_value());
}

TEST_CASE("stub provider fixtures") {
  auto ok = StubWeatherProvider::from_json({{"wind_mps", 3.0}, {"precipitation_probability", 0.2}});
  CHECK(ok.query(kSw).wind_mps == 3.0);
  auto down = StubWeatherProvider::from_json({{"unavailable", true}});
  CHECK(error_of([&] { (void)down.query(kSw); }) == ErrorCode::WeatherUnavailable);
  auto null = StubWeatherProvider::from_json(nullptr);
  CHECK(error_of([&] { (void)null.query(kSw); }) == ErrorCode::WeatherUnavailable);
}

TEST_CASE("configuration validation") {
  CHECK_NOTHROW(validate(small_config()));
  auto bad = [](auto mutate) {
    auto c = small_config();
    mutate(c);
    return error_of([&] { validate(c); });
  };
  CHECK(bad([](MissionConfig& c) { c.searched_user_codes.clear(); }) == ErrorCode::ValidationError);
  CHECK(bad([](MissionConfig& c) { c.searched_user_codes = {"a", "a"}; }) == ErrorCode::ValidationError);
  CHECK(bad([](MissionConfig& c) { c.polygon.resize(2); }) == ErrorCode::ValidationError);
  CHECK(bad([](MissionConfig& c) { c.n_drones = 0; }) == ErrorCode::ValidationError);
  CHECK(bad([](MissionConfig& c) { c.altitude_m = 0; }) == ErrorCode::ValidationError);
  CHECK(bad([](MissionConfig& c) { c.spacing_m = -1; }) == ErrorCode::ValidationError);
  CHECK(bad([](MissionConfig& c) { c.speed_mps = 0; }) == ErrorCode::ValidationError);
  CHECK(bad([](MissionConfig& c) { c.base.lat = 95; }) == ErrorCode::ValidationError);
  CHECK(bad([](MissionConfig& c) { c.endurance_s = 0; }) == ErrorCode::ValidationError);
  CHECK(bad([](MissionConfig& c) { c.weather.precipitation_probability = 1.5; }) == ErrorCode::ValidationError);
}

TEST_CASE("start is atomic") {
  auto r = create_mission("m1", small_config({"u1", "nobody"}));
  StubWeatherProvider clear({0, 0});
  CHECK(error_of([&] { start_mission(r, kUsers, clear); }) == ErrorCode::UnknownUser);
  CHECK(r.phase == MissionPhase::Created);
  CHECK(r.events.empty());
  CHECK(clear.calls() == 0);

  auto r2 = create_mission("m2", small_config());
  StubWeatherProvider down;
  CHECK(error_of([&] { start_mission(r2, kUsers, down); }) == ErrorCode::WeatherUnavailable);
  CHECK(r2.phase == MissionPhase::Created);
  CHECK(r2.events.empty());
  CHECK_NOTHROW(start_mission(r2, kUsers, clear));  // retry succeeds
  CHECK(r2.phase == MissionPhase::Planning);
  CHECK(error_of([&] { start_mission(r2, kUsers, clear); }) == ErrorCode::InvalidPhase);

  auto cfg = small_config();
  cfg.spacing_m = 0.05;  // far too many grid points
  auto r3 = create_mission("m3", cfg);
  CHECK(error_of([&] { start_mission(r3, kUsers, clear); }) == ErrorCode::GridTooLarge);
  CHECK(r3.phase == MissionPhase::Created);
  CHECK(r3.events.empty());
}

TEST_CASE("bad weather cancels before any planning") {
  StubWeatherProvider rain({1.0, 0.8});
  auto r = start_mission("m-rain", small_config(), kUsers, rain);
  CHECK(r.phase == MissionPhase::CancelledWeather);
  CHECK(r.cancel_reason == "rain");
  CHECK(r.routes.empty());
  CHECK(r.searched_urls.empty());
  CHECK(error_of([&] { launch(r); }) == ErrorCode::InvalidPhase);
  const auto res = mission_result(r);
  CHECK(res.phase == MissionPhase::CancelledWeather);
  CHECK(res.reason == "rain");
  CHECK(res.users.empty());
  CHECK(res.drones.empty());

  auto cfg = small_config();
  cfg.weather_override = true;
  StubWeatherProvider wind({18.0, 0.0});
  auto forced = start_mission("m-wind", cfg, kUsers, wind);
  CHECK(forced.phase == MissionPhase::Planning);
  CHECK(forced.weather->reason == "override: wind");
}

TEST_CASE("planning produces one route per drone and the searched set") {
  auto r = launched(small_config({"u1", "u2"}));
  CHECK(r.phase == MissionPhase::Flying);
  CHECK(r.routes.size() == 2);
  CHECK(r.drones.size() == 2);
  CHECK(r.grid_points > 0);
  CHECK(r.searched_urls.size() == 2);
  CHECK(r.searched_urls.at("https://sos.org/b/bbbb2222") == "u2");
  CHECK(error_of([&] { (void)mission_result(r); }) == ErrorCode::MissionStillRunning);
}

TEST_CASE("drones fly at the configured speed and finish their routes") {
  auto r = launched(small_config());
  std::vector<double> last(r.drones.size(), 0.0);
  std::size_t guard = 0;
  while (r.phase == MissionPhase::Flying && guard++ < 10'000) {
    auto rng = tick_rng(r.config.seed, r.ticks);
    tick(r, {}, r.config.tick_s, rng);
    for (std::size_t i = 0; i < r.drones.size(); ++i) {
      const double step = r.drones[i].distance_flown_m - last[i];
      CHECK(step >= 0.0);
      CHECK(step <= r.config.speed_mps * r.config.tick_s + 1e-9);
      last[i] = r.drones[i].distance_flown_m;
    }
  }
  CHECK(r.phase == MissionPhase::Completed);
  for (std::size_t i = 0; i < r.drones.size(); ++i) {
    const auto& d = r.drones[i];
    CHECK(d.done);
    CHECK(d.distance_flown_m == doctest::Approx(r.routes[i].total_length_m).epsilon(1e-9));
    CHECK(d.elapsed_s == doctest::Approx(r.routes[i].total_length_m / r.config.speed_mps).epsilon(1e-9));
    CHECK(d.position.lat == r.routes[i].waypoints.back().lat);
    CHECK(d.position.lon == r.routes[i].waypoints.back().lon);
    CHECK(d.position.alt_m == r.config.altitude_m);
  }
  CHECK(error_of([&] {
          Rng rng(1);
          tick(r, {}, 1.0, rng);
        }) == ErrorCode::InvalidPhase);
}

TEST_CASE("a 2500 m route at 5 m/s takes 8.33 minutes") {
  auto r = straight_line(2500.0, 500.0);
  const auto ticks = advance(r, {}, 100'000);
  CHECK(r.phase == MissionPhase::Completed);
  CHECK(ticks == 500);
  const auto res = mission_result(r);
  CHECK(std::abs(res.simulated_minutes - 2500.0 / 5.0 / 60.0) <= r.config.tick_s / 60.0);
  CHECK(res.predicted.per_drone_minutes == doctest::Approx(8.3333).epsilon(1e-4));
  CHECK(res.drones[0].completed_route);
}

TEST_CASE("endurance limit aborts the mission") {
  auto cfg = small_config();
  cfg.endurance_s = 100.0;
  auto r = straight_line(2500.0, 500.0, cfg);
  advance(r, {}, 100'000);
  CHECK(r.phase == MissionPhase::Aborted);
  CHECK(r.drones[0].exhausted);
  CHECK_FALSE(r.drones[0].done);
  CHECK(r.drones[0].distance_flown_m == doctest::Approx(500.0));
  CHECK_FALSE(r.cancel_reason.empty());
}

TEST_CASE("a searched beacon under the path is verified and photographed") {
  auto r = straight_line(1000.0, 250.0);
  r.searched_urls = {{kUsers.at("u1"), "u1"}};
  const std::vector<SimulatedBeacon> world = {
      beacon_at(r.routes[0].waypoints[2], kUsers.at("u1"), "u1"),
      beacon_at(r.routes[0].waypoints[3], "https://other.org/x", "stranger"),
  };
  advance(r, world, 100'000);
  REQUIRE(r.phase == MissionPhase::Completed);
  const auto found = std::count_if(r.detections.begin(), r.detections.end(),
                                   [](const DetectionEvent& d) { return d.verified; });
  CHECK(found == 1);
  const auto& det = *std::find_if(r.detections.begin(), r.detections.end(),
                                  [](const DetectionEvent& d) { return d.verified; });
  CHECK(det.user_code == "u1");
  CHECK(slant_distance(det.position, world[0].position) <= 250.0);
  CHECK(r.photos.size() == kPhotosPerDetection);
  for (const auto& p : r.photos) CHECK(p.user_code == "u1");

  // The stranger's beacon is heard but not verified and yields no photos.
  const auto unknown = std::find_if(r.detections.begin(), r.detections.end(),
                                    [](const DetectionEvent& d) { return d.url == "https://other.org/x"; });
  REQUIRE(unknown != r.detections.end());
  CHECK_FALSE(unknown->verified);
  CHECK(unknown->user_code.empty());

  const auto res = mission_result(r);
  REQUIRE(res.users.size() == 1);
  CHECK(res.users[0].found);
  CHECK(res.users[0].photos.size() == kPhotosPerDetection);
}

TEST_CASE("flat batteries and distant beacons are never heard") {
  auto r = straight_line(1000.0, 250.0);
  r.searched_urls = {{kUsers.at("u1"), "u1"}};
  auto flat = beacon_at(r.routes[0].waypoints[1], kUsers.at("u1"), "u1");
  flat.battery_ok = false;
  const auto far = beacon_at(destination_point(r.routes[0].waypoints[2], 90.0, 400.0), kUsers.at("u1"), "u1");
  const std::vector<SimulatedBeacon> world = {flat, far};
  advance(r, world, 100'000);
  CHECK(r.detections.empty());
  CHECK_FALSE(mission_result(r).users[0].found);
}

TEST_CASE("same seed, same events") {
  auto cfg = small_config();
  auto a = launched(cfg);
  auto b = launched(cfg);
  // A beacon at the edge of range makes detection depend on the random stream.
  const std::vector<SimulatedBeacon> world = {
      beacon_at(destination_point(kSw, 200.0, 180.0), kUsers.at("u1"), "u1")};
  advance(a, world, 100'000);
  advance(b, world, 100'000);
  CHECK(serialize_events(a.events) == serialize_events(b.events));
  CHECK(json(a) == json(b));
}

TEST_CASE("events are sequenced and can be polled incrementally") {
  auto r = launched(small_config());
  advance(r, {}, 50);
  std::uint64_t prev = 0;
  for (const auto& e : r.events) {
    CHECK(e.seq == prev + 1);
    prev = e.seq;
  }
  const auto mid = r.events[r.events.size() / 2].seq;
  const auto tail = r.events_since(mid);
  CHECK(tail.size() == r.last_seq() - mid);
  CHECK(tail.front().seq == mid + 1);
  CHECK(r.events_since(r.last_seq()).empty());
  CHECK(r.events_since(0).size() == r.events.size());

  const auto jsonl = serialize_events(r.events);
  CHECK(static_cast<std::size_t>(std::count(jsonl.begin(), jsonl.end(), '\n')) == r.events.size());
}

TEST_CASE("records survive a JSON round trip") {
  auto r = launched(small_config({"u1", "u2"}));
  const std::vector<SimulatedBeacon> world = {beacon_at(r.routes[0].waypoints[3], kUsers.at("u1"), "u1")};
  advance(r, world, 120);
  const json j = r;
  const auto back = j.get<MissionRecord>();
  CHECK(json(back) == j);
  CHECK(back.phase == r.phase);
  CHECK(back.events.size() == r.events.size());

  json broken = j;
  std::swap(broken["events"][0], broken["events"][1]);
  CHECK(error_of([&] { (void)broken.get<MissionRecord>(); }) == ErrorCode::CorruptStore);

  json cfg = r.config;
  cfg.erase("polygon");
  CHECK(error_of([&] { (void)cfg.get<MissionConfig>(); }) == ErrorCode::ValidationError);
}

TEST_CASE("HTTP weather provider") {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::string last_query;
  server.Get("/forecast", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    last_query = req.get_param_value("lat") + "," + req.get_param_value("lon");
    res.set_content(R"({"current": {"wind": 12.5, "rain_pct": 20}})", "application/json");
  });
  server.Get("/broken", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  server.Get("/garbage", [](const httplib::Request&, httplib::Response& res) { res.set_content("<html>", "text/html"); });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpWeatherOptions opts;
  opts.base_url = "http://127.0.0.1:" + std::to_string(port);
  opts.wind_pointer = "/current/wind";
  opts.precipitation_pointer = "/current/rain_pct";
  opts.precipitation_scale = 0.01;
  HttpWeatherProvider provider(opts);
  const auto report = provider.query({28.5, -16.25, 0});
  CHECK(report.wind_mps == 12.5);
  CHECK(report.precipitation_probability == doctest::Approx(0.2));
  CHECK(last_query == "28.500000,-16.250000");
  const auto d = check_weather({28.5, -16.25, 0}, provider, false);
  CHECK_FALSE(d.go);
  CHECK(d.reason == "wind");

  auto with_path = [&](const std::string& path) {
    auto o = opts;
    o.path_template = path;
    return HttpWeatherProvider(o);
  };
  auto broken = with_path("/broken");
  CHECK(error_of([&] { (void)broken.query(kSw); }) == ErrorCode::WeatherUnavailable);
  auto garbage = with_path("/garbage");
  CHECK(error_of([&] { (void)garbage.query(kSw); }) == ErrorCode::WeatherUnavailable);

  server.stop();
  t.join();
  opts.timeout_s = 1;
  HttpWeatherProvider gone(opts);
  CHECK(error_of([&] { (void)gone.query(kSw); }) == ErrorCode::WeatherUnavailable);
  CHECK(hits >= 2);

  CHECK(error_of([&] { (void)HttpWeatherProvider::parse(json{{"current", {{"wind", -1}}}}, opts); }) ==
        ErrorCode::WeatherUnavailable);
}
