// SPDX-License-Identifier: Apache-2.0
// sarctl: plan routes, run seeded simulations, print benchmark tables and
// run the HTTP server.

#include <CLI11.hpp>

#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sar/bench.hpp"
#include "sar/error.hpp"
#include "sar/http_server.hpp"
#include "sar/kml.hpp"
#include "sar/routing.hpp"
#include "sar/scenario.hpp"
#include "sar/service.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitInternal = 3;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sar::Error(sar::ErrorCode::ValidationError, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  auto j = json::parse(buf.str(), nullptr, false);
  if (j.is_discarded()) throw sar::Error(sar::ErrorCode::ValidationError, path + " is not valid JSON");
  return j;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

sar::GeoPoint parse_latlon(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw sar::Error(sar::ErrorCode::ValidationError, "expected LAT,LON but got '" + text + "'");
  }
  try {
    return sar::checked_point(std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1)));
  } catch (const std::logic_error&) {
    throw sar::Error(sar::ErrorCode::ValidationError, "expected LAT,LON but got '" + text + "'");
  }
}

struct PlanArgs {
  std::string polygon_file;
  double spacing = 50.0;
  std::size_t drones = 1;
  std::string base;
  std::uint64_t seed = 0;
  double altitude = 30.0;
  double speed = 5.0;
  bool return_to_base = false;
  std::string out_dir = ".";
  bool json_out = false;
};

int cmd_plan(const PlanArgs& a) {
  const auto vertices = sar::polygon_from_geojson(read_json_file(a.polygon_file));
  const sar::SearchPolygon poly(vertices);
  sar::MissionPlanRequest req;
  req.spacing_m = a.spacing;
  req.n_drones = a.drones;
  req.base = a.base.empty() ? vertices.front() : parse_latlon(a.base);
  req.seed = a.seed;
  req.altitude_m = a.altitude;
  req.return_to_base = a.return_to_base;
  if (!(a.speed > 0.0)) throw sar::Error(sar::ErrorCode::ValidationError, "--speed must be > 0");
  const auto plan = sar::plan_mission_routes(poly, req);

  json stats;
  stats["grid_points"] = plan.grid.points.size();
  stats["spacing_m"] = a.spacing;
  stats["seed"] = a.seed;
  stats["routes"] = json::array();
  double total = 0.0;
  for (std::size_t i = 0; i < plan.routes.size(); ++i) {
    const auto& r = plan.routes[i];
    total += r.total_length_m;
    stats["routes"].push_back({{"drone_id", r.drone_id},
                               {"area_points", plan.areas[i].size()},
                               {"waypoints", r.waypoints.size()},
                               {"length_m", r.total_length_m},
                               {"est_minutes", r.total_length_m / (a.speed * 60.0)}});
  }
  const auto t = sar::coverage_time(total, a.speed, static_cast<int>(plan.routes.size()));
  stats["total_length_m"] = total;
  stats["coverage_per_drone_minutes"] = t.per_drone_minutes;
  stats["coverage_cumulative_minutes"] = t.cumulative_minutes;

  fs::create_directories(a.out_dir);
  write_file(fs::path(a.out_dir) / "mission.kml", sar::export_kml(plan.routes));
  write_file(fs::path(a.out_dir) / "stats.json", stats.dump(2) + "\n");

  if (a.json_out) {
    std::cout << stats.dump() << "\n";
  } else {
    std::printf("%zu grid points, %zu routes, %.1f m total\n", plan.grid.points.size(), plan.routes.size(), total);
    for (const auto& r : stats["routes"]) {
      std::printf("  drone %d: %zu waypoints, %.1f m, %.2f min\n", r["drone_id"].get<int>(),
                  r["waypoints"].get<std::size_t>(), r["length_m"].get<double>(), r["est_minutes"].get<double>());
    }
    std::printf("wrote %s and %s\n", (fs::path(a.out_dir) / "mission.kml").c_str(),
                (fs::path(a.out_dir) / "stats.json").c_str());
  }
  return kExitOk;
}

struct SimulateArgs {
  std::string scenario_file;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool json_out = false;
};

int cmd_simulate(const SimulateArgs& a) {
  auto scenario = sar::scenario_from_json(read_json_file(a.scenario_file));
  if (a.seed) scenario.config.seed = *a.seed;
  const auto outcome = sar::run_scenario(scenario);
  const auto summary = sar::to_json(outcome);
  if (!a.out_dir.empty()) {
    fs::create_directories(a.out_dir);
    write_file(fs::path(a.out_dir) / "events.jsonl", sar::serialize_events(outcome.record.events));
    write_file(fs::path(a.out_dir) / "result.json", summary.dump(2) + "\n");
    if (!outcome.record.routes.empty()) {
      write_file(fs::path(a.out_dir) / "mission.kml", sar::export_kml(outcome.record.routes));
    }
  }
  if (a.json_out) {
    std::cout << summary.dump() << "\n";
  } else {
    std::printf("mission %s after %llu ticks (%.0f s simulated)\n",
                std::string(sar::to_string(outcome.record.phase)).c_str(),
                static_cast<unsigned long long>(outcome.record.ticks), outcome.record.sim_time_s);
    if (!outcome.result.reason.empty()) std::printf("reason: %s\n", outcome.result.reason.c_str());
    for (const auto& u : outcome.result.users) {
      if (u.found) {
        std::printf("  %s found by drone %d at t=%.0f s (%.6f, %.6f), %zu photos\n", u.user_code.c_str(),
                    u.first->drone_id, u.first->t_s, u.first->position.lat, u.first->position.lon, u.photos.size());
      } else {
        std::printf("  %s not found\n", u.user_code.c_str());
      }
    }
    for (const auto& e : outcome.location_errors) {
      std::printf("  %s location error %.1f m\n", e.user_code.c_str(), e.error_m);
    }
  }
  return kExitOk;
}

int cmd_bench(std::uint64_t seed, std::size_t trials, bool json_out) {
  const auto started = std::chrono::steady_clock::now();
  const auto report = sar::run_bench(seed, trials);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (json_out) {
    auto j = sar::to_json(report);
    j["seconds"] = secs;
    std::cout << j.dump() << "\n";
  } else {
    std::cout << sar::to_text(report);
    std::printf("\n(%.3f s)\n", secs);
  }
  return kExitOk;
}

sar::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

int cmd_serve(const std::string& config_file) {
  const auto config = sar::ServerConfig::from_json(config_file.empty() ? json::object() : read_json_file(config_file));
  const auto keys = sar::KeyRing::from_env();
  sar::Store store(keys, config.store_path);
  sar::SarService service(store, keys, sar::make_weather_provider(config.weather),
                          std::make_shared<sar::SystemRandom>(), config.service);
  sar::HttpServer server(service, config.bearer_token);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::fprintf(stderr, "listening on %s:%d\n", config.host.c_str(), config.port);
  if (!server.listen(config.host, config.port)) {
    std::fprintf(stderr, "error: cannot listen on %s:%d\n", config.host.c_str(), config.port);
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drone search-and-rescue mission planner and simulator"};
  app.require_subcommand(1);

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "Plan coverage routes for a GeoJSON polygon");
  plan_cmd->add_option("polygon", plan.polygon_file, "GeoJSON polygon file")->required();
  plan_cmd->add_option("--spacing", plan.spacing, "Grid spacing in meters")->capture_default_str();
  plan_cmd->add_option("--drones", plan.drones, "Number of drones")->capture_default_str();
  plan_cmd->add_option("--base", plan.base, "Base point LAT,LON (default: first polygon vertex)");
  plan_cmd->add_option("--seed", plan.seed, "Seed for k-means")->capture_default_str();
  plan_cmd->add_option("--altitude", plan.altitude, "Flight altitude above ground in meters")->capture_default_str();
  plan_cmd->add_option("--speed", plan.speed, "Drone speed in m/s for time estimates")->capture_default_str();
  plan_cmd->add_flag("--return-to-base", plan.return_to_base, "Close each tour at the base");
  plan_cmd->add_option("--out-dir", plan.out_dir, "Directory for mission.kml and stats.json")->capture_default_str();
  plan_cmd->add_flag("--json", plan.json_out, "Print stats as JSON");

  SimulateArgs sim;
  std::uint64_t sim_seed = 0;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a scripted mission scenario");
  sim_cmd->add_option("scenario", sim.scenario_file, "Scenario JSON file")->required();
  auto* sim_seed_opt = sim_cmd->add_option("--seed", sim_seed, "Override the scenario seed");
  sim_cmd->add_option("--out-dir", sim.out_dir, "Write events.jsonl, result.json and mission.kml here");
  sim_cmd->add_flag("--json", sim.json_out, "Print the summary as JSON");

  std::uint64_t bench_seed = 1;
  std::size_t bench_trials = 10'000;
  bool bench_json = false;
  auto* bench_cmd = app.add_subcommand("bench", "Reproduce the detection, ground-team and coverage-time tables");
  bench_cmd->add_option("--seed", bench_seed, "Monte-Carlo seed")->capture_default_str();
  bench_cmd->add_option("--trials", bench_trials, "Scans per distance")->capture_default_str();
  bench_cmd->add_flag("--json", bench_json, "Print as JSON");

  std::string serve_config;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API (keys from SAR_ENC_KEY / SAR_MAC_KEY)");
  serve_cmd->add_option("--config", serve_config, "Server config JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*plan_cmd) return cmd_plan(plan);
    if (*sim_cmd) {
      if (*sim_seed_opt) sim.seed = sim_seed;
      return cmd_simulate(sim);
    }
    if (*bench_cmd) return cmd_bench(bench_seed, bench_trials, bench_json);
    if (*serve_cmd) return cmd_serve(serve_config);
  } catch (const sar::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == sar::ErrorCode::CorruptStore ? kExitInternal : kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInternal;
  }
  return kExitInternal;
}
