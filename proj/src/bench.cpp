// SPDX-License-Identifier: Apache-2.0
#include "sar/bench.hpp"

#include <cmath>
#include <cstdio>

#include "sar/random.hpp"

namespace sar {

std::vector<DetectionBenchRow> bench_detection(std::uint64_t seed, std::size_t trials, const DetectionModel& model) {
  const GeoPoint ground{28.4636, -16.2518, 0.0};
  SimulatedBeacon beacon;
  beacon.position = ground;
  beacon.url = "https://sos.org/b/bench";

  std::vector<DetectionBenchRow> rows;
  Rng root(seed);
  for (const auto& sample : kFieldDetectionTable) {
    Rng rng = root.split(static_cast<std::uint64_t>(sample.distance_m));
    GeoPoint drone = ground;
    drone.alt_m = sample.distance_m;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < trials; ++i) hits += simulate_scan(model, drone, beacon, rng) ? 1 : 0;
    rows.push_back({sample.distance_m, sample.success_rate,
                    trials == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(trials), trials});
  }
  return rows;
}

std::vector<TeamBenchRow> bench_team() {
  std::vector<TeamBenchRow> rows;
  for (const auto& r : kTeamReference) {
    TeamBenchRow t;
    t.spacing_m = r.spacing_m;
    t.people = r.people;
    t.minutes_each = r.minutes_each;
    t.computed_total = team_coverage_time(r.people, r.minutes_each);
    t.published_total = r.published_total_minutes;
    t.pd = r.pd;
    t.discrepancy = t.computed_total != t.published_total;
    rows.push_back(t);
  }
  return rows;
}

std::vector<DroneBenchRow> bench_drones() {
  std::vector<DroneBenchRow> rows;
  for (const auto& r : kDroneReference) {
    const auto t = coverage_time(kReferencePathLengthM, r.speed_mps, r.drones);
    rows.push_back({r.drones, r.speed_mps, kReferencePathLengthM, t.per_drone_minutes, t.cumulative_minutes,
                    r.published_per_drone_minutes, r.published_total_minutes});
  }
  return rows;
}

BenchReport run_bench(std::uint64_t seed, std::size_t trials) {
  return {bench_detection(seed, trials), bench_team(), bench_drones()};
}

nlohmann::json to_json(const BenchReport& r) {
  nlohmann::json j;
  j["detection"] = nlohmann::json::array();
  for (const auto& d : r.detection) {
    j["detection"].push_back({{"distance_m", d.distance_m},
                              {"field_rate", d.field_rate},
                              {"measured_rate", d.measured_rate},
                              {"trials", d.trials}});
  }
  j["team"] = nlohmann::json::array();
  for (const auto& t : r.team) {
    j["team"].push_back({{"spacing_m", t.spacing_m},
                         {"people", t.people},
                         {"minutes_each", t.minutes_each},
                         {"computed_total_minutes", t.computed_total},
                         {"published_total_minutes", t.published_total},
                         {"pd", t.pd},
                         {"discrepancy", t.discrepancy}});
  }
  j["drones"] = nlohmann::json::array();
  for (const auto& d : r.drones) {
    j["drones"].push_back({{"drones", d.drones},
                           {"speed_mps", d.speed_mps},
                           {"path_length_m", d.path_length_m},
                           {"per_drone_minutes", d.per_drone_minutes},
                           {"cumulative_minutes", d.cumulative_minutes},
                           {"published_per_drone_minutes", d.published_per_drone},
                           {"published_total_minutes", d.published_total}});
  }
  return j;
}

std::string to_text(const BenchReport& r) {
  std::string out;
  char line[256];
  out += "Detection rate by distance (Monte-Carlo)\n";
  out += "  distance_m  field  measured  trials\n";
  for (const auto& d : r.detection) {
    std::snprintf(line, sizeof line, "  %10.0f  %5.2f  %8.4f  %6zu\n", d.distance_m, d.field_rate, d.measured_rate,
                  d.trials);
    out += line;
  }
  out += "\nGround team effort for 2.5 km^2\n";
  out += "  spacing_m  people  min_each  computed  published  Pd    note\n";
  for (const auto& t : r.team) {
    std::snprintf(line, sizeof line, "  %9.0f  %6d  %8.0f  %8.0f  %9.0f  %.2f  %s\n", t.spacing_m, t.people,
                  t.minutes_each, t.computed_total, t.published_total, t.pd,
                  t.discrepancy ? "DISCREPANCY: people x minutes != published total" : "ok");
    out += line;
  }
  out += "\nDrone coverage time, 2500 m at 5 m/s\n";
  out += "  drones  per_drone_min  cumulative_min  published_per  published_total\n";
  for (const auto& d : r.drones) {
    std::snprintf(line, sizeof line, "  %6d  %13.2f  %14.2f  %13.1f  %15.1f\n", d.drones, d.per_drone_minutes,
                  d.cumulative_minutes, d.published_per_drone, d.published_total);
    out += line;
  }
  return out;
}

}  // namespace sar
