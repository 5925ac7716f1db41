// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sar/detection.hpp"

namespace sar {

struct DetectionBenchRow {
  double distance_m = 0.0;
  double field_rate = 0.0;
  double measured_rate = 0.0;
  std::size_t trials = 0;
};

/// Monte-Carlo scans of a beacon straight below the drone at each field
/// distance. Every distance gets its own generator stream.
std::vector<DetectionBenchRow> bench_detection(std::uint64_t seed, std::size_t trials,
                                               const DetectionModel& model = {});

struct TeamBenchRow {
  double spacing_m = 0.0;
  int people = 0;
  double minutes_each = 0.0;
  double computed_total = 0.0;
  double published_total = 0.0;
  double pd = 0.0;
  bool discrepancy = false;
};

std::vector<TeamBenchRow> bench_team();

struct DroneBenchRow {
  int drones = 0;
  double speed_mps = 0.0;
  double path_length_m = 0.0;
  double per_drone_minutes = 0.0;
  double cumulative_minutes = 0.0;
  double published_per_drone = 0.0;
  double published_total = 0.0;
};

std::vector<DroneBenchRow> bench_drones();

struct BenchReport {
  std::vector<DetectionBenchRow> detection;
  std::vector<TeamBenchRow> team;
  std::vector<DroneBenchRow> drones;
};

BenchReport run_bench(std::uint64_t seed, std::size_t trials);
nlohmann::json to_json(const BenchReport& r);
std::string to_text(const BenchReport& r);

}  // namespace sar
