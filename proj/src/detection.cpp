// SPDX-License-Identifier: Apache-2.0
#include "sar/detection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sar/error.hpp"

namespace sar {

DetectionModel::DetectionModel()
    : DetectionModel(std::vector<DetectionSample>(kFieldDetectionTable.begin(), kFieldDetectionTable.end()),
                     kDefaultMaxRangeM) {}

DetectionModel::DetectionModel(std::vector<DetectionSample> table, double max_range_m)
    : table_(std::move(table)), max_range_m_(max_range_m) {
  if (table_.empty()) throw Error(ErrorCode::InvalidArgument, "detection table is empty");
  for (std::size_t i = 0; i < table_.size(); ++i) {
    const auto& s = table_[i];
    if (!(s.distance_m >= 0.0) || !(s.success_rate >= 0.0 && s.success_rate <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "detection table row " + std::to_string(i) + " out of range");
    }
    if (i > 0 && !(s.distance_m > table_[i - 1].distance_m)) {
      throw Error(ErrorCode::InvalidArgument, "detection table distances must strictly increase");
    }
    if (i > 0 && s.success_rate > table_[i - 1].success_rate) {
      throw Error(ErrorCode::InvalidArgument, "detection rate must not increase with distance");
    }
  }
  if (!(max_range_m_ >= table_.back().distance_m)) {
    throw Error(ErrorCode::InvalidArgument, "max range is shorter than the last table distance");
  }
}

DetectionModel DetectionModel::from_csv(std::string_view text, double max_range_m) {
  std::vector<DetectionSample> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(line_no) + ": expected distance_m,rate");
    }
    try {
      std::size_t used = 0;
      const double d = std::stod(line.substr(0, comma), &used);
      const double r = std::stod(line.substr(comma + 1));
      rows.push_back({d, r});
    } catch (const std::invalid_argument&) {
      if (rows.empty() && line_no == 1) continue;  // header
      throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(line_no) + ": not numeric");
    }
  }
  return DetectionModel(std::move(rows), max_range_m);
}

double DetectionModel::probability(double d) const {
  if (!(d >= 0.0)) throw Error(ErrorCode::DomainError, "distance must be >= 0");
  if (d <= table_.front().distance_m) return table_.front().success_rate;
  for (std::size_t i = 1; i < table_.size(); ++i) {
    if (d <= table_[i].distance_m) {
      const auto& a = table_[i - 1];
      const auto& b = table_[i];
      const double t = (d - a.distance_m) / (b.distance_m - a.distance_m);
      return a.success_rate + t * (b.success_rate - a.success_rate);
    }
  }
  const auto& last = table_.back();
  if (d >= max_range_m_) return 0.0;
  const double t = (d - last.distance_m) / (max_range_m_ - last.distance_m);
  return last.success_rate * (1.0 - t);
}

double detection_probability(const DetectionModel& model, double slant_distance_m) {
  return model.probability(slant_distance_m);
}

double slant_distance(const GeoPoint& drone, const GeoPoint& beacon) noexcept {
  const double h = haversine_distance(drone, beacon);
  const double v = drone.alt_m - beacon.alt_m;
  return std::sqrt(h * h + v * v);
}

bool simulate_scan(const DetectionModel& model, const GeoPoint& drone, const SimulatedBeacon& beacon, Rng& rng) {
  if (!beacon.battery_ok) return false;
  const double p = model.probability(slant_distance(drone, beacon.position));
  // Always draw so the stream position does not depend on distance.
  const double u = rng.uniform01();
  return u < p;
}

SearchEffectiveness success_probability(double pa, double pd) {
  if (!(pa >= 0.0 && pa <= 1.0) || !(pd >= 0.0 && pd <= 1.0)) {
    throw Error(ErrorCode::DomainError, "pa and pd must be probabilities in [0, 1]");
  }
  return {pa, pd, pa * pd};
}

CoverageTime coverage_time(double path_length_m, double speed_mps, int n_drones) {
  if (!(speed_mps > 0.0)) throw Error(ErrorCode::DomainError, "speed must be > 0");
  if (n_drones < 1) throw Error(ErrorCode::DomainError, "at least one drone is required");
  if (!(path_length_m >= 0.0)) throw Error(ErrorCode::DomainError, "path length must be >= 0");
  CoverageTime t;
  t.per_drone_minutes = path_length_m / (speed_mps * n_drones * 60.0);
  t.cumulative_minutes = t.per_drone_minutes * n_drones;
  return t;
}

double team_coverage_time(int n_people, double minutes_each) {
  if (n_people < 1 || !(minutes_each > 0.0)) {
    throw Error(ErrorCode::DomainError, "team size and minutes must be positive");
  }
  return n_people * minutes_each;
}

}  // namespace sar
