// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sar/beacon.hpp"
#include "sar/geodesy.hpp"
#include "sar/random.hpp"

namespace sar {

struct DetectionSample {
  double distance_m;
  double success_rate;
};

/// Empirical BLE detection curve. Between table rows the probability is
/// interpolated linearly; below the first row it is clamped to the first
/// rate; past the last row it falls linearly to zero at max_range_m.
class DetectionModel {
 public:
  /// Field measurements: 100% up to 100 m, 90% at 150 m, 60% at 200 m,
  /// with the cutoff at 250 m.
  DetectionModel();
  /// Throws InvalidArgument unless distances strictly increase, rates lie
  /// in [0, 1] and never increase, and max_range_m >= last distance.
  DetectionModel(std::vector<DetectionSample> table, double max_range_m);

  /// CSV with `distance_m,rate` rows (a header line is allowed).
  static DetectionModel from_csv(std::string_view text, double max_range_m);

  double probability(double slant_distance_m) const;
  const std::vector<DetectionSample>& table() const noexcept { return table_; }
  double max_range_m() const noexcept { return max_range_m_; }

 private:
  std::vector<DetectionSample> table_;
  double max_range_m_;
};

inline constexpr double kDefaultMaxRangeM = 250.0;

/// Table rows as measured in the field (distance m, success rate).
inline constexpr std::array<DetectionSample, 6> kFieldDetectionTable = {{
    {10.0, 1.00},
    {20.0, 1.00},
    {50.0, 1.00},
    {100.0, 1.00},
    {150.0, 0.90},
    {200.0, 0.60},
}};

double detection_probability(const DetectionModel& model, double slant_distance_m);

/// sqrt(horizontal great-circle distance^2 + altitude difference^2).
double slant_distance(const GeoPoint& drone, const GeoPoint& beacon) noexcept;

/// One Bernoulli scan of a beacon from the drone pose. A beacon whose phone
/// battery is flat is never heard.
bool simulate_scan(const DetectionModel& model, const GeoPoint& drone, const SimulatedBeacon& beacon, Rng& rng);

struct SearchEffectiveness {
  double pa = 0.0;  // priority of the search segment
  double pd = 0.0;  // detection ability of the resource
  double pe = 0.0;  // success measure, pa * pd
};

/// Throws DomainError unless both inputs are in [0, 1].
SearchEffectiveness success_probability(double pa, double pd);

struct CoverageTime {
  double per_drone_minutes = 0.0;
  double cumulative_minutes = 0.0;
};

/// Time for n drones sharing path_length_m equally at speed_mps.
CoverageTime coverage_time(double path_length_m, double speed_mps, int n_drones);

/// Person-minutes spent by a ground team.
double team_coverage_time(int n_people, double minutes_each);

/// Ground-team reference rows for a 2.5 km^2 search.
struct TeamReferenceRow {
  double spacing_m;
  int people;
  double minutes_each;
  double published_total_minutes;
  double pd;
};

inline constexpr std::array<TeamReferenceRow, 3> kTeamReference = {{
    {30.0, 35, 210.0, 11'130.0, 0.50},
    {18.0, 88, 210.0, 18'480.0, 0.70},
    {6.0, 264, 210.0, 55'440.0, 0.90},
}};

/// Drone reference rows: 2 500 m at 5 m/s.
struct DroneReferenceRow {
  double speed_mps;
  int drones;
  double published_per_drone_minutes;
  double published_total_minutes;
};

inline constexpr double kReferencePathLengthM = 2'500.0;

inline constexpr std::array<DroneReferenceRow, 3> kDroneReference = {{
    {5.0, 1, 8.3, 8.3},
    {5.0, 2, 4.1, 8.3},
    {5.0, 5, 1.7, 8.3},
}};

}  // namespace sar
