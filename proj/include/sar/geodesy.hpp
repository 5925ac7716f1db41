// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sar {

/// Mean earth radius used by every distance computation, in meters.
inline constexpr double kEarthRadiusM = 6'371'000.0;

inline constexpr std::size_t kDefaultGridCap = 100'000;

/// WGS-84 latitude/longitude in degrees plus altitude above ground.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
  double alt_m = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool is_valid(const GeoPoint& p) noexcept;

/// Throws InvalidArgument unless lat/lon are in range and alt_m >= 0.
GeoPoint checked_point(double lat, double lon, double alt_m = 0.0);

/// Great-circle distance on a sphere of radius kEarthRadiusM (altitude ignored).
double haversine_distance(const GeoPoint& a, const GeoPoint& b) noexcept;

/// Point reached by travelling distance_m along the great circle leaving
/// origin at bearing_deg (clockwise from true north). Altitude is copied.
GeoPoint destination_point(const GeoPoint& origin, double bearing_deg, double distance_m);

/// Initial great-circle bearing from a to b, degrees in [0, 360).
double initial_bearing(const GeoPoint& a, const GeoPoint& b) noexcept;

struct PlanarPoint {
  double x = 0.0;  // meters east of the projection origin
  double y = 0.0;  // meters north of the projection origin
};

/// Equirectangular projection about a fixed origin. Distances are exact
/// along the meridian through the origin and along its parallel; error
/// grows slowly away from it, which is negligible at search-area scale.
class LocalProjection {
 public:
  LocalProjection() = default;
  explicit LocalProjection(const GeoPoint& origin);

  PlanarPoint forward(const GeoPoint& p) const noexcept;
  GeoPoint inverse(const PlanarPoint& q, double alt_m = 0.0) const noexcept;
  const GeoPoint& origin() const noexcept { return origin_; }

  /// Projection centred on the mean of the given points.
  static LocalProjection about(std::span<const GeoPoint> points);

 private:
  GeoPoint origin_{};
  double cos_lat0_ = 1.0;
};

struct BoundingBox {
  double min_lat, min_lon, max_lat, max_lon;
};

/// Simple polygon (non-self-intersecting) with at least three vertices.
/// The closing edge from the last vertex back to the first is implicit.
class SearchPolygon {
 public:
  /// Validates all invariants; throws InvalidPolygon on violation.
  explicit SearchPolygon(std::vector<GeoPoint> vertices);

  /// Lat/lon box whose projected width and height are width_m x height_m.
  static SearchPolygon rectangle(const GeoPoint& south_west, double width_m, double height_m);

  const std::vector<GeoPoint>& vertices() const noexcept { return vertices_; }
  const GeoPoint& centroid() const noexcept { return projection_.origin(); }
  const LocalProjection& projection() const noexcept { return projection_; }
  BoundingBox bounds() const noexcept;

  /// Projected vertex coordinates, in vertex order.
  const std::vector<PlanarPoint>& planar() const noexcept { return planar_; }

  /// Planar area in square meters.
  double area_m2() const noexcept;

 private:
  std::vector<GeoPoint> vertices_;
  LocalProjection projection_;
  std::vector<PlanarPoint> planar_;
};

struct PointCloud {
  std::vector<GeoPoint> points;
  double spacing_m = 0.0;
};

/// Ray casting in the polygon's local projection; points on an edge or
/// vertex are inside.
bool point_in_polygon(const GeoPoint& p, const SearchPolygon& poly) noexcept;

/// North-aligned square lattice anchored at the south-west corner of the
/// polygon's bounding box, filtered to points inside the polygon. Rows are
/// stepped with destination_point along the meridian; columns at a constant
/// projected spacing. Throws EmptyGrid / GridTooLarge.
PointCloud generate_grid(const SearchPolygon& poly, double spacing_m,
                         std::size_t max_points = kDefaultGridCap);

}  // namespace sar
