// SPDX-License-Identifier: Apache-2.0
#include "sar/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sar/error.hpp"

namespace sar {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Slack for boundary membership in projected meters; far below any
// meaningful grid spacing, far above projection round-trip noise.
constexpr double kBoundaryTolM = 1e-6;

double cross(const PlanarPoint& o, const PlanarPoint& a, const PlanarPoint& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(const PlanarPoint& p, const PlanarPoint& a, const PlanarPoint& b, double tol) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = a.x + t * dx - p.x;
  const double ey = a.y + t * dy - p.y;
  return ex * ex + ey * ey <= tol * tol;
}

int orientation(const PlanarPoint& a, const PlanarPoint& b, const PlanarPoint& c) {
  const double v = cross(a, b, c);
  const double scale = std::max({std::abs(b.x - a.x), std::abs(b.y - a.y), std::abs(c.x - a.x),
                                 std::abs(c.y - a.y), 1.0});
  if (std::abs(v) <= 1e-12 * scale * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool segments_intersect(const PlanarPoint& p1, const PlanarPoint& p2, const PlanarPoint& q1,
                        const PlanarPoint& q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(q1, p1, p2, kBoundaryTolM)) return true;
  if (o2 == 0 && on_segment(q2, p1, p2, kBoundaryTolM)) return true;
  if (o3 == 0 && on_segment(p1, q1, q2, kBoundaryTolM)) return true;
  if (o4 == 0 && on_segment(p2, q1, q2, kBoundaryTolM)) return true;
  return false;
}

}  // namespace

bool is_valid(const GeoPoint& p) noexcept {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && std::isfinite(p.alt_m) && p.lat >= -90.0 &&
         p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0 && p.alt_m >= 0.0;
}

GeoPoint checked_point(double lat, double lon, double alt_m) {
  GeoPoint p{lat, lon, alt_m};
  if (!is_valid(p)) {
    throw Error(ErrorCode::InvalidArgument,
                "coordinate out of range (" + std::to_string(lat) + ", " + std::to_string(lon) + ", " +
                    std::to_string(alt_m) + ")");
  }
  return p;
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b) noexcept {
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dphi = (b.lat - a.lat) * kDegToRad;
  const double dlambda = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  const double c = 2.0 * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
  return kEarthRadiusM * c;
}

GeoPoint destination_point(const GeoPoint& origin, double bearing_deg, double distance_m) {
  if (!(distance_m >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "distance must be >= 0");
  }
  if (distance_m == 0.0) return origin;
  const double delta = distance_m / kEarthRadiusM;
  const double theta = bearing_deg * kDegToRad;
  const double phi1 = origin.lat * kDegToRad;
  const double lambda1 = origin.lon * kDegToRad;
  const double sin_phi2 =
      std::sin(phi1) * std::cos(delta) + std::cos(phi1) * std::sin(delta) * std::cos(theta);
  const double phi2 = std::asin(std::clamp(sin_phi2, -1.0, 1.0));
  const double lambda2 =
      lambda1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(phi1),
                           std::cos(delta) - std::sin(phi1) * std::sin(phi2));
  double lon = std::remainder(lambda2 * kRadToDeg, 360.0);
  if (lon == -180.0) lon = 180.0;
  return GeoPoint{phi2 * kRadToDeg, lon, origin.alt_m};
}

double initial_bearing(const GeoPoint& a, const GeoPoint& b) noexcept {
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dl = (b.lon - a.lon) * kDegToRad;
  const double y = std::sin(dl) * std::cos(phi2);
  const double x = std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dl);
  double deg = std::atan2(y, x) * kRadToDeg;
  if (deg < 0) deg += 360.0;
  return deg;
}

LocalProjection::LocalProjection(const GeoPoint& origin)
    : origin_(origin), cos_lat0_(std::cos(origin.lat * kDegToRad)) {}

PlanarPoint LocalProjection::forward(const GeoPoint& p) const noexcept {
  double dlon = p.lon - origin_.lon;
  if (dlon > 180.0) dlon -= 360.0;
  if (dlon < -180.0) dlon += 360.0;
  return {kEarthRadiusM * dlon * kDegToRad * cos_lat0_, kEarthRadiusM * (p.lat - origin_.lat) * kDegToRad};
}

GeoPoint LocalProjection::inverse(const PlanarPoint& q, double alt_m) const noexcept {
  const double lat = origin_.lat + q.y / kEarthRadiusM * kRadToDeg;
  double lon = origin_.lon + q.x / (kEarthRadiusM * cos_lat0_) * kRadToDeg;
  if (lon > 180.0) lon -= 360.0;
  if (lon < -180.0) lon += 360.0;
  return {lat, lon, alt_m};
}

LocalProjection LocalProjection::about(std::span<const GeoPoint> points) {
  if (points.empty()) return LocalProjection(GeoPoint{});
  // Longitudes are averaged relative to the first point so a set straddling
  // the antimeridian still gets a sensible origin.
  const double ref = points.front().lon;
  double sum_lat = 0.0;
  double sum_dlon = 0.0;
  for (const auto& p : points) {
    sum_lat += p.lat;
    double d = p.lon - ref;
    if (d > 180.0) d -= 360.0;
    if (d < -180.0) d += 360.0;
    sum_dlon += d;
  }
  const double n = static_cast<double>(points.size());
  double lon = ref + sum_dlon / n;
  if (lon > 180.0) lon -= 360.0;
  if (lon < -180.0) lon += 360.0;
  return LocalProjection(GeoPoint{sum_lat / n, lon, 0.0});
}

SearchPolygon::SearchPolygon(std::vector<GeoPoint> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) {
    throw Error(ErrorCode::InvalidPolygon, "polygon needs at least 3 vertices, got " +
                                               std::to_string(vertices_.size()));
  }
  for (const auto& v : vertices_) {
    if (!std::isfinite(v.lat) || !std::isfinite(v.lon) || v.lat < -90 || v.lat > 90 || v.lon < -180 ||
        v.lon > 180) {
      throw Error(ErrorCode::InvalidPolygon, "vertex out of range");
    }
  }
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = vertices_[i];
    const auto& b = vertices_[(i + 1) % n];
    if (a.lat == b.lat && a.lon == b.lon) {
      throw Error(ErrorCode::InvalidPolygon, "consecutive vertices " + std::to_string(i) + " and " +
                                                 std::to_string((i + 1) % n) + " are equal");
    }
  }

  projection_ = LocalProjection::about(vertices_);
  planar_.reserve(n);
  for (const auto& v : vertices_) planar_.push_back(projection_.forward(v));

  for (std::size_t i = 0; i < n; ++i) {
    const auto& a1 = planar_[i];
    const auto& a2 = planar_[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& b1 = planar_[j];
      const auto& b2 = planar_[(j + 1) % n];
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        // Shared endpoint is fine; folding back over the previous edge is not.
        const PlanarPoint& shared = (j == i + 1) ? a2 : a1;
        const PlanarPoint& p = (j == i + 1) ? a1 : a2;
        const PlanarPoint& q = (j == i + 1) ? b2 : b1;
        if (orientation(p, shared, q) == 0) {
          const double dot = (p.x - shared.x) * (q.x - shared.x) + (p.y - shared.y) * (q.y - shared.y);
          if (dot > 0) {
            throw Error(ErrorCode::InvalidPolygon,
                        "edges " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
          }
        }
        continue;
      }
      if (segments_intersect(a1, a2, b1, b2)) {
        throw Error(ErrorCode::InvalidPolygon,
                    "edges " + std::to_string(i) + " and " + std::to_string(j) + " intersect");
      }
    }
  }
  if (area_m2() <= 0.0) {
    throw Error(ErrorCode::InvalidPolygon, "polygon has zero area");
  }
}

SearchPolygon SearchPolygon::rectangle(const GeoPoint& south_west, double width_m, double height_m) {
  if (!(width_m > 0.0) || !(height_m > 0.0)) {
    throw Error(ErrorCode::InvalidPolygon, "rectangle sides must be positive");
  }
  const double north = south_west.lat + height_m / kEarthRadiusM * kRadToDeg;
  const double mid_lat = (south_west.lat + north) / 2.0;
  const double east = south_west.lon + width_m / (kEarthRadiusM * std::cos(mid_lat * kDegToRad)) * kRadToDeg;
  return SearchPolygon({{south_west.lat, south_west.lon, 0.0},
                        {south_west.lat, east, 0.0},
                        {north, east, 0.0},
                        {north, south_west.lon, 0.0}});
}

BoundingBox SearchPolygon::bounds() const noexcept {
  BoundingBox box{90.0, 180.0, -90.0, -180.0};
  for (const auto& v : vertices_) {
    box.min_lat = std::min(box.min_lat, v.lat);
    box.max_lat = std::max(box.max_lat, v.lat);
    box.min_lon = std::min(box.min_lon, v.lon);
    box.max_lon = std::max(box.max_lon, v.lon);
  }
  return box;
}

double SearchPolygon::area_m2() const noexcept {
  double twice = 0.0;
  const std::size_t n = planar_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = planar_[i];
    const auto& b = planar_[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::abs(twice) / 2.0;
}

bool point_in_polygon(const GeoPoint& p, const SearchPolygon& poly) noexcept {
  const PlanarPoint q = poly.projection().forward(p);
  const auto& ring = poly.planar();
  const std::size_t n = ring.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = ring[i];
    const auto& b = ring[j];
    if (on_segment(q, a, b, kBoundaryTolM)) return true;
    if ((a.y > q.y) != (b.y > q.y)) {
      const double x_cross = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (q.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

PointCloud generate_grid(const SearchPolygon& poly, double spacing_m, std::size_t max_points) {
  if (!(spacing_m > 0.0) || !std::isfinite(spacing_m)) {
    throw Error(ErrorCode::InvalidArgument, "grid spacing must be > 0");
  }
  const auto& proj = poly.projection();
  const auto& ring = poly.planar();
  double min_x = ring.front().x, max_x = ring.front().x;
  double min_y = ring.front().y, max_y = ring.front().y;
  for (const auto& v : ring) {
    min_x = std::min(min_x, v.x);
    max_x = std::max(max_x, v.x);
    min_y = std::min(min_y, v.y);
    max_y = std::max(max_y, v.y);
  }

  // Lattice extents with a hair of slack so sides that are exact multiples
  // of the spacing keep their far row/column.
  const double slack = kBoundaryTolM;
  const auto rows = static_cast<std::size_t>(std::floor((max_y - min_y + slack) / spacing_m)) + 1;
  const auto cols = static_cast<std::size_t>(std::floor((max_x - min_x + slack) / spacing_m)) + 1;

  if (static_cast<double>(rows) * static_cast<double>(cols) > 100.0 * static_cast<double>(max_points)) {
    throw Error(ErrorCode::GridTooLarge, "bounding lattice of " + std::to_string(rows) + "x" +
                                             std::to_string(cols) + " points is far beyond the cap");
  }
  const GeoPoint south_west = proj.inverse({min_x, min_y});

  PointCloud cloud;
  cloud.spacing_m = spacing_m;
  for (std::size_t r = 0; r < rows; ++r) {
    const GeoPoint row_origin = destination_point(south_west, 0.0, static_cast<double>(r) * spacing_m);
    const double row_y = proj.forward(row_origin).y;
    for (std::size_t c = 0; c < cols; ++c) {
      const PlanarPoint q{min_x + static_cast<double>(c) * spacing_m, row_y};
      const GeoPoint p = proj.inverse(q);
      if (!point_in_polygon(p, poly)) continue;
      if (cloud.points.size() >= max_points) {
        throw Error(ErrorCode::GridTooLarge, "grid exceeds " + std::to_string(max_points) +
                                                 " points at spacing " + std::to_string(spacing_m) + " m");
      }
      cloud.points.push_back(p);
    }
  }
  if (cloud.points.empty()) {
    throw Error(ErrorCode::EmptyGrid, "no lattice point falls inside the polygon");
  }
  return cloud;
}

}  // namespace sar
