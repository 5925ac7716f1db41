// SPDX-License-Identifier: Apache-2.0
#include "sar/partition.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "sar/error.hpp"
#include "sar/random.hpp"

namespace sar {

namespace {

double dist2(const PlanarPoint& a, const PlanarPoint& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

void check_k(std::size_t n, std::size_t k) {
  if (n == 0) throw Error(ErrorCode::InvalidK, "point set is empty");
  if (k < 1 || k > n) {
    throw Error(ErrorCode::InvalidK, "k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
}

// Nearest centroid; a point only leaves its previous cluster for a strictly
// closer one, which rules out oscillation between equidistant centroids.
std::vector<std::size_t> assign(const std::vector<PlanarPoint>& xy, const std::vector<PlanarPoint>& cents,
                                const std::vector<std::size_t>* previous) {
  std::vector<std::size_t> out(xy.size());
  for (std::size_t i = 0; i < xy.size(); ++i) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cents.size(); ++j) {
      const double d = dist2(xy[i], cents[j]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (previous != nullptr && dist2(xy[i], cents[(*previous)[i]]) == best_d) best = (*previous)[i];
    out[i] = best;
  }
  return out;
}

// Give every empty cluster the point that is currently worst served.
void repair_empty(const std::vector<PlanarPoint>& xy, const std::vector<PlanarPoint>& cents,
                  std::vector<std::size_t>& a) {
  const std::size_t k = cents.size();
  std::vector<std::size_t> counts(k, 0);
  for (auto c : a) ++counts[c];
  for (std::size_t e = 0; e < k; ++e) {
    if (counts[e] != 0) continue;
    std::size_t victim = xy.size();
    double worst = -1.0;
    for (std::size_t i = 0; i < xy.size(); ++i) {
      if (counts[a[i]] < 2) continue;
      const double d = dist2(xy[i], cents[a[i]]);
      if (d > worst) {
        worst = d;
        victim = i;
      }
    }
    // k <= n guarantees some cluster still has two or more points.
    --counts[a[victim]];
    a[victim] = e;
    counts[e] = 1;
  }
}

std::vector<PlanarPoint> means(const std::vector<PlanarPoint>& xy, const std::vector<std::size_t>& a,
                               std::size_t k) {
  std::vector<PlanarPoint> sums(k);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < xy.size(); ++i) {
    sums[a[i]].x += xy[i].x;
    sums[a[i]].y += xy[i].y;
    ++counts[a[i]];
  }
  for (std::size_t j = 0; j < k; ++j) {
    const double n = static_cast<double>(counts[j]);
    sums[j] = {sums[j].x / n, sums[j].y / n};
  }
  return sums;
}

double planar_inertia(const std::vector<PlanarPoint>& xy, const std::vector<PlanarPoint>& cents,
                      const std::vector<std::size_t>& a) {
  double total = 0.0;
  for (std::size_t i = 0; i < xy.size(); ++i) total += dist2(xy[i], cents[a[i]]);
  return total;
}

Clustering lloyd(std::span<const GeoPoint> points, const LocalProjection& proj,
                 std::vector<PlanarPoint> cents, std::size_t max_iter) {
  std::vector<PlanarPoint> xy;
  xy.reserve(points.size());
  for (const auto& p : points) xy.push_back(proj.forward(p));
  const std::size_t k = cents.size();

  Clustering out;
  out.k = k;
  out.projection = proj;

  auto a = assign(xy, cents, nullptr);
  repair_empty(xy, cents, a);
  while (out.iterations < max_iter) {
    cents = means(xy, a, k);
    out.inertia_history.push_back(planar_inertia(xy, cents, a));
    ++out.iterations;
    auto next = assign(xy, cents, &a);
    repair_empty(xy, cents, next);
    if (next == a) {
      out.converged = true;
      break;
    }
    a = std::move(next);
  }
  if (!out.converged) cents = means(xy, a, k);

  out.assignments = std::move(a);
  out.planar_centroids = cents;
  out.centroids.reserve(k);
  for (const auto& c : cents) out.centroids.push_back(proj.inverse(c));
  return out;
}

}  // namespace

std::vector<GeoPoint> kmeanspp_seeds(std::span<const GeoPoint> points, std::size_t k, std::uint64_t seed) {
  check_k(points.size(), k);
  const auto proj = LocalProjection::about(points);
  std::vector<PlanarPoint> xy;
  xy.reserve(points.size());
  for (const auto& p : points) xy.push_back(proj.forward(p));

  Rng rng(seed);
  std::vector<std::size_t> chosen;
  std::vector<bool> taken(points.size(), false);
  chosen.push_back(static_cast<std::size_t>(rng.below(points.size())));
  taken[chosen.back()] = true;

  std::vector<double> d2(points.size(), std::numeric_limits<double>::infinity());
  while (chosen.size() < k) {
    const auto& last = xy[chosen.back()];
    double total = 0.0;
    for (std::size_t i = 0; i < xy.size(); ++i) {
      d2[i] = std::min(d2[i], dist2(xy[i], last));
      total += d2[i];
    }
    std::size_t pick = xy.size();
    if (total > 0.0) {
      const double target = rng.uniform01() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < xy.size(); ++i) {
        if (d2[i] == 0.0) continue;
        acc += d2[i];
        pick = i;
        if (acc > target) break;
      }
    }
    if (pick == xy.size()) {
      // Every remaining point coincides with a centroid; take the first unused.
      pick = static_cast<std::size_t>(std::find(taken.begin(), taken.end(), false) - taken.begin());
    }
    taken[pick] = true;
    chosen.push_back(pick);
  }

  std::vector<GeoPoint> seeds;
  seeds.reserve(k);
  for (auto i : chosen) seeds.push_back(points[i]);
  return seeds;
}

Clustering kmeans(std::span<const GeoPoint> points, std::size_t k, std::uint64_t seed, std::size_t max_iter) {
  check_k(points.size(), k);
  const auto seeds = kmeanspp_seeds(points, k, seed);
  return kmeans_from(points, seeds, max_iter);
}

Clustering kmeans_from(std::span<const GeoPoint> points, std::span<const GeoPoint> initial_centroids,
                       std::size_t max_iter) {
  check_k(points.size(), initial_centroids.size());
  const auto proj = LocalProjection::about(points);
  std::vector<PlanarPoint> cents;
  cents.reserve(initial_centroids.size());
  for (const auto& c : initial_centroids) cents.push_back(proj.forward(c));
  return lloyd(points, proj, std::move(cents), max_iter);
}

double inertia(std::span<const GeoPoint> points, const Clustering& c) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    total += dist2(c.projection.forward(points[i]), c.planar_centroids[c.assignments[i]]);
  }
  return total;
}

std::vector<std::vector<GeoPoint>> split_areas(const PointCloud& cloud, std::size_t n_drones,
                                               std::uint64_t seed) {
  const auto clustering = kmeans(cloud.points, n_drones, seed);
  std::vector<std::vector<GeoPoint>> areas(n_drones);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    areas[clustering.assignments[i]].push_back(cloud.points[i]);
  }
  return areas;
}

}  // namespace sar
