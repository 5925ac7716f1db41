// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sar/geodesy.hpp"

namespace sar {

inline constexpr std::size_t kDefaultKmeansMaxIter = 100;

struct Clustering {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;  // per input point, in [0, k)
  std::vector<GeoPoint> centroids;
  std::vector<PlanarPoint> planar_centroids;
  LocalProjection projection;  // plane the clustering was computed in
  std::size_t iterations = 0;
  bool converged = false;
  /// Within-cluster sum of squared distances after each centroid update.
  std::vector<double> inertia_history;
};

/// Lloyd's k-means in the local projection of the cloud, seeded with
/// k-means++ from `seed`. Throws InvalidK unless 1 <= k <= |points|.
Clustering kmeans(std::span<const GeoPoint> points, std::size_t k, std::uint64_t seed,
                  std::size_t max_iter = kDefaultKmeansMaxIter);

/// Lloyd's iteration from caller-supplied initial centroids.
Clustering kmeans_from(std::span<const GeoPoint> points, std::span<const GeoPoint> initial_centroids,
                       std::size_t max_iter = kDefaultKmeansMaxIter);

/// The k-means++ seeding used by kmeans(), exposed so callers can reuse the
/// same starting centroids (for instance on a permuted copy of the input).
std::vector<GeoPoint> kmeanspp_seeds(std::span<const GeoPoint> points, std::size_t k, std::uint64_t seed);

/// Total within-cluster squared distance (m^2) for a given assignment.
double inertia(std::span<const GeoPoint> points, const Clustering& c);

/// One non-empty point set per drone; sets are disjoint and cover the input.
std::vector<std::vector<GeoPoint>> split_areas(const PointCloud& cloud, std::size_t n_drones,
                                               std::uint64_t seed);

}  // namespace sar
