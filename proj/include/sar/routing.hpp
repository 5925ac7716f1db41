// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sar/geodesy.hpp"

namespace sar {

struct GraphEdge {
  std::size_t to;
  double weight_m;
};

/// Undirected graph over geographic points; edge weights are haversine
/// meters between the endpoints.
class PointGraph {
 public:
  PointGraph() = default;
  explicit PointGraph(std::vector<GeoPoint> nodes);

  std::size_t add_node(const GeoPoint& p);
  /// Adds a symmetric edge weighted by the haversine distance. Self edges
  /// and duplicates are ignored; returns whether an edge was added.
  bool add_edge(std::size_t a, std::size_t b);

  std::size_t size() const noexcept { return nodes_.size(); }
  const GeoPoint& node(std::size_t i) const { return nodes_.at(i); }
  const std::vector<GeoPoint>& nodes() const noexcept { return nodes_; }
  std::span<const GraphEdge> neighbors(std::size_t i) const { return adjacency_.at(i); }
  bool has_edge(std::size_t a, std::size_t b) const;
  std::size_t edge_count() const noexcept { return edge_count_; }

  /// Edges added to join otherwise disconnected components.
  const std::vector<std::pair<std::size_t, std::size_t>>& bridges() const noexcept { return bridges_; }

  /// Connected-component label per node.
  std::vector<std::size_t> components() const;

 private:
  friend PointGraph build_graph(std::span<const GeoPoint>, double);

  std::vector<GeoPoint> nodes_;
  std::vector<std::vector<GraphEdge>> adjacency_;
  std::vector<std::pair<std::size_t, std::size_t>> bridges_;
  std::size_t edge_count_ = 0;
};

/// Links every pair of points closer than 1.5 x spacing (the 8-neighbourhood
/// of a square lattice), then bridges components through their closest pair
/// of points until the graph is connected.
PointGraph build_graph(std::span<const GeoPoint> points, double spacing_m);

struct GraphPath {
  std::vector<std::size_t> nodes;
  double cost_m = 0.0;
};

/// A* with the great-circle distance as heuristic. Throws Unreachable.
GraphPath astar(const PointGraph& g, std::size_t from, std::size_t to);

/// Shortest-path cost from `source` to every node (infinity if unreachable).
std::vector<double> shortest_costs_from(const PointGraph& g, std::size_t source);

/// Dense symmetric matrix of shortest-path costs.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  double& at(std::size_t i, std::size_t j) { return d_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

DistanceMatrix distance_matrix(const PointGraph& g);

/// Visit order starting at node 0, always moving to the closest unvisited node.
std::vector<std::size_t> nearest_neighbor_order(const DistanceMatrix& d);

/// Improves an order in place with segment reversals until no reversal
/// shortens it. Position 0 stays fixed. Returns the number of applied moves.
std::size_t two_opt(std::vector<std::size_t>& order, const DistanceMatrix& d, bool closed);

/// Moves runs of one to three consecutive stops (optionally reversed) to a
/// cheaper slot until none helps. Position 0 stays fixed.
std::size_t or_opt(std::vector<std::size_t>& order, const DistanceMatrix& d, bool closed);

/// Alternates 2-opt and Or-opt until neither applies. Returns the move count.
std::size_t improve_tour(std::vector<std::size_t>& order, const DistanceMatrix& d, bool closed);

double tour_length(std::span<const std::size_t> order, const DistanceMatrix& d, bool closed);

struct Route {
  int drone_id = 0;
  std::vector<GeoPoint> waypoints;      // waypoints[0] is the base
  std::vector<double> leg_lengths_m;    // one per consecutive waypoint pair
  double total_length_m = 0.0;
  double altitude_m = 0.0;
};

struct TourOptions {
  int drone_id = 0;
  double altitude_m = 0.0;
  bool return_to_base = false;
};

struct TourPlan {
  Route route;
  std::vector<std::size_t> visit_order;  // graph node indices; base is the last node
  double nearest_neighbor_length_m = 0.0;
  double length_m = 0.0;
  std::size_t improvement_moves = 0;  // 2-opt plus Or-opt
};

/// Tour over every node of `area_graph`, starting at `base`. The base is
/// linked to its nearest graph node; the visit order comes from
/// nearest-neighbour construction on shortest-path costs, refined with
/// 2-opt and Or-opt, and each hop is expanded into its A* path.
TourPlan plan_tour(const PointGraph& area_graph, const GeoPoint& base, const TourOptions& options = {});

struct MissionPlanRequest {
  double spacing_m = 50.0;
  std::size_t n_drones = 1;
  GeoPoint base{};
  std::uint64_t seed = 0;
  double altitude_m = 30.0;
  bool return_to_base = false;
  std::size_t max_grid_points = kDefaultGridCap;
};

struct MissionPlan {
  PointCloud grid;
  std::vector<std::vector<GeoPoint>> areas;
  std::vector<Route> routes;  // routes[i] covers areas[i]
};

/// Grid, k-means split and one tour per area. Areas are planned
/// concurrently; output order is area order.
MissionPlan plan_mission_routes(const SearchPolygon& poly, const MissionPlanRequest& request);

}  // namespace sar
