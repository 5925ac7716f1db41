// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <set>

#include "sar/random.hpp"
#include "sar/routing.hpp"
#include "support.hpp"

using namespace sar;
using sar::test::error_of;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Plain Dijkstra over the public adjacency; the oracle for A*.
std::vector<double> dijkstra(const PointGraph& g, std::size_t s) {
  std::vector<double> dist(g.size(), kInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[s] = 0.0;
  pq.push({0.0, s});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (const auto& e : g.neighbors(u)) {
      if (d + e.weight_m < dist[e.to]) {
        dist[e.to] = d + e.weight_m;
        pq.push({dist[e.to], e.to});
      }
    }
  }
  return dist;
}

std::vector<GeoPoint> lattice(const GeoPoint& sw, std::size_t rows, std::size_t cols, double s) {
  std::vector<GeoPoint> pts;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = destination_point(sw, 0.0, static_cast<double>(r) * s);
    for (std::size_t c = 0; c < cols; ++c) pts.push_back(destination_point(row, 90.0, static_cast<double>(c) * s));
  }
  return pts;
}

DistanceMatrix euclid_matrix(const std::vector<GeoPoint>& pts) {
  DistanceMatrix d(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) d.at(i, j) = haversine_distance(pts[i], pts[j]);
  }
  return d;
}

/// Best open path from node 0 through all nodes, by enumeration.
double exhaustive_open(const DistanceMatrix& d) {
  std::vector<std::size_t> rest(d.size() - 1);
  std::iota(rest.begin(), rest.end(), 1);
  double best = kInf;
  do {
    double len = 0.0;
    std::size_t prev = 0;
    for (auto v : rest) {
      len += d(prev, v);
      prev = v;
    }
    best = std::min(best, len);
  } while (std::next_permutation(rest.begin(), rest.end()));
  return best;
}

}  // namespace

TEST_CASE("3x3 lattice has the 8-neighbourhood edges") {
  const auto pts = lattice({28.4, -16.3, 0}, 3, 3, 50.0);
  const auto g = build_graph(pts, 50.0);
  CHECK(g.size() == 9);
  CHECK(g.edge_count() == 20);  // 6 horizontal + 6 vertical + 8 diagonal
  CHECK(g.bridges().empty());
  CHECK(g.has_edge(0, 4));
  CHECK_FALSE(g.has_edge(0, 2));
  for (std::size_t u = 0; u < g.size(); ++u) {
    for (const auto& e : g.neighbors(u)) {
      CHECK(e.weight_m == doctest::Approx(haversine_distance(g.node(u), g.node(e.to))));
    }
  }
}

TEST_CASE("separate clusters are bridged into one component") {
  auto pts = lattice({28.4, -16.3, 0}, 2, 2, 50.0);
  const auto far = lattice(destination_point({28.4, -16.3, 0}, 90.0, 1000.0), 2, 2, 50.0);
  pts.insert(pts.end(), far.begin(), far.end());
  const auto g = build_graph(pts, 50.0);
  CHECK(g.bridges().size() == 1);
  const auto comp = g.components();
  CHECK(std::set<std::size_t>(comp.begin(), comp.end()).size() == 1);
}

TEST_CASE("add_edge ignores self loops and duplicates") {
  PointGraph g;
  const auto a = g.add_node({0, 0, 0});
  const auto b = g.add_node({0, 0.001, 0});
  CHECK(g.add_edge(a, b));
  CHECK_FALSE(g.add_edge(b, a));
  CHECK_FALSE(g.add_edge(a, a));
  CHECK(g.edge_count() == 1);
}

TEST_CASE("A* matches Dijkstra on random lattice graphs") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t rows = 3 + rng.below(8), cols = 3 + rng.below(8);
    auto all = lattice({-30.0 + rng.uniform01() * 60.0, rng.uniform01() * 100.0, 0}, rows, cols, 40.0);
    std::vector<GeoPoint> kept;
    for (const auto& p : all) {
      if (rng.uniform01() > 0.25) kept.push_back(p);
    }
    if (kept.size() < 2) continue;
    const auto g = build_graph(kept, 40.0);
    for (int q = 0; q < 5; ++q) {
      const auto s = rng.below(g.size()), t = rng.below(g.size());
      const auto oracle = dijkstra(g, s);
      const auto path = astar(g, s, t);
      CHECK(path.cost_m == doctest::Approx(oracle[t]).epsilon(1e-12));
      REQUIRE_FALSE(path.nodes.empty());
      CHECK(path.nodes.front() == s);
      CHECK(path.nodes.back() == t);
      double walked = 0.0;
      for (std::size_t i = 1; i < path.nodes.size(); ++i) {
        REQUIRE(g.has_edge(path.nodes[i - 1], path.nodes[i]));
        walked += haversine_distance(g.node(path.nodes[i - 1]), g.node(path.nodes[i]));
      }
      CHECK(walked == doctest::Approx(path.cost_m).epsilon(1e-12));
      const auto costs = shortest_costs_from(g, s);
      CHECK(costs[t] == doctest::Approx(oracle[t]).epsilon(1e-12));
    }
  }
}

TEST_CASE("A* reports unreachable targets") {
  PointGraph g;
  g.add_node({0, 0, 0});
  g.add_node({0, 1, 0});
  CHECK(error_of([&] { (void)astar(g, 0, 1); }) == ErrorCode::Unreachable);
  CHECK(error_of([&] { (void)astar(g, 0, 5); }) == ErrorCode::InvalidArgument);
  CHECK(astar(g, 0, 0).cost_m == 0.0);
}

TEST_CASE("distance matrix is symmetric shortest paths") {
  const auto pts = lattice({10, 10, 0}, 4, 5, 30.0);
  const auto g = build_graph(pts, 30.0);
  const auto d = distance_matrix(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto oracle = dijkstra(g, i);
    for (std::size_t j = 0; j < g.size(); ++j) {
      CHECK(d(i, j) == doctest::Approx(oracle[j]).epsilon(1e-12));
      CHECK(d(i, j) == d(j, i));
    }
  }
}

TEST_CASE("tour heuristics against exhaustive optimum") {
  Rng rng(31337);
  for (int c = 0; c < 50; ++c) {
    const std::size_t n = 3 + c % 6;  // 3..8 points
    std::vector<GeoPoint> pts;
    for (std::size_t i = 0; i < n; ++i) {
      pts.push_back({28.4 + rng.uniform01() * 0.01, -16.3 + rng.uniform01() * 0.01, 0});
    }
    const auto d = euclid_matrix(pts);
    auto order = nearest_neighbor_order(d);
    REQUIRE(order.size() == n);
    REQUIRE(order.front() == 0);
    const double nn = tour_length(order, d, false);
    auto two_opted = order;
    two_opt(two_opted, d, false);
    CHECK(tour_length(two_opted, d, false) <= nn + 1e-9);
    improve_tour(order, d, false);
    const double improved = tour_length(order, d, false);
    const double optimum = exhaustive_open(d);
    CAPTURE(c);
    CHECK(improved <= nn + 1e-9);
    CHECK(improved >= optimum - 1e-9);
    CHECK(improved <= 1.25 * optimum + 1e-9);
    CHECK(order.front() == 0);
    CHECK(std::set<std::size_t>(order.begin(), order.end()).size() == n);
  }
}

TEST_CASE("closed 2-opt and Or-opt never lengthen the tour") {
  Rng rng(4);
  for (int c = 0; c < 30; ++c) {
    std::vector<GeoPoint> pts;
    for (int i = 0; i < 12; ++i) pts.push_back({rng.uniform01() * 0.02, rng.uniform01() * 0.02, 0});
    const auto d = euclid_matrix(pts);
    auto order = nearest_neighbor_order(d);
    const double before = tour_length(order, d, true);
    two_opt(order, d, true);
    const double after_two_opt = tour_length(order, d, true);
    CHECK(after_two_opt <= before + 1e-9);
    or_opt(order, d, true);
    CHECK(tour_length(order, d, true) <= after_two_opt + 1e-9);
    CHECK(std::set<std::size_t>(order.begin(), order.end()).size() == 12);
  }
}

TEST_CASE("plan_tour visits every node starting from the base") {
  const auto rect = SearchPolygon::rectangle({28.45, -16.30, 0}, 400.0, 300.0);
  const auto grid = generate_grid(rect, 50.0);
  const auto g = build_graph(grid.points, 50.0);
  const GeoPoint base = destination_point(rect.vertices()[0], 225.0, 80.0);
  for (bool closed : {false, true}) {
    TourOptions opts;
    opts.drone_id = 3;
    opts.altitude_m = 25.0;
    opts.return_to_base = closed;
    const auto plan = plan_tour(g, base, opts);
    const auto& r = plan.route;
    CHECK(r.drone_id == 3);
    CHECK(r.altitude_m == 25.0);
    REQUIRE_FALSE(r.waypoints.empty());
    CHECK(r.waypoints.front() == base);
    if (closed) CHECK(r.waypoints.back() == base);
    CHECK(r.leg_lengths_m.size() + 1 == r.waypoints.size());
    CHECK(std::accumulate(r.leg_lengths_m.begin(), r.leg_lengths_m.end(), 0.0) ==
          doctest::Approx(r.total_length_m));
    CHECK(plan.length_m <= plan.nearest_neighbor_length_m + 1e-9);
    CHECK(r.total_length_m == doctest::Approx(plan.length_m).epsilon(1e-9));
    std::set<std::pair<double, double>> visited;
    for (const auto& w : r.waypoints) visited.insert({w.lat, w.lon});
    for (const auto& p : grid.points) CHECK(visited.count({p.lat, p.lon}) == 1);
  }
}

TEST_CASE("plan_mission_routes gives one route per drone") {
  const auto rect = SearchPolygon::rectangle({28.45, -16.30, 0}, 600.0, 500.0);
  MissionPlanRequest req;
  req.spacing_m = 50.0;
  req.n_drones = 3;
  req.base = rect.vertices()[0];
  req.seed = 11;
  const auto plan = plan_mission_routes(rect, req);
  REQUIRE(plan.routes.size() == 3);
  REQUIRE(plan.areas.size() == 3);
  std::size_t covered = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(plan.routes[i].drone_id == static_cast<int>(i));
    CHECK(plan.routes[i].waypoints.front() == req.base);
    covered += plan.areas[i].size();
  }
  CHECK(covered == plan.grid.points.size());
  const auto again = plan_mission_routes(rect, req);
  for (std::size_t i = 0; i < 3; ++i) CHECK(again.routes[i].waypoints == plan.routes[i].waypoints);

  req.n_drones = 0;
  CHECK(error_of([&] { (void)plan_mission_routes(rect, req); }) == ErrorCode::InvalidK);
}
