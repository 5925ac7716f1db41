// SPDX-License-Identifier: Apache-2.0
#include "sar/routing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <tuple>
#include <unordered_map>

#include "sar/error.hpp"
#include "sar/partition.hpp"

namespace sar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Heuristic is shrunk a hair below the true great-circle distance so that
// floating-point noise can never make it overestimate.
constexpr double kHeuristicScale = 1.0 - 1e-9;

// Improvements smaller than this are treated as ties by 2-opt.
constexpr double kTwoOptEps = 1e-7;

struct CellKey {
  long long x, y;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    return std::hash<long long>{}(k.x * 73856093LL ^ k.y * 19349663LL);
  }
};

}  // namespace

PointGraph::PointGraph(std::vector<GeoPoint> nodes)
    : nodes_(std::move(nodes)), adjacency_(nodes_.size()) {}

std::size_t PointGraph::add_node(const GeoPoint& p) {
  nodes_.push_back(p);
  adjacency_.emplace_back();
  return nodes_.size() - 1;
}

bool PointGraph::add_edge(std::size_t a, std::size_t b) {
  if (a == b || a >= nodes_.size() || b >= nodes_.size() || has_edge(a, b)) return false;
  const double w = haversine_distance(nodes_[a], nodes_[b]);
  adjacency_[a].push_back({b, w});
  adjacency_[b].push_back({a, w});
  ++edge_count_;
  return true;
}

bool PointGraph::has_edge(std::size_t a, std::size_t b) const {
  const auto& adj = adjacency_.at(a);
  return std::any_of(adj.begin(), adj.end(), [b](const GraphEdge& e) { return e.to == b; });
}

std::vector<std::size_t> PointGraph::components() const {
  constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> label(nodes_.size(), kUnset);
  std::size_t next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < nodes_.size(); ++s) {
    if (label[s] != kUnset) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (const auto& e : adjacency_[u]) {
        if (label[e.to] == kUnset) {
          label[e.to] = next;
          stack.push_back(e.to);
        }
      }
    }
    ++next;
  }
  return label;
}

PointGraph build_graph(std::span<const GeoPoint> points, double spacing_m) {
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "cannot build a graph without points");
  if (!(spacing_m > 0.0)) throw Error(ErrorCode::InvalidArgument, "spacing must be > 0");

  PointGraph g(std::vector<GeoPoint>(points.begin(), points.end()));
  const double radius = 1.5 * spacing_m;

  const auto proj = LocalProjection::about(points);
  std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> cells;
  std::vector<CellKey> key_of(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto q = proj.forward(points[i]);
    key_of[i] = {static_cast<long long>(std::floor(q.x / radius)), static_cast<long long>(std::floor(q.y / radius))};
    cells[key_of[i]].push_back(i);
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        const auto it = cells.find({key_of[i].x + dx, key_of[i].y + dy});
        if (it == cells.end()) continue;
        for (const auto j : it->second) {
          if (j <= i) continue;
          const double d = haversine_distance(points[i], points[j]);
          if (d > 0.0 && d <= radius) g.add_edge(i, j);
        }
      }
    }
  }

  // Prim's algorithm over components: grow a connected core and repeatedly
  // attach the component containing the point closest to it.
  const auto label = g.components();
  const std::size_t n_comp = label.empty() ? 0 : *std::max_element(label.begin(), label.end()) + 1;
  if (n_comp > 1) {
    std::vector<std::vector<std::size_t>> members(n_comp);
    for (std::size_t i = 0; i < label.size(); ++i) members[label[i]].push_back(i);
    std::vector<bool> in_core(points.size(), false);
    std::vector<double> best(points.size(), kInf);
    std::vector<std::size_t> best_from(points.size(), 0);
    auto absorb = [&](std::size_t comp) {
      for (auto u : members[comp]) in_core[u] = true;
      for (auto u : members[comp]) {
        for (std::size_t v = 0; v < points.size(); ++v) {
          if (in_core[v]) continue;
          const double d = haversine_distance(points[u], points[v]);
          if (d < best[v]) {
            best[v] = d;
            best_from[v] = u;
          }
        }
      }
    };
    absorb(0);
    for (std::size_t joined = 1; joined < n_comp; ++joined) {
      std::size_t pick = points.size();
      for (std::size_t v = 0; v < points.size(); ++v) {
        if (!in_core[v] && (pick == points.size() || best[v] < best[pick])) pick = v;
      }
      g.add_edge(best_from[pick], pick);
      g.bridges_.emplace_back(best_from[pick], pick);
      absorb(label[pick]);
    }
  }
  return g;
}

GraphPath astar(const PointGraph& g, std::size_t from, std::size_t to) {
  if (from >= g.size() || to >= g.size()) {
    throw Error(ErrorCode::InvalidArgument, "A* endpoint is not a graph node");
  }
  if (from == to) return {{from}, 0.0};

  const auto& goal = g.node(to);
  std::vector<double> g_score(g.size(), kInf);
  std::vector<std::size_t> parent(g.size(), g.size());
  using Entry = std::tuple<double, double, std::size_t>;  // f, g, node
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  g_score[from] = 0.0;
  open.emplace(haversine_distance(g.node(from), goal) * kHeuristicScale, 0.0, from);
  while (!open.empty()) {
    const auto [f, cost, u] = open.top();
    open.pop();
    if (cost > g_score[u]) continue;  // stale entry
    if (u == to) break;
    for (const auto& e : g.neighbors(u)) {
      const double next = cost + e.weight_m;
      if (next < g_score[e.to]) {
        g_score[e.to] = next;
        parent[e.to] = u;
        open.emplace(next + haversine_distance(g.node(e.to), goal) * kHeuristicScale, next, e.to);
      }
    }
  }
  if (g_score[to] == kInf) {
    throw Error(ErrorCode::Unreachable, "no path from node " + std::to_string(from) + " to " + std::to_string(to));
  }
  GraphPath path;
  path.cost_m = g_score[to];
  for (std::size_t v = to; v != g.size(); v = parent[v]) path.nodes.push_back(v);
  std::reverse(path.nodes.begin(), path.nodes.end());
  return path;
}

std::vector<double> shortest_costs_from(const PointGraph& g, std::size_t source) {
  std::vector<double> dist(g.size(), kInf);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  dist.at(source) = 0.0;
  open.emplace(0.0, source);
  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    if (d > dist[u]) continue;
    for (const auto& e : g.neighbors(u)) {
      const double next = d + e.weight_m;
      if (next < dist[e.to]) {
        dist[e.to] = next;
        open.emplace(next, e.to);
      }
    }
  }
  return dist;
}

DistanceMatrix distance_matrix(const PointGraph& g) {
  DistanceMatrix m(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto row = shortest_costs_from(g, i);
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (row[j] == kInf) {
        throw Error(ErrorCode::Unreachable, "graph is disconnected between " + std::to_string(i) + " and " +
                                                std::to_string(j));
      }
      m.at(i, j) = row[j];
    }
  }
  // Symmetrise so forward and reverse sums of a tour agree bit for bit.
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      const double v = std::min(m(i, j), m(j, i));
      m.at(i, j) = v;
      m.at(j, i) = v;
    }
  }
  return m;
}

std::vector<std::size_t> nearest_neighbor_order(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  std::vector<std::size_t> order;
  if (n == 0) return order;
  std::vector<bool> visited(n, false);
  order.reserve(n);
  order.push_back(0);
  visited[0] = true;
  for (std::size_t step = 1; step < n; ++step) {
    const auto cur = order.back();
    std::size_t best = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (!visited[j] && (best == n || d(cur, j) < d(cur, best))) best = j;
    }
    visited[best] = true;
    order.push_back(best);
  }
  return order;
}

std::size_t or_opt(std::vector<std::size_t>& order, const DistanceMatrix& d, bool closed) {
  const std::size_t n = order.size();
  std::size_t moves = 0;
  if (n < 3) return moves;
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t len = 1; len <= 3 && len + 1 < n; ++len) {
      for (std::size_t i = 1; i + len <= n && !improved; ++i) {
        const std::size_t k = i + len - 1;
        const auto first = order[i];
        const auto last = order[k];
        const auto prev = order[i - 1];
        const bool has_next = k + 1 < n || closed;
        const auto next = k + 1 < n ? order[k + 1] : order[0];
        double gain = d(prev, first);
        if (has_next) gain += d(last, next) - d(prev, next);

        // Positions in the sequence with the segment taken out.
        const std::size_t m = n - len;
        auto at = [&](std::size_t q) { return q < i ? order[q] : order[q + len]; };
        for (std::size_t p = 1; p <= m; ++p) {
          if (p == i) continue;  // original slot
          const auto u = at(p - 1);
          const bool has_v = p < m || closed;
          const auto v = p < m ? at(p) : at(0);
          for (bool reversed : {false, true}) {
            const auto a = reversed ? last : first;
            const auto b = reversed ? first : last;
            double add = d(u, a);
            if (has_v) add += d(b, v) - d(u, v);
            if (add - gain < -kTwoOptEps) {
              std::vector<std::size_t> segment(order.begin() + static_cast<std::ptrdiff_t>(i),
                                               order.begin() + static_cast<std::ptrdiff_t>(k) + 1);
              if (reversed) std::reverse(segment.begin(), segment.end());
              std::vector<std::size_t> next_order;
              next_order.reserve(n);
              for (std::size_t q = 0; q < m; ++q) {
                if (q == p) next_order.insert(next_order.end(), segment.begin(), segment.end());
                next_order.push_back(at(q));
              }
              if (p == m) next_order.insert(next_order.end(), segment.begin(), segment.end());
              order = std::move(next_order);
              ++moves;
              improved = true;
              break;
            }
          }
          if (improved) break;
        }
      }
      if (improved) break;
    }
  }
  return moves;
}

std::size_t improve_tour(std::vector<std::size_t>& order, const DistanceMatrix& d, bool closed) {
  std::size_t total = 0;
  for (;;) {
    const std::size_t moves = two_opt(order, d, closed) + or_opt(order, d, closed);
    if (moves == 0) return total;
    total += moves;
  }
}

double tour_length(std::span<const std::size_t> order, const DistanceMatrix& d, bool closed) {
  double total = 0.0;
  for (std::size_t i = 1; i < order.size(); ++i) total += d(order[i - 1], order[i]);
  if (closed && order.size() > 1) total += d(order.back(), order.front());
  return total;
}

std::size_t two_opt(std::vector<std::size_t>& order, const DistanceMatrix& d, bool closed) {
  const std::size_t n = order.size();
  std::size_t moves = 0;
  if (n < 3) return moves;
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        // Reverse order[i..j]; the edge after j exists unless the tour is
        // open and j is the last position.
        const auto a = order[i - 1];
        const auto b = order[i];
        const auto c = order[j];
        const bool has_next = j + 1 < n || closed;
        const auto e = j + 1 < n ? order[j + 1] : order[0];
        double delta = d(a, c) - d(a, b);
        if (has_next) delta += d(b, e) - d(c, e);
        if (delta < -kTwoOptEps) {
          std::reverse(order.begin() + static_cast<std::ptrdiff_t>(i),
                       order.begin() + static_cast<std::ptrdiff_t>(j) + 1);
          ++moves;
          improved = true;
        }
      }
    }
  }
  return moves;
}

TourPlan plan_tour(const PointGraph& area_graph, const GeoPoint& base, const TourOptions& options) {
  if (area_graph.size() == 0) throw Error(ErrorCode::InvalidArgument, "area has no points");

  PointGraph g = area_graph;
  const std::size_t base_node = g.add_node(base);
  std::size_t nearest = 0;
  double nearest_d = kInf;
  for (std::size_t i = 0; i < base_node; ++i) {
    const double d = haversine_distance(base, g.node(i));
    if (d < nearest_d) {
      nearest_d = d;
      nearest = i;
    }
  }
  if (!g.add_edge(base_node, nearest)) {
    throw Error(ErrorCode::Unreachable, "could not link base to the area");
  }

  // Matrix index 0 is the base, index k >= 1 is graph node k - 1.
  const auto full = distance_matrix(g);
  const std::size_t n = g.size();
  DistanceMatrix d(n);
  auto node_of = [&](std::size_t idx) { return idx == 0 ? base_node : idx - 1; };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d.at(i, j) = full(node_of(i), node_of(j));
  }

  auto order = nearest_neighbor_order(d);
  TourPlan plan;
  plan.nearest_neighbor_length_m = tour_length(order, d, options.return_to_base);
  plan.improvement_moves = improve_tour(order, d, options.return_to_base);
  plan.length_m = tour_length(order, d, options.return_to_base);
  if (options.return_to_base) order.push_back(0);

  Route& route = plan.route;
  route.drone_id = options.drone_id;
  route.altitude_m = options.altitude_m;
  route.waypoints.push_back(base);
  for (std::size_t i = 0; i < order.size(); ++i) {
    plan.visit_order.push_back(node_of(order[i]));
    if (i == 0) continue;
    const auto path = astar(g, node_of(order[i - 1]), node_of(order[i]));
    for (std::size_t k = 1; k < path.nodes.size(); ++k) {
      const auto& prev = route.waypoints.back();
      const auto& next = g.node(path.nodes[k]);
      route.leg_lengths_m.push_back(haversine_distance(prev, next));
      route.waypoints.push_back(next);
    }
  }
  route.total_length_m = std::accumulate(route.leg_lengths_m.begin(), route.leg_lengths_m.end(), 0.0);
  return plan;
}

MissionPlan plan_mission_routes(const SearchPolygon& poly, const MissionPlanRequest& request) {
  if (request.n_drones < 1) throw Error(ErrorCode::InvalidK, "at least one drone is required");
  if (!is_valid(request.base)) throw Error(ErrorCode::InvalidArgument, "base point out of range");
  MissionPlan plan;
  plan.grid = generate_grid(poly, request.spacing_m, request.max_grid_points);
  plan.areas = split_areas(plan.grid, request.n_drones, request.seed);

  std::vector<std::future<Route>> pending;
  pending.reserve(plan.areas.size());
  for (std::size_t i = 0; i < plan.areas.size(); ++i) {
    pending.push_back(std::async(std::launch::async, [&, i] {
      const auto graph = build_graph(plan.areas[i], request.spacing_m);
      TourOptions opts;
      opts.drone_id = static_cast<int>(i);
      opts.altitude_m = request.altitude_m;
      opts.return_to_base = request.return_to_base;
      return plan_tour(graph, request.base, opts).route;
    }));
  }
  for (auto& f : pending) plan.routes.push_back(f.get());
  return plan;
}

}  // namespace sar
