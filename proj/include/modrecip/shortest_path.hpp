// Multi-source Dijkstra on the lattice with arbitrary neighbour stencils.
#pragma once

#include "modrecip/grid.hpp"

#include <Eigen/Core>

#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <tuple>
#include <vector>

namespace modrecip {

struct Offset {
  int di;
  int dj;
};

/// The 8-neighbourhood (king moves).
std::span<const Offset> king_offsets();

/// All nonzero lattice offsets whose unweighted norm length is at most radius.
std::vector<Offset> ball_offsets(const MetricGrid& grid, double radius);

struct Seed {
  Index node;
  double cost;
};

struct PathTree {
  Eigen::VectorXd dist;  // +inf when unreachable
  std::vector<int> hops;
  std::vector<Index> parent;  // -1 at seeds and unreachable nodes

  bool reached(Index v) const { return dist(v) < std::numeric_limits<double>::infinity(); }
  /// Node sequence from the seed to v, empty if v is unreachable.
  std::vector<Index> path_to(Index v) const;
};

/// Settles nodes in lexicographic order of (distance, hop count, node index),
/// so ties resolve identically on every run. `edge_cost(from, to)` must be
/// nonnegative. Nodes with allowed[v] == 0 are never entered; an empty
/// `allowed` admits every active node.
template <typename EdgeCost>
PathTree grid_dijkstra(const MetricGrid& grid, std::span<const Seed> seeds,
                       std::span<const Offset> offsets, EdgeCost&& edge_cost,
                       const std::vector<char>& allowed = {}) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const Index size = grid.size();
  PathTree tree{Eigen::VectorXd::Constant(size, inf), std::vector<int>(std::size_t(size), 0),
                std::vector<Index>(std::size_t(size), -1)};
  auto open = [&](Index v) {
    return grid.active(v) && (allowed.empty() || allowed[std::size_t(v)]);
  };

  using Key = std::tuple<double, int, Index>;
  std::priority_queue<Key, std::vector<Key>, std::greater<Key>> heap;
  for (const Seed& s : seeds) {
    if (!open(s.node)) continue;
    if (s.cost < tree.dist(s.node)) {
      tree.dist(s.node) = s.cost;
      heap.emplace(s.cost, 0, s.node);
    }
  }
  std::vector<char> done(std::size_t(size), 0);
  while (!heap.empty()) {
    const auto [d, h, v] = heap.top();
    heap.pop();
    if (done[std::size_t(v)]) continue;
    done[std::size_t(v)] = 1;
    const int i = grid.column(v), j = grid.row(v);
    for (const Offset& o : offsets) {
      if (!grid.contains(i + o.di, j + o.dj)) continue;
      const Index w = grid.node(i + o.di, j + o.dj);
      if (done[std::size_t(w)] || !open(w)) continue;
      const double nd = d + edge_cost(v, w);
      const int nh = h + 1;
      if (nd < tree.dist(w) || (nd == tree.dist(w) && nh < tree.hops[std::size_t(w)]) ||
          (nd == tree.dist(w) && nh == tree.hops[std::size_t(w)] && v < tree.parent[std::size_t(w)])) {
        tree.dist(w) = nd;
        tree.hops[std::size_t(w)] = nh;
        tree.parent[std::size_t(w)] = v;
        heap.emplace(nd, nh, w);
      }
    }
  }
  return tree;
}

}  // namespace modrecip
