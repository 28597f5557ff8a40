#include "modrecip/potential.hpp"

#include "modrecip/families.hpp"
#include "modrecip/shortest_path.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace modrecip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Side opposite(Side s) { return Side((int(s) + 2) % 4); }

std::vector<Seed> side_seeds(const MetricGrid& grid, Side side) {
  std::vector<Seed> seeds;
  for (Index v : grid.side_nodes(side)) seeds.push_back({v, 0.0});
  return seeds;
}

bool in_mask(const MetricGrid& grid, const std::vector<char>& mask, Index v) {
  return grid.active(v) && (mask.empty() || mask[std::size_t(v)]);
}

}  // namespace

ChainPotential chain_potential(const MetricGrid& grid, const Density& g, Side source,
                               double step_radius, double epsilon_floor) {
  validate_density(grid, g);
  if (!(epsilon_floor > 0)) throw std::invalid_argument("chain_potential: epsilon must be positive");
  if (step_radius <= 0) step_radius = 3.0 * grid.spacing();
  if (step_radius < grid.spacing() * (1.0 - 1e-12))
    throw std::invalid_argument("chain_potential: step radius is below the lattice spacing");

  ChainPotential pot;
  pot.grid = &grid;
  pot.g = g.cwiseMax(epsilon_floor);
  pot.step_radius = step_radius;
  pot.source = source;
  pot.sink = opposite(source);
  const auto offsets = ball_offsets(grid, step_radius);
  const auto tree = grid_dijkstra(grid, side_seeds(grid, source), offsets, [&](Index a, Index b) {
    return pot.g(a) * grid.edge_length(a, b);
  });
  pot.F = tree.dist;
  pot.u = pot.F.cwiseMin(1.0);
  return pot;
}

ChainPotential normalize_on_sink(const ChainPotential& pot) {
  double least = kInf;
  for (Index v : pot.grid->side_nodes(pot.sink)) least = std::min(least, pot.u(v));
  if (!(least > 0) || !std::isfinite(least))
    throw std::domain_error("normalize_on_sink: potential vanishes on the sink");
  ChainPotential out = pot;
  out.u = (pot.u / least).cwiseMin(1.0);
  out.g = pot.g / least;
  out.F = pot.F / least;
  return out;
}

double lipschitz_excess(const MetricGrid& grid, const Eigen::VectorXd& u, const Density& g,
                        double radius) {
  double worst = -kInf;
  const auto offsets = ball_offsets(grid, radius);
  for (Index x = 0; x < grid.size(); ++x) {
    if (!grid.active(x)) continue;
    for (const Offset& o : offsets) {
      const int i = grid.column(x) + o.di, j = grid.row(x) + o.dj;
      if (!grid.contains(i, j)) continue;
      const Index y = grid.node(i, j);
      if (!grid.active(y)) continue;
      const double du = (u(x) == u(y)) ? 0.0 : std::abs(u(x) - u(y));
      worst = std::max(worst, du - std::max(g(x), g(y)) * grid.edge_length(x, y));
    }
  }
  return worst;
}

Eigen::VectorXd capacity_potential(const MetricGrid& grid, const Density& g, Side source) {
  validate_density(grid, g);
  const auto tree = grid_dijkstra(grid, side_seeds(grid, source), king_offsets(),
                                  [&](Index a, Index b) {
                                    return 0.5 * (g(a) + g(b)) * grid.edge_length(a, b);
                                  });
  return tree.dist.cwiseMin(1.0);
}

LevelSetSlice level_set_boundary(const ChainPotential& pot, double t) {
  if (!(t > 0 && t < 1)) throw std::invalid_argument("level_set_boundary: t must lie in (0, 1)");
  const MetricGrid& grid = *pot.grid;
  LevelSetSlice slice;
  slice.t = t;

  std::vector<char> side(std::size_t(grid.size()), 0);  // 1 = source, 2 = sink
  for (Index v : grid.side_nodes(pot.source)) side[std::size_t(v)] = 1;
  for (Index v : grid.side_nodes(pot.sink)) side[std::size_t(v)] = 2;

  bool any_sub = false, any_super = false;
  std::vector<char> interface(std::size_t(grid.size()), 0);
  for (Index v = 0; v < grid.size(); ++v) {
    if (!grid.active(v) || side[std::size_t(v)] == 1) continue;
    if (pot.u(v) >= t) {
      any_super = true;
      continue;
    }
    if (side[std::size_t(v)] == 2) continue;
    any_sub = true;
    const int i = grid.column(v), j = grid.row(v);
    for (const Offset& o : king_offsets()) {
      if (!grid.contains(i + o.di, j + o.dj)) continue;
      const Index w = grid.node(i + o.di, j + o.dj);
      if (grid.active(w) && side[std::size_t(w)] != 1 && pot.u(w) >= t) {
        interface[std::size_t(v)] = 1;
        slice.boundary_nodes.push_back(v);
        break;
      }
    }
  }
  if (!any_sub || !any_super || slice.boundary_nodes.empty()) {
    slice.empty = true;
    slice.boundary_nodes.clear();
    return slice;
  }
  const auto [from, to] = opposite_pair(pot.source, pot.sink);
  auto cut = shortest_dual_path(grid, from, to, Density::Ones(grid.size()), interface);
  if (cut.curve.empty()) return slice;
  slice.spanning = true;
  slice.h1_measure = cut.constraint.total;
  slice.path = std::move(cut.constraint);
  return slice;
}

InequalityCheck coarea_check(const ChainPotential& pot, const Density& rho, int num_levels) {
  if (num_levels < 16) throw std::invalid_argument("coarea_check: need at least 16 levels");
  const MetricGrid& grid = *pot.grid;
  validate_density(grid, rho);
  InequalityCheck out;
  const double dt = 1.0 / num_levels;
  for (int k = 0; k < num_levels; ++k) {
    const auto slice = level_set_boundary(pot, (k + 0.5) * dt);
    if (slice.spanning) out.lhs += dt * slice.path.integrate(rho);
  }
  out.rhs = grid.constants().coarea_const *
            (rho.array() * pot.g.array() * grid.measures().array()).sum();
  out.ratio = out.rhs > 0 ? out.lhs / out.rhs : (out.lhs > 0 ? kInf : 0.0);
  return out;
}

double lipschitz_estimate(const MetricGrid& grid, const Eigen::VectorXd& u,
                          const std::vector<char>& mask) {
  double lip = 0.0;
  for (Index x = 0; x < grid.size(); ++x) {
    if (!in_mask(grid, mask, x)) continue;
    const int i = grid.column(x), j = grid.row(x);
    for (const Offset& o : king_offsets()) {
      if (!grid.contains(i + o.di, j + o.dj)) continue;
      const Index y = grid.node(i + o.di, j + o.dj);
      if (y < x || !in_mask(grid, mask, y)) continue;
      lip = std::max(lip, std::abs(u(x) - u(y)) / grid.edge_length(x, y));
    }
  }
  return lip;
}

InequalityCheck eilenberg_check(const MetricGrid& grid, const Eigen::VectorXd& u,
                                const std::vector<char>& mask, int num_levels) {
  if (u.size() != grid.size() || !u.allFinite())
    throw std::invalid_argument("eilenberg_check: u must be finite, one value per node");
  if (num_levels < 1) throw std::invalid_argument("eilenberg_check: need at least one level");
  InequalityCheck out;
  double measure = 0.0;
  double lo = kInf, hi = -kInf;
  for (Index v = 0; v < grid.size(); ++v) {
    if (!in_mask(grid, mask, v)) continue;
    measure += grid.cell_measure(v);
    lo = std::min(lo, u(v));
    hi = std::max(hi, u(v));
  }
  out.rhs = grid.constants().coarea_const * lipschitz_estimate(grid, u, mask) * measure;
  if (!(hi > lo)) return out;

  const double dt = (hi - lo) / num_levels;
  const int n = grid.n();
  for (int j = 0; j + 1 < n; ++j)
    for (int i = 0; i + 1 < n; ++i) {
      const Index a = grid.node(i, j), b = grid.node(i + 1, j), c = grid.node(i, j + 1),
                  d = grid.node(i + 1, j + 1);
      for (const std::array<Index, 3>& tri : {std::array<Index, 3>{a, b, d}, {a, d, c}}) {
        if (!std::all_of(tri.begin(), tri.end(), [&](Index v) { return in_mask(grid, mask, v); }))
          continue;
        double tmin = kInf, tmax = -kInf, wsum = 0.0;
        for (Index v : tri) {
          tmin = std::min(tmin, u(v));
          tmax = std::max(tmax, u(v));
          wsum += grid.weight(v);
        }
        if (!(tmax > tmin)) continue;
        const int k0 = std::max(0, int(std::ceil((tmin - lo) / dt - 0.5)));
        const int k1 = std::min(num_levels - 1, int(std::floor((tmax - lo) / dt - 0.5)));
        for (int k = k0; k <= k1; ++k) {
          const double t = lo + (k + 0.5) * dt;
          std::array<Eigen::Vector2d, 2> ends;
          int found = 0;
          for (int e = 0; e < 3 && found < 2; ++e) {
            const Index p = tri[std::size_t(e)], q = tri[std::size_t((e + 1) % 3)];
            if ((u(p) < t) == (u(q) < t)) continue;
            const double s = (t - u(p)) / (u(q) - u(p));
            ends[std::size_t(found++)] = grid.position(p) + s * (grid.position(q) - grid.position(p));
          }
          if (found == 2)
            out.lhs += dt * step_length(grid.norm(), (ends[1] - ends[0]).eval(), wsum / 3.0);
        }
      }
    }
  out.ratio = out.rhs > 0 ? out.lhs / out.rhs : (out.lhs > 0 ? kInf : 0.0);
  return out;
}

}  // namespace modrecip
