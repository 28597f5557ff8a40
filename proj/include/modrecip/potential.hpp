// Potentials built by integrating an upper gradient from a side, and the
// level-set estimates (coarea, Eilenberg) evaluated on them.
#pragma once

#include "modrecip/curves.hpp"
#include "modrecip/grid.hpp"

#include <Eigen/Core>

#include <vector>

namespace modrecip {

/// F(x) = inf over chains p_0 in E, ..., p_n = x with steps of length at most
/// step_radius of sum g(p_k) d(p_k, p_{k+1}); u = min(F, 1).
struct ChainPotential {
  const MetricGrid* grid = nullptr;
  Density g;  // floored at epsilon
  double step_radius = 0.0;
  Eigen::VectorXd F;  // +inf where no chain arrives
  Eigen::VectorXd u;
  Side source = Side::A;
  Side sink = Side::C;
};

/// step_radius <= 0 selects the default of three lattice spacings. Radii
/// below the spacing leave the chain graph disconnected and are rejected.
ChainPotential chain_potential(const MetricGrid& grid, const Density& g, Side source,
                               double step_radius = 0.0, double epsilon_floor = 1e-9);

/// Divides u and g by a = min of u over the sink side (then clamps u at 1),
/// so that u = 1 on the sink. Throws if a == 0.
ChainPotential normalize_on_sink(const ChainPotential& pot);

/// Worst value of |u(x) - u(y)| - max(g(x), g(y)) d(x, y) over pairs with
/// |x - y| <= radius. Nonpositive when g is a local Lipschitz upper gradient of u
/// at that scale.
double lipschitz_excess(const MetricGrid& grid, const Eigen::VectorXd& u, const Density& g,
                        double radius);

/// u = min(inf over lattice paths from the source side of the trapezoid
/// integral of g, 1).
Eigen::VectorXd capacity_potential(const MetricGrid& grid, const Density& g, Side source);

struct LevelSetSlice {
  double t = 0.0;
  /// Nodes with u < t next to a node with u >= t, away from both sides E and F.
  std::vector<Index> boundary_nodes;
  /// Shortest dual path through boundary_nodes, as a measure.
  MeasureConstraint path;
  double h1_measure = 0.0;
  /// Sublevel or superlevel set was empty.
  bool empty = false;
  /// A dual path through the interface exists.
  bool spanning = false;
};

LevelSetSlice level_set_boundary(const ChainPotential& pot, double t);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / rhs, 0 when both vanish
};

/// Midpoint rule in t over (0,1) of the rho-mass of each slice, against
/// (2 v_1 / v_2) sum rho g m.
InequalityCheck coarea_check(const ChainPotential& pot, const Density& rho, int num_levels = 64);

/// Level-binned integral of H^1(u^{-1}(t) within mask) against
/// (2 v_1 / v_2) LIP[u](mask) H^2(mask). Level curves come from linear
/// interpolation on the lattice triangles whose corners all lie in the mask.
/// An empty mask means every active node.
InequalityCheck eilenberg_check(const MetricGrid& grid, const Eigen::VectorXd& u,
                                const std::vector<char>& mask = {}, int num_levels = 256);

/// Largest difference quotient of u over 8-adjacent pairs inside the mask.
double lipschitz_estimate(const MetricGrid& grid, const Eigen::VectorXd& u,
                          const std::vector<char>& mask = {});

}  // namespace modrecip
