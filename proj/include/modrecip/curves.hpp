#pragma once

#include "modrecip/grid.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace modrecip {

/// Nonnegative per-node field: a candidate density or an upper gradient.
using Density = Eigen::VectorXd;

/// Throws std::invalid_argument unless rho has one finite nonnegative entry per node.
void validate_density(const MetricGrid& grid, const Density& rho);

/// A lattice path. Consecutive nodes are 8-neighbours.
struct DiscreteCurve {
  std::vector<Index> nodes;
  std::vector<double> lengths;  // one per step
  double total_length = 0.0;
  bool simple = true;

  bool empty() const { return nodes.empty(); }
};

DiscreteCurve make_curve(const MetricGrid& grid, std::vector<Index> nodes);

/// Chronological loop erasure. The result is simple, keeps both endpoints and
/// visits a subset of the input's nodes.
DiscreteCurve loop_erase(const MetricGrid& grid, const DiscreteCurve& curve);

/// Trapezoid line integral of rho along the curve.
double line_integral(const DiscreteCurve& curve, const Density& rho);

/// A finite measure carried by nodes. Admissibility reads <weights, rho> >= 1.
struct MeasureConstraint {
  std::vector<Index> support;
  std::vector<double> weights;
  double total = 0.0;

  bool empty() const { return support.empty(); }
  double integrate(const Density& rho) const;
};

/// Per-node length shares of a curve: each node receives half of every
/// incident step. Integrating rho against it reproduces the trapezoid rule.
MeasureConstraint curve_measure(const DiscreteCurve& curve);

/// H^1 measure of a dual path running from side `from` to side `to`. Like
/// curve_measure, plus the half-cell caps joining the end nodes to their sides,
/// so a straight column spans the full height of the domain.
MeasureConstraint dual_path_measure(const MetricGrid& grid, const DiscreteCurve& curve, Side from,
                                    Side to);

}  // namespace modrecip
