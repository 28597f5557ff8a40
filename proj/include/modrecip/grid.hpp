#pragma once

#include "modrecip/hausdorff.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace modrecip {

using Index = Eigen::Index;

/// Sides of the quadrilateral in cyclic order: A = left, B = bottom,
/// C = right, D = top.
enum class Side { A, B, C, D };

char to_char(Side side);
std::optional<Side> parse_side(char c);
/// The remaining pair of sides, e.g. (B, D) for (A, C). Throws for adjacent sides.
std::pair<Side, Side> opposite_pair(Side first, Side second);

/// A uniform n x n lattice of cell centers on [0,width] x [0,height] with a
/// norm, an optional conformal weight and an optional set of removed cells.
///
/// Node (i, j) sits at ((i + 1/2) hx, (j + 1/2) hy) with index j * n + i.
/// Edge lengths use the mean of the endpoint weights, so the discrete
/// metric stays symmetric; measures use weight squared.
class MetricGrid {
 public:
  MetricGrid(int n, double width, double height, Norm norm);
  MetricGrid(int n, double width, double height, Norm norm, Eigen::VectorXd weight,
             std::vector<char> removed = {});

  int n() const { return n_; }
  double width() const { return width_; }
  double height() const { return height_; }
  double hx() const { return width_ / n_; }
  double hy() const { return height_ / n_; }
  /// Largest axis step; the smallest radius that keeps the lattice connected.
  double spacing() const { return std::max(hx(), hy()); }
  Norm norm() const { return norm_; }
  const HausdorffConstants& constants() const { return constants_; }

  Index size() const { return Index(n_) * n_; }
  Index node(int i, int j) const { return Index(j) * n_ + i; }
  int column(Index v) const { return int(v % n_); }
  int row(Index v) const { return int(v / n_); }
  bool contains(int i, int j) const { return i >= 0 && j >= 0 && i < n_ && j < n_; }
  Eigen::Vector2d position(Index v) const;

  bool active(Index v) const { return removed_.empty() || !removed_[std::size_t(v)]; }
  double weight(Index v) const { return weight_(v); }
  const Eigen::VectorXd& weights() const { return weight_; }

  /// H^2 measure of the cell around v; zero for removed cells.
  double cell_measure(Index v) const;
  const Eigen::VectorXd& measures() const { return measure_; }
  double total_measure() const { return measure_.sum(); }

  /// Distance between two nodes given as a lattice offset from `from`.
  double edge_length(Index from, Index to) const;
  /// Length of the half step from a boundary node out to the side it lies on.
  double boundary_cap(Index v, Side side) const;

  /// Closed side: every active node on that boundary row/column, corners included.
  std::vector<Index> side_nodes(Side side) const;
  /// Unique owner label of a boundary node. Corners belong to A or C.
  std::optional<Side> boundary_label(Index v) const;

 private:
  int n_;
  double width_;
  double height_;
  Norm norm_;
  HausdorffConstants constants_;
  Eigen::VectorXd weight_;
  std::vector<char> removed_;
  Eigen::VectorXd measure_;
};

/// Grid as described in an experiment config. `weight` is either a positive
/// number or a preset name: "bump" (smooth central bump, factor up to 1.5) or
/// "cut" (the middle column is removed, disconnecting A from C).
struct GridSpec {
  int n = 32;
  double width = 1.0;
  double height = 1.0;
  Norm norm = Norm::L2;
  std::string weight = "1";
};

MetricGrid make_grid(const GridSpec& spec);

}  // namespace modrecip
