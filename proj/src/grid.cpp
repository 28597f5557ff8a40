#include "modrecip/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace modrecip {

std::string_view to_string(Norm norm) {
  switch (norm) {
    case Norm::L1: return "l1";
    case Norm::L2: return "l2";
    case Norm::LInf: return "linf";
  }
  return "?";
}

std::optional<Norm> parse_norm(std::string_view text) {
  if (text == "l1") return Norm::L1;
  if (text == "l2") return Norm::L2;
  if (text == "linf") return Norm::LInf;
  return std::nullopt;
}

char to_char(Side side) { return "ABCD"[int(side)]; }

std::optional<Side> parse_side(char c) {
  switch (c) {
    case 'A': return Side::A;
    case 'B': return Side::B;
    case 'C': return Side::C;
    case 'D': return Side::D;
    default: return std::nullopt;
  }
}

std::pair<Side, Side> opposite_pair(Side first, Side second) {
  const int a = int(first), b = int(second);
  if ((a + 2) % 4 != b) throw std::invalid_argument("opposite_pair: sides are not opposite");
  return {Side((a + 1) % 4), Side((a + 3) % 4)};
}

MetricGrid::MetricGrid(int n, double width, double height, Norm norm)
    : MetricGrid(n, width, height, norm, Eigen::VectorXd::Ones(Index(n > 0 ? n : 0) * n)) {}

MetricGrid::MetricGrid(int n, double width, double height, Norm norm, Eigen::VectorXd weight,
                       std::vector<char> removed)
    : n_(n), width_(width), height_(height), norm_(norm),
      constants_(HausdorffConstants::for_norm(norm)), weight_(std::move(weight)),
      removed_(std::move(removed)) {
  if (n_ < 2) throw std::invalid_argument("MetricGrid: n must be at least 2");
  if (!(width_ > 0) || !(height_ > 0) || !std::isfinite(width_) || !std::isfinite(height_))
    throw std::invalid_argument("MetricGrid: width and height must be positive");
  if (weight_.size() != size()) throw std::invalid_argument("MetricGrid: weight has wrong size");
  if (!removed_.empty() && Index(removed_.size()) != size())
    throw std::invalid_argument("MetricGrid: removal mask has wrong size");
  for (Index v = 0; v < size(); ++v)
    if (!(weight_(v) > 0) || !std::isfinite(weight_(v)))
      throw std::invalid_argument("MetricGrid: weights must be positive and finite");

  const double base = constants_.density2d * hx() * hy();
  measure_ = Eigen::VectorXd::Zero(size());
  for (Index v = 0; v < size(); ++v)
    if (active(v)) measure_(v) = base * weight_(v) * weight_(v);
}

Eigen::Vector2d MetricGrid::position(Index v) const {
  return {(column(v) + 0.5) * hx(), (row(v) + 0.5) * hy()};
}

double MetricGrid::cell_measure(Index v) const {
  if (v < 0 || v >= size()) throw std::out_of_range("cell_measure: node index out of range");
  return measure_(v);
}

double MetricGrid::edge_length(Index from, Index to) const {
  const Displacement<double> d((column(to) - column(from)) * hx(), (row(to) - row(from)) * hy());
  return step_length(norm_, d, 0.5 * (weight_(from) + weight_(to)));
}

double MetricGrid::boundary_cap(Index v, Side side) const {
  const bool horizontal = side == Side::A || side == Side::C;
  const Displacement<double> d(horizontal ? 0.5 * hx() : 0.0, horizontal ? 0.0 : 0.5 * hy());
  return step_length(norm_, d, weight_(v));
}

std::vector<Index> MetricGrid::side_nodes(Side side) const {
  std::vector<Index> out;
  out.reserve(std::size_t(n_));
  for (int k = 0; k < n_; ++k) {
    Index v = 0;
    switch (side) {
      case Side::A: v = node(0, k); break;
      case Side::B: v = node(k, 0); break;
      case Side::C: v = node(n_ - 1, k); break;
      case Side::D: v = node(k, n_ - 1); break;
    }
    if (active(v)) out.push_back(v);
  }
  return out;
}

std::optional<Side> MetricGrid::boundary_label(Index v) const {
  const int i = column(v), j = row(v);
  if (i == 0) return Side::A;
  if (i == n_ - 1) return Side::C;
  if (j == 0) return Side::B;
  if (j == n_ - 1) return Side::D;
  return std::nullopt;
}

MetricGrid make_grid(const GridSpec& spec) {
  if (spec.n < 2) throw std::invalid_argument("grid.n must be at least 2");
  const Index size = Index(spec.n) * spec.n;
  if (spec.weight == "cut") {
    std::vector<char> removed(std::size_t(size), 0);
    for (int j = 0; j < spec.n; ++j) removed[std::size_t(j * spec.n + spec.n / 2)] = 1;
    return MetricGrid(spec.n, spec.width, spec.height, spec.norm, Eigen::VectorXd::Ones(size),
                      std::move(removed));
  }
  if (spec.weight == "bump") {
    MetricGrid plain(spec.n, spec.width, spec.height, spec.norm);
    const Eigen::Vector2d center(0.5 * spec.width, 0.5 * spec.height);
    const double scale2 = 0.05 * (spec.width * spec.width + spec.height * spec.height);
    Eigen::VectorXd w(size);
    for (Index v = 0; v < size; ++v)
      w(v) = 1.0 + 0.5 * std::exp(-(plain.position(v) - center).squaredNorm() / scale2);
    return MetricGrid(spec.n, spec.width, spec.height, spec.norm, std::move(w));
  }
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(spec.weight, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != spec.weight.size() || !(value > 0) || !std::isfinite(value))
    throw std::invalid_argument("grid.weight must be a positive number or one of: bump, cut");
  return MetricGrid(spec.n, spec.width, spec.height, spec.norm,
                    Eigen::VectorXd::Constant(size, value));
}

}  // namespace modrecip
