#include "modrecip/curves.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace modrecip {

void validate_density(const MetricGrid& grid, const Density& rho) {
  if (rho.size() != grid.size()) throw std::invalid_argument("density has wrong size");
  for (Index v = 0; v < rho.size(); ++v)
    if (!(rho(v) >= 0.0) || !std::isfinite(rho(v)))
      throw std::invalid_argument("density must be finite and nonnegative");
}

DiscreteCurve make_curve(const MetricGrid& grid, std::vector<Index> nodes) {
  DiscreteCurve c;
  c.nodes = std::move(nodes);
  std::unordered_set<Index> seen;
  for (std::size_t k = 0; k < c.nodes.size(); ++k) {
    if (!seen.insert(c.nodes[k]).second) c.simple = false;
    if (k == 0) continue;
    const Index a = c.nodes[k - 1], b = c.nodes[k];
    if (std::abs(grid.column(a) - grid.column(b)) > 1 || std::abs(grid.row(a) - grid.row(b)) > 1 ||
        a == b)
      throw std::invalid_argument("make_curve: consecutive nodes must be 8-neighbours");
    c.lengths.push_back(grid.edge_length(a, b));
    c.total_length += c.lengths.back();
  }
  return c;
}

DiscreteCurve loop_erase(const MetricGrid& grid, const DiscreteCurve& curve) {
  std::vector<Index> out;
  std::unordered_map<Index, std::size_t> position;
  for (Index v : curve.nodes) {
    if (auto it = position.find(v); it != position.end()) {
      for (std::size_t k = it->second + 1; k < out.size(); ++k) position.erase(out[k]);
      out.resize(it->second + 1);
      continue;
    }
    position.emplace(v, out.size());
    out.push_back(v);
  }
  return make_curve(grid, std::move(out));
}

double line_integral(const DiscreteCurve& curve, const Density& rho) {
  double sum = 0.0;
  for (std::size_t k = 0; k < curve.lengths.size(); ++k)
    sum += 0.5 * (rho(curve.nodes[k]) + rho(curve.nodes[k + 1])) * curve.lengths[k];
  return sum;
}

double MeasureConstraint::integrate(const Density& rho) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) sum += weights[k] * rho(support[k]);
  return sum;
}

namespace {

// Merges repeated nodes so the support is a set.
MeasureConstraint collect(const std::vector<Index>& nodes, const std::vector<double>& shares) {
  MeasureConstraint m;
  std::unordered_map<Index, std::size_t> slot;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    auto [it, fresh] = slot.emplace(nodes[k], m.support.size());
    if (fresh) {
      m.support.push_back(nodes[k]);
      m.weights.push_back(0.0);
    }
    m.weights[it->second] += shares[k];
  }
  for (double w : m.weights) m.total += w;
  return m;
}

std::vector<double> trapezoid_shares(const DiscreteCurve& curve) {
  std::vector<double> shares(curve.nodes.size(), 0.0);
  for (std::size_t k = 0; k < curve.lengths.size(); ++k) {
    shares[k] += 0.5 * curve.lengths[k];
    shares[k + 1] += 0.5 * curve.lengths[k];
  }
  return shares;
}

}  // namespace

MeasureConstraint curve_measure(const DiscreteCurve& curve) {
  return collect(curve.nodes, trapezoid_shares(curve));
}

MeasureConstraint dual_path_measure(const MetricGrid& grid, const DiscreteCurve& curve, Side from,
                                    Side to) {
  if (curve.empty()) return {};
  auto shares = trapezoid_shares(curve);
  shares.front() += grid.boundary_cap(curve.nodes.front(), from);
  shares.back() += grid.boundary_cap(curve.nodes.back(), to);
  return collect(curve.nodes, shares);
}

}  // namespace modrecip
