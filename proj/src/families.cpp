#include "modrecip/families.hpp"

#include "modrecip/shortest_path.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>
#include <tuple>

namespace modrecip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_sides(const MetricGrid& grid, Side a, Side b) {
  if (a == b) throw std::invalid_argument("family: the two sides must differ");
  if (grid.side_nodes(a).empty() || grid.side_nodes(b).empty())
    throw std::invalid_argument("family: side has no active nodes");
}

struct Terminal {
  double value;
  int hops;
  Index node;
  auto key() const { return std::tie(value, hops, node); }
};

// Reached sink nodes ordered by (value, hops, index); `extra` adds a per-node exit cost.
template <typename Exit>
std::vector<Terminal> ranked_terminals(const PathTree& tree, const std::vector<Index>& sinks,
                                       Exit&& extra) {
  std::vector<Terminal> out;
  for (Index t : sinks)
    if (tree.reached(t)) out.push_back({tree.dist(t) + extra(t), tree.hops[std::size_t(t)], t});
  std::sort(out.begin(), out.end(),
            [](const Terminal& a, const Terminal& b) { return a.key() < b.key(); });
  return out;
}

std::vector<Seed> zero_seeds(const std::vector<Index>& nodes) {
  std::vector<Seed> seeds;
  for (Index v : nodes) seeds.push_back({v, 0.0});
  return seeds;
}

PathTree connecting_tree(const MetricGrid& grid, Side source, IntegrationRule rule,
                         const Density& rho) {
  const auto seeds = zero_seeds(grid.side_nodes(source));
  if (rule == IntegrationRule::Trapezoid)
    return grid_dijkstra(grid, seeds, king_offsets(), [&](Index a, Index b) {
      return 0.5 * (rho(a) + rho(b)) * grid.edge_length(a, b);
    });
  return grid_dijkstra(grid, seeds, king_offsets(),
                       [&](Index a, Index b) { return rho(a) * grid.edge_length(a, b); });
}

std::pair<PathTree, PathTree> connecting_trees(const MetricGrid& grid, Side source, Side sink,
                                               IntegrationRule rule, const Density& rho) {
  auto forward = connecting_tree(grid, source, rule, rho);
  if (rule == IntegrationRule::Trapezoid) return {std::move(forward), connecting_tree(grid, sink, rule, rho)};
  // reversed orientation: the step b -> a of the backward search is a -> b forward
  auto backward = grid_dijkstra(grid, zero_seeds(grid.side_nodes(sink)), king_offsets(),
                                [&](Index a, Index b) { return rho(b) * grid.edge_length(b, a); });
  return {std::move(forward), std::move(backward)};
}

// Members through each node: forward path from the entry side to v joined with
// the backward path from v to the exit side. Candidates are ranked by their
// mass, loop-erased and deduplicated.
template <typename Measure>
std::vector<MeasureConstraint> through_node_members(const MetricGrid& grid, const PathTree& forward,
                                                    const PathTree& backward, const Density& rho,
                                                    double threshold, std::size_t max_count,
                                                    Measure&& to_measure) {
  std::vector<std::pair<double, Index>> order;
  for (Index v = 0; v < grid.size(); ++v)
    if (forward.reached(v) && backward.reached(v)) {
      const double through = forward.dist(v) + backward.dist(v);
      if (through < threshold) order.emplace_back(through, v);
    }
  std::sort(order.begin(), order.end());
  std::vector<MeasureConstraint> out;
  std::set<std::vector<Index>> seen;
  for (const auto& [through, v] : order) {
    if (out.size() >= max_count) break;
    auto nodes = forward.path_to(v);
    auto tail = backward.path_to(v);
    nodes.insert(nodes.end(), tail.rbegin() + 1, tail.rend());
    auto curve = loop_erase(grid, make_curve(grid, std::move(nodes)));
    if (!seen.insert(curve.nodes).second) continue;
    auto m = to_measure(curve);
    if (m.integrate(rho) < threshold) out.push_back(std::move(m));
  }
  return out;
}

struct DualSearch {
  PathTree tree;
  std::vector<Terminal> terminals;
};

DualSearch dual_search(const MetricGrid& grid, Side from, Side to, const Density& rho,
                       const std::vector<char>& allowed) {
  std::vector<Seed> seeds;
  for (Index v : grid.side_nodes(from)) seeds.push_back({v, rho(v) * grid.boundary_cap(v, from)});
  DualSearch s{grid_dijkstra(
                   grid, seeds, king_offsets(),
                   [&](Index a, Index b) { return 0.5 * (rho(a) + rho(b)) * grid.edge_length(a, b); },
                   allowed),
               {}};
  s.terminals = ranked_terminals(s.tree, grid.side_nodes(to),
                                 [&](Index t) { return rho(t) * grid.boundary_cap(t, to); });
  return s;
}

}  // namespace

bool OracleAnswer::family_empty() const { return value == kInf; }

Eigen::VectorXd ConstraintFamily::arrival_mass(const Density&) const { return {}; }

std::vector<MeasureConstraint> ConstraintFamily::violated(const Density& rho, double threshold,
                                                          std::size_t max_count) const {
  auto answer = most_violated(rho);
  if (max_count == 0 || answer.family_empty() || answer.constraint.empty() ||
      !(answer.value < threshold))
    return {};
  return {std::move(answer.constraint)};
}

Density canonical_density(const ConstraintFamily& family) {
  const Density ones = Density::Ones(family.dimension());
  const auto answer = family.most_violated(ones);
  if (answer.family_empty() || !(answer.value > 0)) return Density::Zero(family.dimension());
  return ones / answer.value;
}

MeasureConstraint curve_measure(const DiscreteCurve& curve, IntegrationRule rule) {
  if (rule == IntegrationRule::Trapezoid) return curve_measure(curve);
  MeasureConstraint m;
  std::vector<Index> nodes(curve.nodes.begin(), curve.nodes.end() - (curve.nodes.empty() ? 0 : 1));
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    auto it = std::find(m.support.begin(), m.support.end(), nodes[k]);
    if (it == m.support.end()) {
      m.support.push_back(nodes[k]);
      m.weights.push_back(curve.lengths[k]);
    } else {
      m.weights[std::size_t(it - m.support.begin())] += curve.lengths[k];
    }
    m.total += curve.lengths[k];
  }
  return m;
}

// ---------------------------------------------------------------------------

ConnectingFamily::ConnectingFamily(const MetricGrid& grid, Side source, Side sink,
                                   IntegrationRule rule)
    : grid_(&grid), source_(source), sink_(sink), rule_(rule) {
  check_sides(grid, source, sink);
}

OracleAnswer ConnectingFamily::most_violated(const Density& rho) const {
  auto found = shortest_admissible_curve(*this, rho);
  OracleAnswer a;
  a.value = found.rho_length;
  if (!found.curve.empty()) a.constraint = curve_measure(found.curve, rule_);
  a.curve = std::move(found.curve);
  return a;
}

std::vector<MeasureConstraint> ConnectingFamily::violated(const Density& rho, double threshold,
                                                          std::size_t max_count) const {
  validate_density(*grid_, rho);
  const auto [forward, backward] = connecting_trees(*grid_, source_, sink_, rule_, rho);
  return through_node_members(*grid_, forward, backward, rho, threshold, max_count,
                              [&](const DiscreteCurve& c) { return curve_measure(c, rule_); });
}

Eigen::VectorXd ConnectingFamily::arrival_mass(const Density& rho) const {
  validate_density(*grid_, rho);
  return connecting_tree(*grid_, source_, rule_, rho).dist;
}

CurveSearch shortest_admissible_curve(const ConnectingFamily& family, const Density& rho) {
  const MetricGrid& grid = family.grid();
  validate_density(grid, rho);
  const auto tree = connecting_tree(grid, family.source(), family.rule(), rho);
  const auto ranked =
      ranked_terminals(tree, grid.side_nodes(family.sink()), [](Index) { return 0.0; });
  if (ranked.empty()) return {kInf, {}};
  return {ranked.front().value, make_curve(grid, tree.path_to(ranked.front().node))};
}

// ---------------------------------------------------------------------------

SeparatingFamily::SeparatingFamily(const MetricGrid& grid, Side first, Side second)
    : grid_(&grid), first_(first), second_(second), disconnected_(false) {
  check_sides(grid, first, second);
  std::tie(from_, to_) = opposite_pair(first, second);
  const auto reach = grid_dijkstra(grid, zero_seeds(grid.side_nodes(first)), king_offsets(),
                                   [](Index, Index) { return 0.0; });
  const auto targets = grid.side_nodes(second);
  disconnected_ = std::none_of(targets.begin(), targets.end(),
                               [&](Index v) { return reach.reached(v); });
}

OracleAnswer SeparatingFamily::most_violated(const Density& rho) const {
  if (disconnected_) return {0.0, {}, {}};
  auto cut = most_violated_cut(*this, rho);
  return {cut.rho_mass, std::move(cut.constraint), std::move(cut.curve)};
}

std::vector<MeasureConstraint> SeparatingFamily::violated(const Density& rho, double threshold,
                                                          std::size_t max_count) const {
  if (disconnected_) return {};
  validate_density(*grid_, rho);
  const auto forward = dual_search(*grid_, from_, to_, rho, {}).tree;
  const auto backward = dual_search(*grid_, to_, from_, rho, {}).tree;
  return through_node_members(*grid_, forward, backward, rho, threshold, max_count,
                              [&](const DiscreteCurve& c) {
                                return dual_path_measure(*grid_, c, from_, to_);
                              });
}

Eigen::VectorXd SeparatingFamily::arrival_mass(const Density& rho) const {
  if (disconnected_) return {};
  validate_density(*grid_, rho);
  return dual_search(*grid_, from_, to_, rho, {}).tree.dist;
}

CutSearch most_violated_cut(const SeparatingFamily& family, const Density& rho) {
  if (family.has_null_member()) return {0.0, {}, {}};
  const auto [from, to] = family.dual_sides();
  return shortest_dual_path(family.grid(), from, to, rho);
}

CutSearch shortest_dual_path(const MetricGrid& grid, Side from, Side to, const Density& rho,
                             const std::vector<char>& allowed) {
  validate_density(grid, rho);
  const auto s = dual_search(grid, from, to, rho, allowed);
  if (s.terminals.empty()) return {kInf, {}, {}};
  auto curve = make_curve(grid, s.tree.path_to(s.terminals.front().node));
  auto measure = dual_path_measure(grid, curve, from, to);
  return {s.terminals.front().value, std::move(measure), std::move(curve)};
}

// ---------------------------------------------------------------------------

ExplicitFamily::ExplicitFamily(Index dimension, std::vector<MeasureConstraint> members)
    : dimension_(dimension), members_(std::move(members)) {
  for (const auto& m : members_)
    for (std::size_t k = 0; k < m.support.size(); ++k)
      if (m.support[k] < 0 || m.support[k] >= dimension_ || !(m.weights[k] >= 0))
        throw std::invalid_argument("ExplicitFamily: bad member");
}

OracleAnswer ExplicitFamily::most_violated(const Density& rho) const {
  OracleAnswer best{kInf, {}, {}};
  for (const auto& m : members_) {
    const double v = m.integrate(rho);
    if (v < best.value) best = {v, m, {}};
  }
  return best;
}

ReweightedFamily::ReweightedFamily(const ConstraintFamily& base, Eigen::VectorXd factor)
    : base_(&base), factor_(std::move(factor)) {
  if (factor_.size() != base.dimension() || (factor_.array() < 0).any())
    throw std::invalid_argument("ReweightedFamily: factor must be nonnegative, one per node");
}

Eigen::VectorXd ReweightedFamily::arrival_mass(const Density& rho) const {
  return base_->arrival_mass(rho.cwiseProduct(factor_));
}

MeasureConstraint ReweightedFamily::reweight(MeasureConstraint m) const {
  m.total = 0.0;
  for (std::size_t k = 0; k < m.support.size(); ++k) {
    m.weights[k] *= factor_(m.support[k]);
    m.total += m.weights[k];
  }
  return m;
}

// <w * factor, rho> = <w, factor * rho>, so the base oracle runs on the scaled density.
OracleAnswer ReweightedFamily::most_violated(const Density& rho) const {
  auto a = base_->most_violated(rho.cwiseProduct(factor_));
  a.constraint = reweight(std::move(a.constraint));
  return a;
}

std::vector<MeasureConstraint> ReweightedFamily::violated(const Density& rho, double threshold,
                                                          std::size_t max_count) const {
  auto out = base_->violated(rho.cwiseProduct(factor_), threshold, max_count);
  for (auto& m : out) m = reweight(std::move(m));
  return out;
}

}  // namespace modrecip
