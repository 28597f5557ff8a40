// Curve and measure families exposed as separation oracles: given a density,
// return the member with the smallest rho-mass.
#pragma once

#include "modrecip/curves.hpp"
#include "modrecip/grid.hpp"

#include <cstddef>
#include <vector>

namespace modrecip {

struct OracleAnswer {
  /// min over members of the rho-mass; +inf when the family has no member.
  double value = 0.0;
  MeasureConstraint constraint;
  DiscreteCurve curve;

  bool family_empty() const;
};

class ConstraintFamily {
 public:
  virtual ~ConstraintFamily() = default;

  virtual Index dimension() const = 0;
  virtual OracleAnswer most_violated(const Density& rho) const = 0;

  /// Distinct members whose rho-mass is below threshold, most violated first.
  /// The default returns at most the single most violated member.
  virtual std::vector<MeasureConstraint> violated(const Density& rho, double threshold,
                                                  std::size_t max_count) const;

  /// True when the zero measure belongs to the family; then no density is admissible.
  virtual bool has_null_member() const { return false; }

  /// Per node, the least rho-mass of a partial member running from the start
  /// of the family to the node (+inf when unreachable). Empty when the family
  /// has no such notion.
  virtual Eigen::VectorXd arrival_mass(const Density& rho) const;
};

/// rho / (min member mass of rho == 1); the constant 1 / d(E,F) for curve families.
Density canonical_density(const ConstraintFamily& family);

enum class IntegrationRule { LeftEndpoint, Trapezoid };

/// Node weights of a curve under the given line-integral rule.
MeasureConstraint curve_measure(const DiscreteCurve& curve, IntegrationRule rule);

/// Lattice paths joining two sides. Paths are 8-connected.
class ConnectingFamily final : public ConstraintFamily {
 public:
  ConnectingFamily(const MetricGrid& grid, Side source, Side sink,
                   IntegrationRule rule = IntegrationRule::Trapezoid);

  const MetricGrid& grid() const { return *grid_; }
  Side source() const { return source_; }
  Side sink() const { return sink_; }
  IntegrationRule rule() const { return rule_; }

  Index dimension() const override { return grid_->size(); }
  OracleAnswer most_violated(const Density& rho) const override;
  std::vector<MeasureConstraint> violated(const Density& rho, double threshold,
                                          std::size_t max_count) const override;
  Eigen::VectorXd arrival_mass(const Density& rho) const override;

 private:
  const MetricGrid* grid_;
  Side source_;
  Side sink_;
  IntegrationRule rule_;
};

/// Separating boundaries between two opposite sides, represented by dual
/// paths joining the other two sides. When the separated sides lie in
/// different lattice components the empty boundary separates them, which
/// puts the zero measure into the family.
class SeparatingFamily final : public ConstraintFamily {
 public:
  SeparatingFamily(const MetricGrid& grid, Side first, Side second);

  const MetricGrid& grid() const { return *grid_; }
  std::pair<Side, Side> separated() const { return {first_, second_}; }
  std::pair<Side, Side> dual_sides() const { return {from_, to_}; }

  Index dimension() const override { return grid_->size(); }
  OracleAnswer most_violated(const Density& rho) const override;
  std::vector<MeasureConstraint> violated(const Density& rho, double threshold,
                                          std::size_t max_count) const override;
  bool has_null_member() const override { return disconnected_; }
  Eigen::VectorXd arrival_mass(const Density& rho) const override;

 private:
  const MetricGrid* grid_;
  Side first_, second_;
  Side from_, to_;
  bool disconnected_;
};

/// A finite, explicitly listed family.
class ExplicitFamily final : public ConstraintFamily {
 public:
  ExplicitFamily(Index dimension, std::vector<MeasureConstraint> members);

  Index dimension() const override { return dimension_; }
  OracleAnswer most_violated(const Density& rho) const override;

 private:
  Index dimension_;
  std::vector<MeasureConstraint> members_;
};

/// Every member of `base` with its node weights multiplied by `factor` (>= 0).
class ReweightedFamily final : public ConstraintFamily {
 public:
  ReweightedFamily(const ConstraintFamily& base, Eigen::VectorXd factor);

  Index dimension() const override { return base_->dimension(); }
  OracleAnswer most_violated(const Density& rho) const override;
  std::vector<MeasureConstraint> violated(const Density& rho, double threshold,
                                          std::size_t max_count) const override;
  bool has_null_member() const override { return base_->has_null_member(); }
  Eigen::VectorXd arrival_mass(const Density& rho) const override;

 private:
  MeasureConstraint reweight(MeasureConstraint m) const;

  const ConstraintFamily* base_;
  Eigen::VectorXd factor_;
};

struct CurveSearch {
  double rho_length;  // +inf when no path exists
  DiscreteCurve curve;
};

/// Minimum of the discrete line integral of rho over paths from source to sink.
CurveSearch shortest_admissible_curve(const ConnectingFamily& family, const Density& rho);

struct CutSearch {
  double rho_mass;  // 0 for the null member
  MeasureConstraint constraint;
  DiscreteCurve curve;
};

/// Dual path of least rho-mass; a lower bound for every separating boundary.
CutSearch most_violated_cut(const SeparatingFamily& family, const Density& rho);

/// Least rho-mass dual path from side `from` to side `to` using only nodes
/// with allowed[v] != 0 (all active nodes when `allowed` is empty).
CutSearch shortest_dual_path(const MetricGrid& grid, Side from, Side to, const Density& rho,
                             const std::vector<char>& allowed = {});

}  // namespace modrecip
