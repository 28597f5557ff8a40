// p-modulus of a constraint family by constraint generation.
//
// The outer loop asks the family oracle for members that the current density
// fails to charge with mass 1 and adds them to an active set. The inner loop
// maximizes the Lagrangian dual of
//
//     min  sum_i m_i rho_i^p   s.t.  <w_k, rho> >= 1 for active k,  rho >= 0
//
// over multipliers lambda >= 0. For fixed lambda the minimizing density is
// explicit, rho_i = (s_i / (p m_i))^{1/(p-1)} with s = W^T lambda, so every dual
// value is a lower bound and every oracle-normalized density an upper bound.
#pragma once

#include "modrecip/families.hpp"
#include "modrecip/grid.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace modrecip {

enum class InnerMethod { ProjectedGradient, CoordinateAscent };
enum class SolveStatus { Converged, NotConverged, Unbounded };

std::string_view to_string(SolveStatus status);
std::string_view to_string(InnerMethod method);

struct SolverConfig {
  double p = 2.0;
  double tol_admissibility = 1e-4;
  /// Target for (upper - lower) / lower.
  double tol_gap = 1e-3;
  int max_outer_iters = 500;
  int max_inner_iters = 2000;
  /// Sufficient-increase constant and shrink factor of the backtracking search.
  double armijo = 1e-4;
  double backtrack = 0.5;
  /// Floor for denominators of relative quantities and for curvature estimates.
  double epsilon_floor = 1e-9;
  /// Violated members added per outer iteration.
  std::size_t cuts_per_iteration = 8;
  /// Outer iterations a constraint may keep a zero multiplier before it is dropped.
  int drop_after = 25;
  InnerMethod inner = InnerMethod::ProjectedGradient;

  /// Throws std::invalid_argument. Exponents below 1.05 are rejected.
  void validate() const;
};

struct ActiveConstraint {
  MeasureConstraint constraint;
  double multiplier = 0.0;
};

struct IterationRecord {
  int outer = 0;
  int inner_total = 0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t active = 0;
};

struct ModulusResult {
  SolveStatus status = SolveStatus::NotConverged;
  double value = 0.0;  // sum m rho_star^p; +inf when unbounded
  Density rho_star;
  double lower_bound = 0.0;
  /// (least member mass of rho_star) - 1; nonnegative up to rounding.
  double violation = 0.0;
  std::vector<ActiveConstraint> active;
  int outer_iterations = 0;
  int inner_iterations = 0;
  std::vector<IterationRecord> history;

  bool converged() const { return status == SolveStatus::Converged; }
  double relative_gap() const;
};

/// Closed-form value of the Lagrangian dual at the given multipliers:
/// sum(lambda) - (p - 1) sum m rho(lambda)^p. Never exceeds the modulus of
/// the listed constraints.
double lagrangian_lower_bound(std::span<const ActiveConstraint> active, double p,
                              const Eigen::VectorXd& measure);

/// Energy sum m rho^p.
double p_energy(const Density& rho, const Eigen::VectorXd& measure, double p);

ModulusResult solve_modulus(const ConstraintFamily& family, const Eigen::VectorXd& measure,
                            const SolverConfig& cfg,
                            const std::optional<Density>& initial = std::nullopt);

inline ModulusResult solve_modulus(const ConstraintFamily& family, const MetricGrid& grid,
                                   const SolverConfig& cfg,
                                   const std::optional<Density>& initial = std::nullopt) {
  return solve_modulus(family, grid.measures(), cfg, initial);
}

struct ReciprocityReport {
  double p = 2.0;
  double q = 2.0;
  ModulusResult gamma;  // connecting family, exponent p
  ModulusResult sigma;  // separating family, exponent q
  double mod_p_gamma = 0.0;
  double mod_q_sigma = 0.0;
  /// mod_p_gamma^{1/p} * mod_q_sigma^{1/q}
  double product = 0.0;
  /// The same product formed from the two certified lower bounds.
  double certified_product = 0.0;
  double threshold = 0.0;
  /// Connecting family empty; the separating family must then be unbounded.
  bool degenerate = false;
  bool pass = false;
};

/// Solves Mod_p of the curves joining `first` to `second` and Mod_q of the
/// boundaries separating them, and checks the product against
/// (pi/4)(1 - tol_reciprocity).
ReciprocityReport verify_reciprocity(const MetricGrid& grid, double p, const SolverConfig& cfg,
                                     double tol_reciprocity = 0.1, Side first = Side::A,
                                     Side second = Side::C);

}  // namespace modrecip
