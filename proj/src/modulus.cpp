#include "modrecip/modulus.hpp"

#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

namespace modrecip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct DualPoint {
  Eigen::VectorXd lambda;
  Eigen::VectorXd rho;
  Eigen::VectorXd mass;  // W rho
  double energy = 0.0;
  double value = 0.0;
};

// Dual of the modulus program restricted to a fixed list of constraints.
class DualProblem {
 public:
  DualProblem(std::span<const ActiveConstraint> active, const Eigen::VectorXd& measure, double p)
      : measure_(&measure), p_(p), W_(Index(active.size()), measure.size()) {
    std::vector<Eigen::Triplet<double>> entries;
    std::vector<char> seen(std::size_t(measure.size()), 0);
    for (std::size_t k = 0; k < active.size(); ++k) {
      const auto& c = active[k].constraint;
      for (std::size_t e = 0; e < c.support.size(); ++e) {
        entries.emplace_back(Index(k), c.support[e], c.weights[e]);
        if (!seen[std::size_t(c.support[e])]) {
          seen[std::size_t(c.support[e])] = 1;
          touched_.push_back(c.support[e]);
        }
      }
    }
    W_.setFromTriplets(entries.begin(), entries.end());
    std::sort(touched_.begin(), touched_.end());
    for (Index i : touched_)
      if (!(measure(i) > 0)) throw std::invalid_argument("constraint charges a node of zero measure");
  }

  Index rows() const { return W_.rows(); }
  const SparseRows& matrix() const { return W_; }
  const std::vector<Index>& touched() const { return touched_; }
  double p() const { return p_; }
  double measure(Index i) const { return (*measure_)(i); }

  // Minimizer of m rho^p - s rho over rho >= 0.
  double density_from_load(double s, Index i) const {
    if (!(s > 0)) return 0.0;
    const double x = s / (p_ * measure(i));
    return p_ == 2.0 ? x : std::pow(x, 1.0 / (p_ - 1.0));
  }

  void evaluate(DualPoint& pt) const {
    const Eigen::VectorXd load = W_.transpose() * pt.lambda;
    pt.rho = Eigen::VectorXd::Zero(measure_->size());
    double energy = 0.0;
    for (Index i : touched_) {
      const double r = density_from_load(load(i), i);
      pt.rho(i) = r;
      energy += measure(i) * (p_ == 2.0 ? r * r : std::pow(r, p_));
    }
    pt.energy = energy;
    pt.value = pt.lambda.sum() - (p_ - 1.0) * energy;
    pt.mass = W_ * pt.rho;
  }

 private:
  const Eigen::VectorXd* measure_;
  double p_;
  SparseRows W_;
  std::vector<Index> touched_;
};

// Relative gap between the dual value and the best density for the active set alone.
double active_gap(const DualPoint& pt, double p, double floor) {
  if (pt.mass.size() == 0) return kInf;
  const double least = pt.mass.minCoeff();
  if (!(least > 0) || !(pt.value > 0)) return kInf;
  const double upper = pt.energy / std::pow(least, p);
  return (upper - pt.value) / std::max(pt.value, floor);
}

// Inverse of the diagonal of the dual Hessian, with the density clamped away
// from zero at a fraction of the reference level.
Eigen::VectorXd diagonal_scaling(const DualProblem& dp, const DualPoint& pt, double rho_ref) {
  const double p = dp.p();
  Eigen::VectorXd curvature = Eigen::VectorXd::Zero(pt.rho.size());
  for (Index i : dp.touched()) {
    const double r = pt.rho(i) > 0.1 * rho_ref ? pt.rho(i) : rho_ref;
    curvature(i) = std::pow(r, 2.0 - p) / ((p - 1.0) * p * dp.measure(i));
  }
  Eigen::VectorXd scale(dp.rows());
  const auto& W = dp.matrix();
  for (Index k = 0; k < W.outerSize(); ++k) {
    double h = 0.0;
    for (SparseRows::InnerIterator it(W, k); it; ++it) h += it.value() * it.value() * curvature(it.col());
    scale(k) = h > 0 ? 1.0 / h : 1.0;
  }
  return scale;
}

// Spectral projected gradient ascent with nonmonotone backtracking.
int projected_gradient(const DualProblem& dp, DualPoint& pt, const Eigen::VectorXd& scale,
                       const SolverConfig& cfg, double inner_tol, double& alpha) {
  constexpr std::size_t kMemory = 10;
  std::deque<double> recent{pt.value};
  int it = 0;
  for (; it < cfg.max_inner_iters; ++it) {
    if (active_gap(pt, dp.p(), cfg.epsilon_floor) <= inner_tol) break;
    const Eigen::VectorXd grad = Eigen::VectorXd::Ones(dp.rows()) - pt.mass;
    const Eigen::VectorXd trial = (pt.lambda + alpha * scale.cwiseProduct(grad)).cwiseMax(0.0);
    const Eigen::VectorXd dir = trial - pt.lambda;
    const double slope = grad.dot(dir);
    if (!(slope > 0)) break;

    const double ref = *std::min_element(recent.begin(), recent.end());
    DualPoint cand;
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      cand.lambda = pt.lambda + t * dir;
      dp.evaluate(cand);
      if (cand.value >= ref + cfg.armijo * t * slope) {
        accepted = true;
        break;
      }
      t *= cfg.backtrack;
    }
    if (!accepted) break;

    const Eigen::VectorXd s = cand.lambda - pt.lambda;
    const Eigen::VectorXd y = cand.mass - pt.mass;  // minus the change in gradient
    const double sy = s.dot(y);
    const double ss = s.cwiseProduct(s).cwiseQuotient(scale).sum();
    alpha = sy > 0 ? std::clamp(ss / sy, 1e-8, 1e8) : 1e8;
    pt = std::move(cand);
    recent.push_back(pt.value);
    if (recent.size() > kMemory) recent.pop_front();
  }
  return it;
}

// Exact maximization of the dual along one multiplier at a time.
int coordinate_ascent(const DualProblem& dp, DualPoint& pt, const SolverConfig& cfg,
                      double inner_tol) {
  const double p = dp.p();
  const auto& W = dp.matrix();
  Eigen::VectorXd load = W.transpose() * pt.lambda;
  int sweep = 0;
  for (; sweep < cfg.max_inner_iters; ++sweep) {
    if (active_gap(pt, p, cfg.epsilon_floor) <= inner_tol) break;
    for (Index k = 0; k < W.outerSize(); ++k) {
      // phi(t) = 1 - <w_k, rho(load + t w_k)> is decreasing in t.
      auto phi = [&](double t, double* slope) {
        double f = 1.0, df = 0.0;
        for (SparseRows::InnerIterator it(W, k); it; ++it) {
          const Index i = it.col();
          const double sl = load(i) + t * it.value();
          const double r = dp.density_from_load(sl, i);
          f -= it.value() * r;
          if (slope && sl > 0) df -= it.value() * it.value() * r / ((p - 1.0) * sl);
        }
        if (slope) *slope = df;
        return f;
      };
      const double lo = -pt.lambda(k);
      double step = 0.0;
      if (p == 2.0) {
        double curv = 0.0;
        for (SparseRows::InnerIterator it(W, k); it; ++it)
          curv += it.value() * it.value() / (2.0 * dp.measure(it.col()));
        step = std::max(lo, phi(0.0, nullptr) / curv);
      } else if (phi(lo, nullptr) <= 0) {
        step = lo;
      } else {
        double a = lo, b = std::max(1e-300, std::abs(lo));
        if (phi(0.0, nullptr) > 0) {
          a = 0.0;
          b = std::max(b, 1e-12);
          while (phi(b, nullptr) > 0 && b < 1e300) {
            a = b;
            b *= 4.0;
          }
        } else {
          b = 0.0;
        }
        double t = 0.5 * (a + b);
        for (int n = 0; n < 60 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++n) {
          double slope = 0.0;
          const double f = phi(t, &slope);
          if (f > 0) a = t; else b = t;
          if (std::abs(f) < 1e-13) break;
          double next = slope < 0 ? t - f / slope : 0.5 * (a + b);
          if (!(next > a && next < b)) next = 0.5 * (a + b);
          t = next;
        }
        step = t;
      }
      if (step == 0.0) continue;
      pt.lambda(k) = std::max(0.0, pt.lambda(k) + step);
      for (SparseRows::InnerIterator it(W, k); it; ++it) load(it.col()) += step * it.value();
    }
    dp.evaluate(pt);
    load = W.transpose() * pt.lambda;
  }
  return sweep;
}

// Measure-weighted mean of rho over equal-width bins of the arrival mass.
// Unreachable or massless nodes get zero.
Density level_average(const Density& rho, const Eigen::VectorXd& arrival,
                      const Eigen::VectorXd& measure, int bins) {
  const Index dim = rho.size();
  double top = 0.0;
  for (Index i = 0; i < dim; ++i)
    if (std::isfinite(arrival(i))) top = std::max(top, arrival(i));
  if (!(top > 0)) return rho;
  std::vector<double> mass(std::size_t(bins), 0.0), weight(std::size_t(bins), 0.0);
  std::vector<int> bin(std::size_t(dim), -1);
  for (Index i = 0; i < dim; ++i) {
    if (!std::isfinite(arrival(i)) || !(measure(i) > 0)) continue;
    const int b = std::min(bins - 1, int(arrival(i) / top * bins));
    bin[std::size_t(i)] = b;
    mass[std::size_t(b)] += measure(i) * rho(i);
    weight[std::size_t(b)] += measure(i);
  }
  Density out = Density::Zero(dim);
  for (Index i = 0; i < dim; ++i)
    if (const int b = bin[std::size_t(i)]; b >= 0) out(i) = mass[std::size_t(b)] / weight[std::size_t(b)];
  return out;
}

}  // namespace

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::NotConverged: return "not_converged";
    case SolveStatus::Unbounded: return "unbounded";
  }
  return "?";
}

std::string_view to_string(InnerMethod method) {
  return method == InnerMethod::ProjectedGradient ? "projected_gradient" : "coordinate_ascent";
}

void SolverConfig::validate() const {
  if (!(p >= 1.05) || !std::isfinite(p))
    throw std::invalid_argument("solver.p must be finite and at least 1.05");
  if (!(tol_admissibility > 0) || !(tol_gap > 0) || !(epsilon_floor > 0))
    throw std::invalid_argument("solver tolerances must be positive");
  if (max_outer_iters < 1 || max_inner_iters < 1)
    throw std::invalid_argument("solver iteration limits must be positive");
  if (!(armijo > 0 && armijo < 1) || !(backtrack > 0 && backtrack < 1))
    throw std::invalid_argument("backtracking parameters must lie in (0, 1)");
  if (cuts_per_iteration < 1) throw std::invalid_argument("cuts_per_iteration must be positive");
}

double ModulusResult::relative_gap() const {
  if (status == SolveStatus::Unbounded) return 0.0;
  if (value == 0.0) return 0.0;
  return (value - lower_bound) / std::max(lower_bound, std::numeric_limits<double>::min());
}

double p_energy(const Density& rho, const Eigen::VectorXd& measure, double p) {
  return (measure.array() * rho.array().pow(p)).sum();
}

double lagrangian_lower_bound(std::span<const ActiveConstraint> active, double p,
                              const Eigen::VectorXd& measure) {
  if (active.empty()) return 0.0;
  DualProblem dp(active, measure, p);
  DualPoint pt;
  pt.lambda.resize(Index(active.size()));
  for (std::size_t k = 0; k < active.size(); ++k) {
    if (!(active[k].multiplier >= 0)) throw std::invalid_argument("multipliers must be nonnegative");
    pt.lambda(Index(k)) = active[k].multiplier;
  }
  dp.evaluate(pt);
  return pt.value;
}

ModulusResult solve_modulus(const ConstraintFamily& family, const Eigen::VectorXd& measure,
                            const SolverConfig& cfg, const std::optional<Density>& initial) {
  cfg.validate();
  if (measure.size() != family.dimension())
    throw std::invalid_argument("solve_modulus: measure has wrong size");
  const double p = cfg.p;
  const Index dim = family.dimension();

  ModulusResult result;
  if (family.has_null_member()) {
    result.status = SolveStatus::Unbounded;
    result.value = result.lower_bound = kInf;
    result.rho_star = Density::Zero(dim);
    return result;
  }
  const Density reference = canonical_density(family);
  if (family.most_violated(Density::Ones(dim)).family_empty()) {
    result.status = SolveStatus::Converged;
    result.rho_star = Density::Zero(dim);
    result.violation = kInf;
    return result;
  }
  if (!(reference.maxCoeff() > 0)) {
    // some member carries zero mass against every density
    result.status = SolveStatus::Unbounded;
    result.value = result.lower_bound = kInf;
    result.rho_star = Density::Zero(dim);
    return result;
  }
  double rho_ref = reference.maxCoeff();

  Density rho = initial ? *initial : reference;
  if (rho.size() != dim || (rho.array() < 0).any() || !rho.allFinite())
    throw std::invalid_argument("solve_modulus: initial density must be finite and nonnegative");

  std::vector<ActiveConstraint> active;
  std::vector<int> idle;
  std::set<std::vector<Index>> known;
  Eigen::VectorXd lambda;

  double upper = kInf, lower = 0.0;
  Density best = Density::Zero(dim);
  Density average;
  double inner_tol = 0.3 * cfg.tol_gap;
  double alpha = 1.0;
  double active_least = 0.0;
  double last_lower = 0.0, last_upper = kInf;
  int stalled = 0;

  for (int outer = 1; outer <= cfg.max_outer_iters; ++outer) {
    result.outer_iterations = outer;
    const auto answer = family.most_violated(rho);
    auto try_upper = [&](const Density& candidate_rho, double least) {
      if (!(least > 0) || !std::isfinite(least)) return;
      const double candidate = p_energy(candidate_rho, measure, p) / std::pow(least, p);
      if (candidate < upper) {
        upper = candidate;
        best = candidate_rho / least;
      }
    };
    try_upper(rho, answer.value);
    // The dual density vanishes off the active members; blending it with the
    // best admissible density repairs that at the cost of a few oracle calls.
    if (std::isfinite(upper) && active_least > 0) {
      const Density scaled = rho / active_least;
      for (double theta : {0.2, 0.05}) {
        const Density mix = (1.0 - theta) * scaled + theta * best;
        try_upper(mix, family.most_violated(mix).value);
      }
    }
    // Averaging over level sets of the arrival mass removes the ripple that
    // inexact multipliers leave across near-shortest members.
    if (const Eigen::VectorXd arrival = family.arrival_mass(rho); arrival.size() == dim) {
      const double side = std::sqrt(double((measure.array() > 0).count()));
      for (int mult : {2, 4}) {
        const Density levelled = level_average(rho, arrival, measure, std::max(4, int(mult * side)));
        try_upper(levelled, family.most_violated(levelled).value);
      }
    }
    result.history.push_back({outer, result.inner_iterations, lower, upper, active.size()});
    if (std::isfinite(upper) && upper - lower <= cfg.tol_gap * std::max(lower, cfg.epsilon_floor)) {
      result.status = SolveStatus::Converged;
      break;
    }

    // A member is violated when it charges the active-feasible rescaling of rho
    // with less than 1 - tol_admissibility.
    const double threshold = active.empty() ? kInf : active_least * (1.0 - cfg.tol_admissibility);
    std::size_t added = 0;
    for (auto& c : family.violated(rho, threshold, cfg.cuts_per_iteration)) {
      if (c.empty() || !known.insert(c.support).second) continue;
      active.push_back({std::move(c), 0.0});
      idle.push_back(0);
      ++added;
    }
    if (added == 0) {
      // Nothing left to add and the inner solver cannot tighten further.
      if (inner_tol <= 1e-12 && lower >= last_lower && upper >= last_upper) {
        if (++stalled >= 3) break;
      } else {
        stalled = 0;
      }
      inner_tol = std::max(0.25 * inner_tol, 1e-12);
    } else {
      stalled = 0;
    }
    last_lower = lower;
    last_upper = upper;

    DualProblem dp(active, measure, p);
    DualPoint pt;
    pt.lambda = Eigen::VectorXd::Zero(Index(active.size()));
    pt.lambda.head(lambda.size()) = lambda;
    dp.evaluate(pt);
    if (cfg.inner == InnerMethod::ProjectedGradient) {
      const auto scale = diagonal_scaling(dp, pt, rho_ref);
      result.inner_iterations += projected_gradient(dp, pt, scale, cfg, inner_tol, alpha);
    } else {
      result.inner_iterations += coordinate_ascent(dp, pt, cfg, inner_tol);
    }
    lower = std::max(lower, pt.value);
    rho = pt.rho;
    active_least = pt.mass.size() ? pt.mass.minCoeff() : 0.0;
    if (active_least > 0) rho_ref = rho.maxCoeff() / active_least;

    // Drop constraints whose multiplier stayed at zero for a while.
    std::vector<ActiveConstraint> kept;
    std::vector<int> kept_idle;
    std::vector<double> kept_lambda;
    for (std::size_t k = 0; k < active.size(); ++k) {
      active[k].multiplier = pt.lambda(Index(k));
      idle[k] = active[k].multiplier > 0 ? 0 : idle[k] + 1;
      if (idle[k] >= cfg.drop_after) {
        known.erase(active[k].constraint.support);
        continue;
      }
      kept_lambda.push_back(active[k].multiplier);
      kept_idle.push_back(idle[k]);
      kept.push_back(std::move(active[k]));
    }
    active = std::move(kept);
    idle = std::move(kept_idle);
    lambda = Eigen::Map<Eigen::VectorXd>(kept_lambda.data(), Index(kept_lambda.size()));
    if (kept.size() != std::size_t(pt.lambda.size())) {
      DualProblem reduced(active, measure, p);
      DualPoint q;
      q.lambda = lambda;
      reduced.evaluate(q);
      active_least = q.mass.size() ? q.mass.minCoeff() : 0.0;
    }
  }

  result.value = upper;
  result.lower_bound = std::min(lower, upper);
  result.rho_star = best;
  result.active = std::move(active);
  const auto check = family.most_violated(best);
  result.violation = check.value - 1.0;
  return result;
}

ReciprocityReport verify_reciprocity(const MetricGrid& grid, double p, const SolverConfig& cfg,
                                     double tol_reciprocity, Side first, Side second) {
  ReciprocityReport r;
  r.p = p;
  if (!(p > 1)) throw std::invalid_argument("verify_reciprocity: p must exceed 1");
  r.q = p / (p - 1.0);
  r.threshold = std::numbers::pi / 4.0 * (1.0 - tol_reciprocity);

  SolverConfig gamma_cfg = cfg, sigma_cfg = cfg;
  gamma_cfg.p = r.p;
  sigma_cfg.p = r.q;
  const ConnectingFamily gamma(grid, first, second);
  const SeparatingFamily sigma(grid, first, second);
  r.gamma = solve_modulus(gamma, grid, gamma_cfg);
  r.sigma = solve_modulus(sigma, grid, sigma_cfg);
  r.mod_p_gamma = r.gamma.value;
  r.mod_q_sigma = r.sigma.value;

  if (r.mod_p_gamma == 0.0) {
    r.degenerate = true;
    r.product = r.certified_product = kInf;
    r.pass = r.sigma.status == SolveStatus::Unbounded;
    return r;
  }
  if (r.sigma.status == SolveStatus::Unbounded) {
    r.product = r.certified_product = kInf;
    r.pass = r.gamma.converged();
    return r;
  }
  r.product = std::pow(r.mod_p_gamma, 1.0 / r.p) * std::pow(r.mod_q_sigma, 1.0 / r.q);
  r.certified_product =
      std::pow(r.gamma.lower_bound, 1.0 / r.p) * std::pow(r.sigma.lower_bound, 1.0 / r.q);
  r.pass = r.gamma.converged() && r.sigma.converged() && r.product >= r.threshold;
  return r;
}

}  // namespace modrecip
