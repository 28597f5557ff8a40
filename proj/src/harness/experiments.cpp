#include "modrecip/harness/experiments.hpp"

#include "modrecip/families.hpp"
#include "modrecip/modulus.hpp"
#include "modrecip/potential.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

namespace modrecip::harness {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuarterPi = std::numbers::pi / 4.0;

using Task = std::function<std::vector<Row>()>;

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

GridSpec at_size(const GridSpec& spec, int n) {
  GridSpec s = spec;
  s.n = n;
  return s;
}

// Reference value for a constant weight, if the weight expression is one.
std::optional<double> constant_weight(const std::string& weight) {
  try {
    std::size_t used = 0;
    const double w = std::stod(weight, &used);
    if (used == weight.size()) return w;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

void add_certificates(Row& row, const std::string& prefix, const ModulusResult& r) {
  row.details.emplace_back(prefix + "lower_bound", r.lower_bound);
  row.details.emplace_back(prefix + "relative_gap", r.relative_gap());
  row.details.emplace_back(prefix + "violation", r.violation);
  row.details.emplace_back(prefix + "outer_iterations", r.outer_iterations);
  row.details.emplace_back(prefix + "active_constraints", double(r.active.size()));
}

Row modulus_row(const ExperimentConfig& cfg, const std::string& instance, int n, double p,
                double tolerance) {
  const auto start = std::chrono::steady_clock::now();
  const GridSpec spec = at_size(cfg.grid, n);
  const MetricGrid grid = make_grid(spec);
  SolverConfig solver = cfg.solver;
  solver.p = p;

  ModulusResult result;
  if (cfg.family == FamilyKind::Connecting) {
    const ConnectingFamily family(grid, Side::A, Side::C);
    result = solve_modulus(family, grid, solver);
  } else {
    const SeparatingFamily family(grid, Side::A, Side::C);
    result = solve_modulus(family, grid, solver);
  }

  Row row;
  row.instance = instance;
  row.n = n;
  row.p = p;
  row.norm = spec.norm;
  row.value = result.value;
  row.tolerance = tolerance;
  row.status = std::string(to_string(result.status));
  if (const auto w = constant_weight(spec.weight)) {
    row.reference = rectangle_modulus(spec.norm, spec.width, spec.height, *w, p, cfg.family);
  } else if (spec.weight == "cut") {
    row.reference = cfg.family == FamilyKind::Connecting ? 0.0 : kInf;
  } else {
    row.reference = std::numeric_limits<double>::quiet_NaN();
  }
  row.rel_error = relative_error(row.value, row.reference);
  if (spec.weight == "cut") {
    row.pass = cfg.family == FamilyKind::Connecting ? result.converged() && result.value == 0.0
                                                    : result.status == SolveStatus::Unbounded;
  } else {
    row.pass = result.converged() &&
               (std::isnan(row.reference) || std::abs(row.rel_error) <= tolerance);
  }
  add_certificates(row, "", result);
  row.seconds = elapsed(start);
  return row;
}

Row reciprocity_row(const ExperimentConfig& cfg, int n, double p, double tolerance) {
  const auto start = std::chrono::steady_clock::now();
  const GridSpec spec = at_size(cfg.grid, n);
  const MetricGrid grid = make_grid(spec);
  const auto r = verify_reciprocity(grid, p, cfg.solver, tolerance);

  Row row;
  row.instance = "reciprocity";
  row.n = n;
  row.p = p;
  row.norm = spec.norm;
  row.value = r.product;
  row.reference = kQuarterPi;
  row.rel_error = relative_error(r.product, kQuarterPi);
  row.tolerance = tolerance;
  row.pass = r.pass;
  row.status = r.degenerate ? "degenerate" : std::string(to_string(r.gamma.status)) + "/" +
                                                 std::string(to_string(r.sigma.status));
  row.details = {{"q", r.q},
                 {"mod_p_gamma", r.mod_p_gamma},
                 {"mod_q_sigma", r.mod_q_sigma},
                 {"certified_product", r.certified_product},
                 {"threshold", r.threshold}};
  add_certificates(row, "gamma_", r.gamma);
  add_certificates(row, "sigma_", r.sigma);
  row.seconds = elapsed(start);
  return row;
}

std::vector<Row> coarea_rows(const ExperimentConfig& cfg, int n, double tolerance) {
  const auto start = std::chrono::steady_clock::now();
  const GridSpec spec = at_size(cfg.grid, n);
  const MetricGrid grid = make_grid(spec);
  const Density ones = Density::Ones(grid.size());

  auto base_row = [&](std::string instance, double value, double reference) {
    Row row;
    row.instance = std::move(instance);
    row.n = n;
    row.p = cfg.solver.p;
    row.norm = spec.norm;
    row.value = value;
    row.reference = reference;
    row.rel_error = relative_error(value, reference);
    row.tolerance = tolerance;
    row.status = "ok";
    return row;
  };
  std::vector<Row> rows;

  // Equality case: rho = g = 1.
  const auto pot = normalize_on_sink(chain_potential(grid, ones, Side::A));
  const auto equal = coarea_check(pot, ones, cfg.levels);
  Row eq = base_row("coarea", equal.ratio, 1.0);
  eq.pass = std::abs(eq.rel_error) <= tolerance;
  eq.details = {{"lhs", equal.lhs}, {"rhs", equal.rhs}};
  rows.push_back(std::move(eq));

  // Random rho and g: the ratio may only fall below 1.
  std::mt19937_64 rng(cfg.seed * 1000003ULL + unsigned(n));
  std::uniform_real_distribution<double> draw(0.5, 1.5);
  Density rho(grid.size()), g(grid.size());
  for (Index v = 0; v < grid.size(); ++v) rho(v) = draw(rng);
  for (Index v = 0; v < grid.size(); ++v) g(v) = draw(rng);
  const auto random_pot = normalize_on_sink(chain_potential(grid, g, Side::A));
  const auto bound = coarea_check(random_pot, rho, cfg.levels);
  Row rb = base_row("coarea_random", bound.ratio, 1.0);
  rb.pass = bound.ratio <= 1.0 + tolerance;
  rb.details = {{"lhs", bound.lhs},
                {"rhs", bound.rhs},
                {"lipschitz_excess",
                 lipschitz_excess(grid, random_pot.u, random_pot.g, random_pot.step_radius)}};
  rows.push_back(std::move(rb));

  const auto eil = eilenberg_check(grid, pot.u, {}, 4 * cfg.levels);
  Row er = base_row("eilenberg", eil.ratio, 1.0);
  er.pass = eil.ratio <= 1.0 + tolerance;
  er.details = {{"lhs", eil.lhs}, {"rhs", eil.rhs}};
  rows.push_back(std::move(er));

  const double secs = elapsed(start);
  for (auto& r : rows) r.seconds = secs / double(rows.size());
  return rows;
}

std::vector<Task> plan(const ExperimentConfig& cfg) {
  std::vector<Task> tasks;
  const double tol = cfg.tolerance.value_or(0.1);
  switch (cfg.experiment) {
    case Experiment::Modulus:
      for (int n : cfg.n_sweep)
        for (double p : cfg.p_sweep)
          tasks.push_back([&cfg, n, p, tol] { return std::vector{modulus_row(cfg, "modulus", n, p, tol)}; });
      break;
    case Experiment::Sharpness:
      for (int n : cfg.n_sweep)
        for (double p : cfg.p_sweep) {
          // the allowance holds from n = 64 up and widens like the mesh below it
          const double t = cfg.tolerance.value_or(p == 2.0 ? 0.05 : 0.08) * std::max(1.0, 64.0 / n);
          tasks.push_back([&cfg, n, p, t] { return std::vector{modulus_row(cfg, "sharpness", n, p, t)}; });
        }
      break;
    case Experiment::Convergence: {
      const int finest = *std::max_element(cfg.n_sweep.begin(), cfg.n_sweep.end());
      // first-order convergence: the allowance shrinks with the mesh
      for (int n : cfg.n_sweep)
        for (double p : cfg.p_sweep) {
          const double t = tol * double(finest) / double(n);
          tasks.push_back([&cfg, n, p, t] { return std::vector{modulus_row(cfg, "convergence", n, p, t)}; });
        }
      break;
    }
    case Experiment::Reciprocity:
      for (int n : cfg.n_sweep)
        for (double p : cfg.p_sweep)
          tasks.push_back([&cfg, n, p, tol] { return std::vector{reciprocity_row(cfg, n, p, tol)}; });
      break;
    case Experiment::Coarea: {
      const double t = cfg.tolerance.value_or(0.05);
      for (int n : cfg.n_sweep) tasks.push_back([&cfg, n, t] { return coarea_rows(cfg, n, t); });
      break;
    }
  }
  return tasks;
}

// Observed convergence order between consecutive sizes at the same exponent.
void annotate_orders(std::vector<Row>& rows) {
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (std::size_t j = k; j-- > 0;) {
      if (rows[j].p != rows[k].p || rows[j].n >= rows[k].n) continue;
      const double e0 = std::abs(rows[j].rel_error), e1 = std::abs(rows[k].rel_error);
      if (e0 > 0 && e1 > 0 && std::isfinite(e0) && std::isfinite(e1))
        rows[k].details.emplace_back("observed_order",
                                     std::log(e0 / e1) / std::log(double(rows[k].n) / rows[j].n));
      break;
    }
}

}  // namespace

double rectangle_modulus(Norm norm, double width, double height, double weight, double p,
                         FamilyKind family) {
  const double c = hausdorff_density_2d<double>(norm);
  const double across = family == FamilyKind::Connecting ? width : height;
  const double along = family == FamilyKind::Connecting ? height : width;
  return c * std::pow(weight, 2.0 - p) * along * std::pow(across, 1.0 - p);
}

double relative_error(double value, double reference) {
  if (value == reference) return 0.0;
  if (std::isnan(reference)) return reference;
  if (reference == 0.0 || std::isinf(reference)) return kInf;
  return (value - reference) / reference;
}

Report run(const ExperimentConfig& config) {
  Report report;
  report.config = resolve(config);
  const auto tasks = plan(report.config);

  std::vector<std::vector<Row>> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < tasks.size();) {
      try {
        results[k] = tasks[k]();
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const auto count = std::min<std::size_t>(std::size_t(report.config.workers), tasks.size());
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < count; ++k) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (auto& rows : results)
    for (auto& r : rows) report.rows.push_back(std::move(r));
  if (report.config.experiment == Experiment::Convergence) annotate_orders(report.rows);
  report.pass = std::all_of(report.rows.begin(), report.rows.end(),
                            [](const Row& r) { return r.pass; });
  return report;
}

}  // namespace modrecip::harness
