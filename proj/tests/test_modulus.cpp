#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "brute_force.hpp"
#include "modrecip/modulus.hpp"

#include <numbers>
#include <random>

using namespace modrecip;
using doctest::Approx;

namespace {

SolverConfig tight(double p) {
  SolverConfig cfg;
  cfg.p = p;
  cfg.tol_gap = 1e-9;
  cfg.tol_admissibility = 1e-10;
  cfg.max_inner_iters = 20000;
  return cfg;
}

double weighted_distance(const Density& a, const Density& b, const Eigen::VectorXd& m, double p) {
  return (m.array() * (a - b).array().abs().pow(p)).sum();
}

}  // namespace

TEST_CASE("single constraint on the 2 x 2 grid has the closed form value") {
  const MetricGrid g(2, 1.0, 1.0, Norm::L2);
  std::mt19937_64 rng(1);
  for (double p : {1.5, 2.0, 3.0})
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXd w = brute::random_field(rng, 4, 0.2);
      if (w.maxCoeff() == 0.0) continue;
      MeasureConstraint c;
      for (Index i = 0; i < 4; ++i)
        if (w(i) > 0) {
          c.support.push_back(i);
          c.weights.push_back(w(i));
          c.total += w(i);
        }
      const ExplicitFamily fam(4, {c});
      for (auto inner : {InnerMethod::ProjectedGradient, InnerMethod::CoordinateAscent}) {
        auto cfg = tight(p);
        cfg.inner = inner;
        const auto r = solve_modulus(fam, g, cfg);
        CHECK(r.converged());
        CHECK(r.value == Approx(brute::single_constraint_modulus(w, g.measures(), p)).epsilon(1e-6));
      }
    }
}

TEST_CASE("p = 2 hand-solved instance") {
  // one constraint rho_0 + rho_1 >= 1 with cell measure 1/4: rho = 1/2 on both,
  // energy 2 * (1/4) * (1/4) = 1/8
  const MetricGrid g(2, 1.0, 1.0, Norm::L2);
  const ExplicitFamily fam(4, {MeasureConstraint{{0, 1}, {1.0, 1.0}, 2.0}});
  const auto r = solve_modulus(fam, g, tight(2.0));
  CHECK(r.value == Approx(0.125).epsilon(1e-9));
  CHECK(r.rho_star(0) == Approx(0.5).epsilon(1e-6));
  CHECK(r.rho_star(2) == 0.0);
}

TEST_CASE("disjoint members add") {
  const MetricGrid g(2, 1.0, 1.0, Norm::L1);
  const MeasureConstraint a{{0, 1}, {1.0, 2.0}, 3.0}, b{{3}, {0.5}, 0.5};
  const double expect = brute::single_constraint_modulus(Eigen::Vector4d(1, 2, 0, 0), g.measures(), 3.0) +
                        brute::single_constraint_modulus(Eigen::Vector4d(0, 0, 0, 0.5), g.measures(), 3.0);
  const auto r = solve_modulus(ExplicitFamily(4, {a, b}), g, tight(3.0));
  CHECK(r.value == Approx(expect).epsilon(1e-6));
}

TEST_CASE("Lagrangian values never exceed the modulus") {
  const MetricGrid g(2, 1.0, 1.0, Norm::L2);
  std::mt19937_64 rng(8);
  std::exponential_distribution<double> mult(1.0);
  for (double p : {1.5, 2.0, 3.0})
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::VectorXd w = brute::random_field(rng, 4, 0.0);
      MeasureConstraint c{{0, 1, 2, 3}, {w(0), w(1), w(2), w(3)}, w.sum()};
      const double exact = brute::single_constraint_modulus(w, g.measures(), p);
      const ActiveConstraint active[] = {{c, mult(rng)}};
      CHECK(lagrangian_lower_bound(active, p, g.measures()) <= exact * (1 + 1e-12));
    }
}

TEST_CASE("certificates along the run") {
  for (Norm norm : {Norm::L1, Norm::L2, Norm::LInf})
    for (double p : {1.5, 2.0, 3.0}) {
      const MetricGrid g(10, 1.0, 1.0, norm);
      const ConnectingFamily gamma(g, Side::A, Side::C);
      const SeparatingFamily sigma(g, Side::A, Side::C);
      for (const ConstraintFamily* fam : {static_cast<const ConstraintFamily*>(&gamma),
                                          static_cast<const ConstraintFamily*>(&sigma)}) {
        SolverConfig cfg;
        cfg.p = p;
        const auto r = solve_modulus(*fam, g, cfg);
        REQUIRE(r.converged());
        CHECK(r.relative_gap() <= cfg.tol_gap);
        CHECK(r.violation >= -1e-4);
        CHECK(r.lower_bound <= r.value);
        for (const auto& h : r.history) {
          CHECK(h.lower <= h.upper * (1 + 1e-12));
          CHECK(h.lower <= r.value * (1 + 1e-12));
        }
        CHECK(lagrangian_lower_bound(r.active, p, g.measures()) <= r.value * (1 + 1e-12));
        // the returned density is admissible against a fresh oracle call
        CHECK(fam->most_violated(r.rho_star).value >= 1.0 - 1e-9);
        CHECK(p_energy(r.rho_star, g.measures(), p) == Approx(r.value).epsilon(1e-12));
      }
    }
}

TEST_CASE("separating modulus of a rectangle is exact") {
  // straight columns are the shortest dual paths for a constant density
  for (double p : {1.5, 2.0, 3.0}) {
    const MetricGrid g(12, 2.0, 1.0, Norm::L2);
    SolverConfig cfg;
    cfg.p = p;
    const auto r = solve_modulus(SeparatingFamily(g, Side::A, Side::C), g, cfg);
    CHECK(r.value == Approx(2.0).epsilon(1.01 * cfg.tol_gap));
    CHECK(r.lower_bound <= 2.0 * (1 + 1e-12));
  }
}

TEST_CASE("extremal density does not depend on the starting point") {
  std::mt19937_64 rng(31);
  for (double p : {2.0, 3.0}) {
    const MetricGrid g(12, 1.0, 1.0, Norm::L2);
    const ConnectingFamily gamma(g, Side::A, Side::C);
    SolverConfig cfg;
    cfg.p = p;
    const auto a = solve_modulus(gamma, g, cfg);
    const auto b = solve_modulus(gamma, g, cfg, Density(brute::random_field(rng, g.size(), 0.0)));
    REQUIRE(a.converged());
    REQUIRE(b.converged());
    CHECK(std::abs(a.value - b.value) <= 10 * cfg.tol_gap * a.value);
    CHECK(weighted_distance(a.rho_star, b.rho_star, g.measures(), p) <= 10 * cfg.tol_gap * a.value);
  }
}

TEST_CASE("scaling laws") {
  for (double p : {2.0, 3.0})
    for (Norm norm : {Norm::L2, Norm::LInf}) {
      const MetricGrid g(4, 1.0, 1.0, norm);
      const ConnectingFamily gamma(g, Side::A, Side::C);
      const auto base = solve_modulus(gamma, g, tight(p));
      const auto doubled = solve_modulus(gamma, Eigen::VectorXd(2.0 * g.measures()), tight(p));
      CHECK(doubled.value == Approx(2.0 * base.value).epsilon(1e-6));

      // weight 2 doubles lengths and quadruples measures
      const MetricGrid heavy(4, 1.0, 1.0, norm, Eigen::VectorXd::Constant(16, 2.0));
      const auto r = solve_modulus(ConnectingFamily(heavy, Side::A, Side::C), heavy, tight(p));
      CHECK(r.value == Approx(std::pow(2.0, 2.0 - p) * base.value).epsilon(1e-6));
    }
}

TEST_CASE("inner methods agree") {
  for (double p : {1.5, 2.0, 3.0}) {
    const MetricGrid g(10, 1.0, 1.0, Norm::L2);
    const ConnectingFamily gamma(g, Side::A, Side::C);
    SolverConfig a, b;
    a.p = b.p = p;
    b.inner = InnerMethod::CoordinateAscent;
    const auto x = solve_modulus(gamma, g, a), y = solve_modulus(gamma, g, b);
    REQUIRE(x.converged());
    REQUIRE(y.converged());
    CHECK(x.value == Approx(y.value).epsilon(2 * a.tol_gap));
  }
}

TEST_CASE("degenerate clause") {
  const auto g = make_grid({8, 1.0, 1.0, Norm::L2, "cut"});
  const auto gamma = solve_modulus(ConnectingFamily(g, Side::A, Side::C), g, SolverConfig{});
  CHECK(gamma.converged());
  CHECK(gamma.value == 0.0);
  const auto sigma = solve_modulus(SeparatingFamily(g, Side::A, Side::C), g, SolverConfig{});
  CHECK(sigma.status == SolveStatus::Unbounded);
  CHECK(std::isinf(sigma.value));
  const auto rep = verify_reciprocity(g, 2.0, SolverConfig{});
  CHECK(rep.degenerate);
  CHECK(rep.pass);
}

TEST_CASE("reciprocity on small squares") {
  for (Norm norm : {Norm::L1, Norm::L2, Norm::LInf})
    for (double p : {1.5, 2.0, 3.0}) {
      const MetricGrid g(12, 1.0, 1.0, norm);
      const auto rep = verify_reciprocity(g, p, SolverConfig{});
      CHECK(rep.q == Approx(p / (p - 1)));
      CHECK(rep.pass);
      CHECK(rep.certified_product <= rep.product * (1 + 1e-12));
    }
}

TEST_CASE("configuration checks") {
  SolverConfig cfg;
  cfg.p = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.p = 1.04;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.p = 2.0;
  cfg.tol_gap = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.backtrack = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  const MetricGrid g(4, 1.0, 1.0, Norm::L2);
  const ConnectingFamily gamma(g, Side::A, Side::C);
  CHECK_THROWS_AS(solve_modulus(gamma, g, SolverConfig{}, Density(Density::Ones(3))),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_modulus(gamma, Eigen::VectorXd(Eigen::VectorXd::Ones(5)), SolverConfig{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(verify_reciprocity(g, 1.0, SolverConfig{}), std::invalid_argument);
}
