#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "brute_force.hpp"
#include "modrecip/potential.hpp"

#include <numbers>
#include <random>

using namespace modrecip;
using doctest::Approx;

namespace {

MetricGrid random_grid(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Eigen::VectorXd w(Index(n) * n);
  for (Index i = 0; i < w.size(); ++i) w(i) = u(rng);
  return MetricGrid(n, u(rng), u(rng), Norm(rng() % 3), w);
}

void check_same(const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
  REQUIRE(got.size() == want.size());
  for (Index v = 0; v < got.size(); ++v) {
    if (std::isinf(want(v))) {
      CHECK(std::isinf(got(v)));
    } else {
      CHECK(got(v) == Approx(want(v)).epsilon(1e-9));
    }
  }
}

// Difference of two convex piecewise-linear functions.
Eigen::VectorXd random_pl(const MetricGrid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> coef(0.0, 1.0);
  std::vector<Eigen::Vector3d> up(3 + rng() % 3), down(1 + rng() % 3);
  for (auto& a : up) a = {coef(rng), coef(rng), coef(rng)};
  for (auto& a : down) a = {coef(rng), coef(rng), coef(rng)};
  Eigen::VectorXd u(g.size());
  for (Index v = 0; v < g.size(); ++v) {
    const auto x = g.position(v);
    double hi = -1e300, lo = -1e300;
    for (const auto& a : up) hi = std::max(hi, a(0) * x.x() + a(1) * x.y() + a(2));
    for (const auto& a : down) lo = std::max(lo, a(0) * x.x() + a(1) * x.y() + a(2));
    u(v) = hi - lo;
  }
  return u;
}

}  // namespace

TEST_CASE("capacity potential matches enumeration") {
  std::mt19937_64 rng(404);
  for (int n = 2; n <= 4; ++n)
    for (int trial = 0; trial < 15; ++trial) {
      const auto g = random_grid(rng, n);
      const Density gr = brute::random_field(rng, g.size());
      check_same(capacity_potential(g, gr, Side::A), brute::capacity(g, gr, Side::A));
      check_same(capacity_potential(g, gr, Side::B), brute::capacity(g, gr, Side::B));
    }
  const auto cut = make_grid({4, 1.0, 1.0, Norm::L2, "cut"});
  const Density ones = Density::Ones(cut.size());
  check_same(capacity_potential(cut, ones, Side::A), brute::capacity(cut, ones, Side::A));
}

TEST_CASE("chain potential matches enumeration") {
  std::mt19937_64 rng(505);
  for (int n = 2; n <= 4; ++n)
    for (int trial = 0; trial < 15; ++trial) {
      const auto g = random_grid(rng, n);
      const Density gr = brute::random_field(rng, g.size());
      const Density floored = gr.cwiseMax(1e-9);
      const auto tight = chain_potential(g, gr, Side::A, g.spacing());
      check_same(tight.F, brute::chain_by_enumeration(g, floored, Side::A, g.spacing()));
      const auto wide = chain_potential(g, gr, Side::A);
      CHECK(wide.step_radius == Approx(3 * g.spacing()));
      check_same(wide.F, brute::chain_by_relaxation(g, floored, Side::A, wide.step_radius));
      CHECK(wide.u.maxCoeff() <= 1.0);
      CHECK(wide.sink == Side::C);
    }
}

TEST_CASE("chain potential arguments") {
  const MetricGrid g(4, 1.0, 1.0, Norm::L2);
  const Density ones = Density::Ones(16);
  CHECK_THROWS_AS(chain_potential(g, ones, Side::A, 0.5 * g.spacing()), std::invalid_argument);
  CHECK_THROWS_AS(chain_potential(g, ones, Side::A, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(chain_potential(g, Density::Ones(3), Side::A), std::invalid_argument);
}

TEST_CASE("g stays a local Lipschitz upper gradient of the potential") {
  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 6 + int(rng() % 12);
    const MetricGrid g(n, 1.0, 0.5 + double(rng() % 4) / 2, Norm(trial % 3));
    const Density gr = brute::random_field(rng, g.size(), 0.2);
    const double radius = g.spacing() * (1 + double(rng() % 3));
    const auto pot = chain_potential(g, gr, Side(trial % 4), radius);
    CHECK(lipschitz_excess(g, pot.u, pot.g, radius) <= 1e-12);
    const auto unit = normalize_on_sink(pot);
    CHECK(lipschitz_excess(g, unit.u, unit.g, radius) <= 1e-12);
    for (Index v : g.side_nodes(unit.sink)) CHECK(unit.u(v) == 1.0);
    for (Index v : g.side_nodes(unit.source)) CHECK(unit.u(v) == 0.0);
  }
}

TEST_CASE("level sets of the distance from the left side") {
  const int n = 16;
  const MetricGrid g(n, 1.0, 1.0, Norm::LInf);
  const auto pot = normalize_on_sink(chain_potential(g, Density::Ones(g.size()), Side::A));
  for (int i = 0; i < n; ++i) CHECK(pot.u(g.node(i, 3)) == Approx(double(i) / (n - 1)));

  CHECK_THROWS_AS(level_set_boundary(pot, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(level_set_boundary(pot, 1.0), std::invalid_argument);
  CHECK(level_set_boundary(pot, 0.01).empty);

  const auto mid = level_set_boundary(pot, 0.5);
  CHECK(mid.spanning);
  CHECK(mid.h1_measure == Approx(1.0));
  CHECK(mid.boundary_nodes.size() == std::size_t(n));
  for (Index v : mid.boundary_nodes) CHECK(g.column(v) == 7);
}

TEST_CASE("coarea equality case") {
  for (int n : {16, 32}) {
    const MetricGrid g(n, 1.0, 1.0, Norm::LInf);
    const Density ones = Density::Ones(g.size());
    const auto pot = normalize_on_sink(chain_potential(g, ones, Side::A));
    const int levels = 64;
    int spanning = 0;
    for (int k = 0; k < levels; ++k)
      if ((k + 0.5) / levels > 1.0 / (n - 1)) ++spanning;
    const auto check = coarea_check(pot, ones, levels);
    // each slice is one column of height 1; g = n / (n - 1) after normalization
    CHECK(check.lhs == Approx(double(spanning) / levels));
    CHECK(check.rhs == Approx(double(n) / (n - 1)));
  }
  const MetricGrid g(8, 1.0, 1.0, Norm::LInf);
  CHECK_THROWS_AS(coarea_check(normalize_on_sink(chain_potential(g, Density::Ones(64), Side::A)),
                               Density::Ones(64), 8),
                  std::invalid_argument);
}

TEST_CASE("coarea bound for random data") {
  std::mt19937_64 rng(707);
  for (int trial = 0; trial < 15; ++trial) {
    const MetricGrid g(10 + int(rng() % 10), 1.0, 1.0, Norm(trial % 3));
    const Density gr = brute::random_field(rng, g.size(), 0.0).array() + 0.1;
    const Density rho = brute::random_field(rng, g.size(), 0.1);
    const auto pot = normalize_on_sink(chain_potential(g, gr, Side(trial % 4)));
    const auto check = coarea_check(pot, rho);
    CHECK(check.ratio <= 1.05);
  }
}

TEST_CASE("Eilenberg sums for linear functions") {
  const int n = 20;
  for (Norm norm : {Norm::L1, Norm::L2, Norm::LInf}) {
    const MetricGrid g(n, 1.0, 1.0, norm);
    Eigen::VectorXd u(g.size());
    for (Index v = 0; v < g.size(); ++v) u(v) = g.position(v).x();
    const double span = double(n - 1) / n;
    const auto check = eilenberg_check(g, u);
    // every level is a vertical segment across the hull of the cell centers
    CHECK(check.lhs == Approx(span * span));
    CHECK(check.rhs == Approx(4.0 / std::numbers::pi * hausdorff_density_2d<double>(norm)));
  }

  const MetricGrid g(8, 1.0, 1.0, Norm::LInf);
  Eigen::VectorXd diag(g.size());
  for (Index v = 0; v < g.size(); ++v) diag(v) = g.position(v).sum();
  CHECK(lipschitz_estimate(g, diag) == Approx(2.0));
  CHECK(eilenberg_check(g, Eigen::VectorXd::Constant(g.size(), 3.0)).lhs == 0.0);
  CHECK_THROWS_AS(eilenberg_check(g, Eigen::VectorXd::Ones(3)), std::invalid_argument);
}

TEST_CASE("Eilenberg ratio for random piecewise-linear functions") {
  std::mt19937_64 rng(808);
  for (int trial = 0; trial < 12; ++trial) {
    const MetricGrid g(32, 1.0, 1.0, Norm(trial % 3));
    const Eigen::VectorXd u = random_pl(g, rng);
    std::vector<char> mask;
    if (trial % 2) {
      mask.assign(std::size_t(g.size()), 0);
      const int i0 = int(rng() % 16), j0 = int(rng() % 16);
      for (int j = j0; j < j0 + 12; ++j)
        for (int i = i0; i < i0 + 12; ++i) mask[std::size_t(g.node(i, j))] = 1;
    }
    CHECK(eilenberg_check(g, u, mask).ratio <= 1.1);
  }
}
