#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "brute_force.hpp"
#include "modrecip/curves.hpp"
#include "modrecip/grid.hpp"
#include "modrecip/hausdorff.hpp"

#include <numbers>
#include <random>
#include <set>

using namespace modrecip;
using doctest::Approx;

constexpr double pi = std::numbers::pi;

TEST_CASE("unit ball volumes") {
  CHECK(v_coeff(1.0) == Approx(2.0).epsilon(1e-14));
  CHECK(v_coeff(2.0) == Approx(pi).epsilon(1e-14));
  CHECK(v_coeff(3.0) == Approx(4.0 * pi / 3.0).epsilon(1e-14));
  CHECK(v_coeff(1.5f) == Approx(std::pow(pi, 0.75) / std::tgamma(1.75)).epsilon(1e-6));
  CHECK_THROWS_AS(v_coeff(0.5), std::domain_error);
  CHECK_THROWS_AS(v_coeff(std::nan("")), std::domain_error);

  const auto c = HausdorffConstants::for_norm(Norm::L2);
  CHECK(c.coarea_const == Approx(4.0 / pi).epsilon(1e-14));
}

TEST_CASE("Hausdorff density matches the isodiametric area") {
  std::mt19937_64 rng(12345);
  // The density is (pi/4) over the largest area of a unit-diameter set.
  for (Norm norm : {Norm::L1, Norm::LInf}) {
    const double area = brute::isodiametric_area(norm, rng);
    const double density = hausdorff_density_2d<double>(norm);
    CHECK(pi / 4.0 / area == Approx(density).epsilon(0.01));
    // a hill climb only finds feasible sets, so it never beats the true maximum
    CHECK(area <= pi / 4.0 / density + 1e-12);
  }
  CHECK(hausdorff_density_2d<double>(Norm::L2) == 1.0);
}

TEST_CASE("norms and steps") {
  const Displacement<double> d(3.0, -4.0);
  CHECK(norm_of(Norm::L1, d) == 7.0);
  CHECK(norm_of(Norm::L2, d) == 5.0);
  CHECK(norm_of(Norm::LInf, d) == 4.0);
  CHECK(step_length(Norm::L2, d, 2.0) == 10.0);
  CHECK(parse_norm("linf") == Norm::LInf);
  CHECK_FALSE(parse_norm("l3").has_value());
  for (Norm n : {Norm::L1, Norm::L2, Norm::LInf}) CHECK(parse_norm(to_string(n)) == n);
}

TEST_CASE("grid layout") {
  const MetricGrid g(4, 2.0, 1.0, Norm::L2);
  CHECK(g.size() == 16);
  CHECK(g.hx() == 0.5);
  CHECK(g.hy() == 0.25);
  CHECK(g.spacing() == 0.5);
  CHECK(g.node(1, 2) == 9);
  CHECK(g.column(9) == 1);
  CHECK(g.row(9) == 2);
  CHECK(g.position(9).isApprox(Eigen::Vector2d(0.75, 0.625)));
  CHECK(g.total_measure() == Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(g.cell_measure(16), std::out_of_range);
  CHECK_THROWS_AS(g.cell_measure(-1), std::out_of_range);
  CHECK_THROWS_AS(MetricGrid(1, 1, 1, Norm::L2), std::invalid_argument);
  CHECK_THROWS_AS(MetricGrid(4, 0, 1, Norm::L2), std::invalid_argument);
  CHECK_THROWS_AS(MetricGrid(2, 1, 1, Norm::L2, Eigen::VectorXd::Zero(4)), std::invalid_argument);
}

TEST_CASE("measures carry the norm density and the squared weight") {
  for (Norm norm : {Norm::L1, Norm::L2, Norm::LInf}) {
    const MetricGrid g(5, 1.0, 3.0, norm, Eigen::VectorXd::Constant(25, 2.0));
    CHECK(g.total_measure() == Approx(4.0 * 3.0 * hausdorff_density_2d<double>(norm)));
  }
}

TEST_CASE("edge lengths") {
  const MetricGrid sq(4, 1.0, 1.0, Norm::LInf);
  const Index a = sq.node(1, 1);
  CHECK(sq.edge_length(a, sq.node(2, 2)) == Approx(0.25));
  CHECK(sq.edge_length(a, sq.node(2, 1)) == Approx(0.25));
  const MetricGrid l1(4, 1.0, 1.0, Norm::L1);
  CHECK(l1.edge_length(a, l1.node(2, 2)) == Approx(0.5));
  const MetricGrid l2(4, 1.0, 1.0, Norm::L2);
  CHECK(l2.edge_length(a, l2.node(0, 0)) == Approx(std::sqrt(2.0) / 4));

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd w = brute::random_field(rng, 16, 0.0).array() + 0.1;
    const MetricGrid g(4, 1.5, 0.7, Norm(trial % 3), w);
    for (Index v = 0; v < g.size(); ++v)
      for (Index u : brute::neighbours(g, v)) {
        CHECK(g.edge_length(u, v) == Approx(g.edge_length(v, u)));
        CHECK(g.edge_length(u, v) == Approx(brute::distance(g, u, v)));
      }
  }
}

TEST_CASE("closed sides include corners and labels partition the boundary") {
  const int n = 5;
  const MetricGrid g(n, 1.0, 1.0, Norm::L2);
  for (Side s : {Side::A, Side::B, Side::C, Side::D}) CHECK(g.side_nodes(s).size() == std::size_t(n));
  const auto a = g.side_nodes(Side::A), b = g.side_nodes(Side::B);
  CHECK(std::find(a.begin(), a.end(), g.node(0, 0)) != a.end());
  CHECK(std::find(b.begin(), b.end(), g.node(0, 0)) != b.end());

  std::set<Index> boundary;
  for (Side s : {Side::A, Side::B, Side::C, Side::D})
    for (Index v : g.side_nodes(s)) boundary.insert(v);
  for (Index v = 0; v < g.size(); ++v) {
    const auto label = g.boundary_label(v);
    CHECK(label.has_value() == bool(boundary.count(v)));
    if (label) {
      const auto nodes = g.side_nodes(*label);
      CHECK(std::find(nodes.begin(), nodes.end(), v) != nodes.end());
    }
  }
  CHECK(g.boundary_label(g.node(0, 0)) == Side::A);
  CHECK(g.boundary_label(g.node(n - 1, n - 1)) == Side::C);
}

TEST_CASE("sides") {
  CHECK(opposite_pair(Side::A, Side::C) == std::pair{Side::B, Side::D});
  CHECK(opposite_pair(Side::B, Side::D) == std::pair{Side::C, Side::A});
  CHECK_THROWS_AS(opposite_pair(Side::A, Side::B), std::invalid_argument);
  for (char c : {'A', 'B', 'C', 'D'}) CHECK(to_char(*parse_side(c)) == c);
  CHECK_FALSE(parse_side('E').has_value());
}

TEST_CASE("grid presets") {
  const auto cut = make_grid({6, 1.0, 1.0, Norm::L2, "cut"});
  int removed = 0;
  for (Index v = 0; v < cut.size(); ++v)
    if (!cut.active(v)) {
      ++removed;
      CHECK(cut.column(v) == 3);
      CHECK(cut.cell_measure(v) == 0.0);
    }
  CHECK(removed == 6);

  const auto bump = make_grid({9, 1.0, 1.0, Norm::L2, "bump"});
  CHECK(bump.weights().minCoeff() >= 1.0);
  CHECK(bump.weights().maxCoeff() <= 1.5);
  CHECK(bump.weight(bump.node(4, 4)) > bump.weight(bump.node(0, 0)));

  CHECK(make_grid({3, 1.0, 1.0, Norm::L2, "2.5"}).weight(4) == 2.5);
  for (const char* bad : {"0", "-1", "abc", "2x", "inf", ""})
    CHECK_THROWS_AS(make_grid({3, 1.0, 1.0, Norm::L2, bad}), std::invalid_argument);
}

TEST_CASE("curves") {
  const MetricGrid g(4, 1.0, 1.0, Norm::L2);
  CHECK_THROWS_AS(make_curve(g, {0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(make_curve(g, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(make_curve(g, {3, 4}), std::invalid_argument);  // wraps around a row

  const auto c = make_curve(g, {0, 1, 5, 6, 7});
  CHECK(c.simple);
  CHECK(c.total_length == Approx(1.0));
  CHECK(make_curve(g, {0, 5, 10}).total_length == Approx(std::sqrt(2.0) / 2));
  CHECK_FALSE(make_curve(g, {0, 1, 0}).simple);

  std::mt19937_64 rng(3);
  const Eigen::VectorXd rho = brute::random_field(rng, g.size());
  CHECK(line_integral(c, rho) == Approx(brute::trapezoid(g, c.nodes, rho)));
  CHECK(curve_measure(c).integrate(rho) == Approx(line_integral(c, rho)));
  CHECK(curve_measure(c).total == Approx(c.total_length));
}

TEST_CASE("loop erasure of random walks") {
  const MetricGrid g(6, 1.0, 1.0, Norm::LInf);
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Index> walk{Index(rng() % 36)};
    const int steps = 1 + int(rng() % 40);
    for (int s = 0; s < steps; ++s) {
      const auto nb = brute::neighbours(g, walk.back());
      walk.push_back(nb[rng() % nb.size()]);
    }
    const auto curve = make_curve(g, walk);
    const auto erased = loop_erase(g, curve);
    CHECK(erased.simple);
    CHECK(erased.nodes.front() == walk.front());
    CHECK(erased.nodes.back() == walk.back());
    const std::set<Index> visited(walk.begin(), walk.end());
    for (Index v : erased.nodes) CHECK(visited.count(v) == 1);
    CHECK(erased.total_length <= curve.total_length + 1e-12);
  }
}

TEST_CASE("dual path measure spans the domain") {
  const MetricGrid g(5, 2.0, 3.0, Norm::L2);
  std::vector<Index> column;
  for (int j = 0; j < 5; ++j) column.push_back(g.node(2, j));
  const auto m = dual_path_measure(g, make_curve(g, column), Side::B, Side::D);
  CHECK(m.total == Approx(3.0));
  std::vector<Index> row;
  for (int i = 0; i < 5; ++i) row.push_back(g.node(i, 1));
  CHECK(dual_path_measure(g, make_curve(g, row), Side::A, Side::C).total == Approx(2.0));
}

TEST_CASE("density validation") {
  const MetricGrid g(3, 1.0, 1.0, Norm::L2);
  CHECK_NOTHROW(validate_density(g, Eigen::VectorXd::Zero(9)));
  CHECK_THROWS_AS(validate_density(g, Eigen::VectorXd::Zero(8)), std::invalid_argument);
  Eigen::VectorXd bad = Eigen::VectorXd::Ones(9);
  bad(4) = -1e-300;
  CHECK_THROWS_AS(validate_density(g, bad), std::invalid_argument);
  bad(4) = std::nan("");
  CHECK_THROWS_AS(validate_density(g, bad), std::invalid_argument);
}
