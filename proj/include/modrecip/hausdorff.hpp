// Norms on the plane and the Hausdorff-measure normalization attached to them.
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string_view>

namespace modrecip {

enum class Norm { L1, L2, LInf };

template <typename Scalar>
using Displacement = Eigen::Matrix<Scalar, 2, 1>;

std::string_view to_string(Norm norm);
std::optional<Norm> parse_norm(std::string_view text);

/// Volume of the Euclidean unit ball in dimension k, pi^{k/2} / Gamma(k/2 + 1).
/// Non-integer k is allowed; k < 1 is rejected.
template <typename Scalar>
Scalar v_coeff(Scalar k) {
  using std::pow;
  using std::tgamma;
  if (!(k >= Scalar(1))) throw std::domain_error("v_coeff: k must be >= 1");
  return pow(std::numbers::pi_v<Scalar>, k / Scalar(2)) / tgamma(k / Scalar(2) + Scalar(1));
}

template <typename Derived>
typename Derived::Scalar norm_of(Norm norm, const Eigen::MatrixBase<Derived>& d) {
  switch (norm) {
    case Norm::L1: return d.template lpNorm<1>();
    case Norm::L2: return d.norm();
    case Norm::LInf: return d.template lpNorm<Eigen::Infinity>();
  }
  return typename Derived::Scalar(0);
}

/// Length of a single step under a conformal weight: weight * |d|_norm.
template <typename Derived>
typename Derived::Scalar step_length(Norm norm, const Eigen::MatrixBase<Derived>& d,
                                     typename Derived::Scalar weight) {
  return weight * norm_of(norm, d);
}

/// The constant c with H^2 = c * Lebesgue for the given norm. It equals
/// (pi/4) divided by the largest area of a set of unit diameter.
template <typename Scalar>
Scalar hausdorff_density_2d(Norm norm) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  switch (norm) {
    case Norm::L1: return pi / Scalar(2);
    case Norm::L2: return Scalar(1);
    case Norm::LInf: return pi / Scalar(4);
  }
  return Scalar(1);
}

struct HausdorffConstants {
  double v1 = 2.0;
  double v2 = std::numbers::pi;
  double density2d = 1.0;
  // 2 v_{N-1} / v_N for N = 2
  double coarea_const = 4.0 / std::numbers::pi;

  static HausdorffConstants for_norm(Norm norm) {
    HausdorffConstants c;
    c.v1 = v_coeff(1.0);
    c.v2 = v_coeff(2.0);
    c.density2d = hausdorff_density_2d<double>(norm);
    c.coarea_const = 2.0 * c.v1 / c.v2;
    return c;
  }
};

}  // namespace modrecip
