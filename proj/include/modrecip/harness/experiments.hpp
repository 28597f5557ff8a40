// The five experiment kinds, run as independent instances over a worker pool.
#pragma once

#include "modrecip/harness/config.hpp"

#include <string>
#include <utility>
#include <vector>

namespace modrecip::harness {

/// One (instance, n, p, norm) line of a report.
struct Row {
  std::string instance;
  int n = 0;
  double p = 0.0;
  Norm norm = Norm::L2;
  double value = 0.0;
  double reference = 0.0;
  /// (value - reference) / reference; 0 when both are equal (including both infinite).
  double rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string status;
  /// Solver certificates and auxiliary numbers, in a fixed order.
  std::vector<std::pair<std::string, double>> details;
  double seconds = 0.0;
};

struct Report {
  ExperimentConfig config;
  std::vector<Row> rows;
  bool pass = false;
};

/// Runs the configured experiment. Rows come back in instance order whatever
/// the worker count, and are identical for equal configs and seeds.
Report run(const ExperimentConfig& config);

/// Continuum modulus of the curves joining the two vertical sides of a
/// width x height rectangle under a constant weight, or of the boundaries
/// separating those sides.
double rectangle_modulus(Norm norm, double width, double height, double weight, double p,
                         FamilyKind family);

double relative_error(double value, double reference);

}  // namespace modrecip::harness
