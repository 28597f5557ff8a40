// Experiment configuration: a flat `key = value` file with dotted sections.
#pragma once

#include "modrecip/grid.hpp"
#include "modrecip/modulus.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace modrecip::harness {

enum class Experiment { Modulus, Reciprocity, Sharpness, Coarea, Convergence };

std::string_view to_string(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view text);

enum class FamilyKind { Connecting, Separating };

/// Raised for malformed files and out-of-range values. `field` names the key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::Modulus;
  GridSpec grid;
  SolverConfig solver;
  int levels = 64;
  /// Empty means the experiment default (or grid.n).
  std::vector<int> n_sweep;
  std::vector<double> p_sweep;
  /// Relative tolerance; unset means the experiment default.
  std::optional<double> tolerance;
  FamilyKind family = FamilyKind::Connecting;
  unsigned long long seed = 0;
  int workers = 1;
};

/// Keys, their defaults and meaning, as printed by --help.
std::vector<std::pair<std::string, std::string>> config_keys();

/// Parses the file body on top of the defaults for `experiment`. Unknown keys,
/// repeated keys and bad values throw ConfigError.
ExperimentConfig parse_config(std::string_view text, Experiment experiment);
ExperimentConfig load_config(const std::filesystem::path& path, Experiment experiment);

/// Fills experiment defaults (sweeps, tolerance) and validates everything.
ExperimentConfig resolve(ExperimentConfig cfg);

/// Every effective setting, in a fixed order, as strings.
std::vector<std::pair<std::string, std::string>> echo(const ExperimentConfig& cfg);

}  // namespace modrecip::harness
