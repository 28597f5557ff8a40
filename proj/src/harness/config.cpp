#include "modrecip/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace modrecip::harness {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw ConfigError(key, "expected a number, got '" + std::string(text) + "'");
  return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, std::string_view text) {
  std::vector<T> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_number<T>(key, text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::string format(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

template <typename T>
std::string format_list(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k) out += ", ";
    if constexpr (std::is_integral_v<T>) out += std::to_string(xs[k]);
    else out += format(xs[k]);
  }
  return out;
}

ExperimentConfig defaults(Experiment e) {
  ExperimentConfig cfg;
  cfg.experiment = e;
  if (e == Experiment::Sharpness || e == Experiment::Coarea) cfg.grid.norm = Norm::LInf;
  return cfg;
}

using Setter = void (*)(ExperimentConfig&, const std::string&, std::string_view);

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"grid.n", [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         c.grid.n = parse_number<int>(k, v);
       }},
      {"grid.width", [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         c.grid.width = parse_number<double>(k, v);
       }},
      {"grid.height", [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         c.grid.height = parse_number<double>(k, v);
       }},
      {"grid.norm", [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         const auto norm = parse_norm(v);
         if (!norm) throw ConfigError(k, "expected one of l1, l2, linf");
         c.grid.norm = *norm;
       }},
      {"grid.weight", [](ExperimentConfig& c, const std::string&, std::string_view v) {
         c.grid.weight = std::string(v);
       }},
      {"solver.p", [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         c.solver.p = parse_number<double>(k, v);
       }},
      {"solver.tol_gap", [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         c.solver.tol_gap = parse_number<double>(k, v);
       }},
      {"solver.tol_admissibility",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         c.solver.tol_admissibility = parse_number<double>(k, v);
       }},
      {"solver.max_outer_iters", [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         c.solver.max_outer_iters = parse_number<int>(k, v);
       }},
      {"solver.max_inner_iters", [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         c.solver.max_inner_iters = parse_number<int>(k, v);
       }},
      {"solver.cuts_per_iteration",
       [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         const int cuts = parse_number<int>(k, v);
         if (cuts < 1) throw ConfigError(k, "must be positive");
         c.solver.cuts_per_iteration = std::size_t(cuts);
       }},
      {"solver.inner", [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         if (v == "projected_gradient") c.solver.inner = InnerMethod::ProjectedGradient;
         else if (v == "coordinate_ascent") c.solver.inner = InnerMethod::CoordinateAscent;
         else throw ConfigError(k, "expected projected_gradient or coordinate_ascent");
       }},
      {"experiment.levels", [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         c.levels = parse_number<int>(k, v);
       }},
      {"experiment.n_sweep", [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         c.n_sweep = parse_list<int>(k, v);
       }},
      {"experiment.p_sweep", [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         c.p_sweep = parse_list<double>(k, v);
       }},
      {"experiment.tolerance", [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         c.tolerance = parse_number<double>(k, v);
       }},
      {"experiment.family", [](ExperimentConfig& c, const std::string& k, std::string_view v) {
         if (v == "connecting") c.family = FamilyKind::Connecting;
         else if (v == "separating") c.family = FamilyKind::Separating;
         else throw ConfigError(k, "expected connecting or separating");
       }},
  };
  return table;
}

}  // namespace

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Modulus: return "modulus";
    case Experiment::Reciprocity: return "reciprocity";
    case Experiment::Sharpness: return "sharpness";
    case Experiment::Coarea: return "coarea";
    case Experiment::Convergence: return "convergence";
  }
  return "?";
}

std::optional<Experiment> parse_experiment(std::string_view text) {
  for (auto e : {Experiment::Modulus, Experiment::Reciprocity, Experiment::Sharpness,
                 Experiment::Coarea, Experiment::Convergence})
    if (to_string(e) == text) return e;
  return std::nullopt;
}

std::vector<std::pair<std::string, std::string>> config_keys() {
  return {
      {"grid.n", "lattice size per axis (default 32)"},
      {"grid.width", "domain width (default 1)"},
      {"grid.height", "domain height (default 1)"},
      {"grid.norm", "l1 | l2 | linf (default l2; linf for sharpness and coarea)"},
      {"grid.weight", "positive number, bump or cut (default 1)"},
      {"solver.p", "exponent, at least 1.05 (default 2)"},
      {"solver.tol_gap", "relative duality gap at termination (default 1e-3)"},
      {"solver.tol_admissibility", "violation slack for new cuts (default 1e-4)"},
      {"solver.max_outer_iters", "constraint generation rounds (default 500)"},
      {"solver.max_inner_iters", "inner iterations per round (default 2000)"},
      {"solver.cuts_per_iteration", "members added per round (default 8)"},
      {"solver.inner", "projected_gradient | coordinate_ascent (default projected_gradient)"},
      {"experiment.levels", "level count for coarea (default 64)"},
      {"experiment.n_sweep", "comma separated sizes (default grid.n; 16,32,64 for sharpness; "
                             "8,16,32,64 for convergence)"},
      {"experiment.p_sweep", "comma separated exponents (default solver.p)"},
      {"experiment.tolerance", "relative tolerance of each row (default 0.1; sharpness 0.05 at "
                               "p = 2 and 0.08 otherwise, times 64/n below n = 64; coarea 0.05; "
                               "convergence times n_max/n)"},
      {"experiment.family", "connecting | separating, for modulus and convergence"},
  };
}

ExperimentConfig parse_config(std::string_view text, Experiment experiment) {
  ExperimentConfig cfg = defaults(experiment);
  std::map<std::string, int> seen;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no), "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(key, "unknown key");
    if (seen.count(key))
      throw ConfigError(key, "repeated on line " + std::to_string(line_no) + " (first on line " +
                                 std::to_string(seen[key]) + ")");
    seen[key] = line_no;
    if (value.empty()) throw ConfigError(key, "missing value");
    it->second(cfg, key, value);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, Experiment experiment) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot read " + path.string());
  std::ostringstream body;
  body << in.rdbuf();
  return parse_config(body.str(), experiment);
}

ExperimentConfig resolve(ExperimentConfig cfg) {
  if (cfg.n_sweep.empty()) {
    if (cfg.experiment == Experiment::Sharpness) cfg.n_sweep = {16, 32, 64};
    else if (cfg.experiment == Experiment::Convergence) cfg.n_sweep = {8, 16, 32, 64};
    else cfg.n_sweep = {cfg.grid.n};
  }
  if (cfg.p_sweep.empty()) cfg.p_sweep = {cfg.solver.p};

  if (cfg.grid.n < 2) throw ConfigError("grid.n", "must be at least 2");
  for (int n : cfg.n_sweep)
    if (n < 2) throw ConfigError("experiment.n_sweep", "sizes must be at least 2");
  try {
    make_grid(cfg.grid);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("grid", e.what());
  }
  for (double p : cfg.p_sweep) {
    SolverConfig s = cfg.solver;
    s.p = p;
    try {
      s.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("solver", e.what());
    }
    if (cfg.experiment == Experiment::Reciprocity && !(p / (p - 1.0) >= 1.05))
      throw ConfigError("solver.p", "conjugate exponent falls below 1.05");
  }
  if (cfg.levels < 16) throw ConfigError("experiment.levels", "must be at least 16");
  if (cfg.tolerance && !(*cfg.tolerance > 0 && *cfg.tolerance < 1))
    throw ConfigError("experiment.tolerance", "must lie in (0, 1)");
  if (cfg.workers < 1) throw ConfigError("--workers", "must be positive");
  return cfg;
}

std::vector<std::pair<std::string, std::string>> echo(const ExperimentConfig& cfg) {
  const auto& s = cfg.solver;
  return {
      {"experiment", std::string(to_string(cfg.experiment))},
      {"grid.n", std::to_string(cfg.grid.n)},
      {"grid.width", format(cfg.grid.width)},
      {"grid.height", format(cfg.grid.height)},
      {"grid.norm", std::string(to_string(cfg.grid.norm))},
      {"grid.weight", cfg.grid.weight},
      {"solver.p", format(s.p)},
      {"solver.tol_gap", format(s.tol_gap)},
      {"solver.tol_admissibility", format(s.tol_admissibility)},
      {"solver.max_outer_iters", std::to_string(s.max_outer_iters)},
      {"solver.max_inner_iters", std::to_string(s.max_inner_iters)},
      {"solver.cuts_per_iteration", std::to_string(s.cuts_per_iteration)},
      {"solver.inner", std::string(to_string(s.inner))},
      {"experiment.levels", std::to_string(cfg.levels)},
      {"experiment.n_sweep", format_list(cfg.n_sweep)},
      {"experiment.p_sweep", format_list(cfg.p_sweep)},
      {"experiment.tolerance", cfg.tolerance ? format(*cfg.tolerance) : "default"},
      {"experiment.family",
       cfg.family == FamilyKind::Connecting ? "connecting" : "separating"},
      {"seed", std::to_string(cfg.seed)},
  };
}

}  // namespace modrecip::harness
