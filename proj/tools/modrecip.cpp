#include "modrecip/harness/config.hpp"
#include "modrecip/harness/experiments.hpp"
#include "modrecip/harness/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

using namespace modrecip::harness;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string config;
  std::string out;
  std::string csv;
  unsigned long long seed = 0;
  int workers = 1;
  bool timings = false;
};

std::string keys_help() {
  std::ostringstream s;
  s << "\nConfig file: one `key = value` per line, `#` starts a comment.\n";
  for (const auto& [key, text] : config_keys()) s << "  " << key << "  " << text << "\n";
  s << "\nExit status: 0 all rows pass, 1 some row fails, 2 usage or config error, "
       "3 runtime or I/O error.\n";
  return s.str();
}

void summarize(const Report& report) {
  for (const Row& r : report.rows)
    std::fprintf(stderr, "%-14s n=%-4d p=%-5g %-4s value=%-12.6g ref=%-12.6g err=%-10.3g %s\n",
                 r.instance.c_str(), r.n, r.p, std::string(modrecip::to_string(r.norm)).c_str(),
                 r.value, r.reference, r.rel_error, r.pass ? "pass" : "FAIL");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete p-modulus of curve and boundary families on planar grids"};
  app.footer(keys_help());
  app.require_subcommand(1);

  Options opt;
  for (auto kind : {Experiment::Modulus, Experiment::Reciprocity, Experiment::Sharpness,
                    Experiment::Coarea, Experiment::Convergence}) {
    auto* sub = app.add_subcommand(std::string(to_string(kind)));
    sub->add_option("--config", opt.config, "experiment config file")->required();
    sub->add_option("--out", opt.out, "JSON report path (default: stdout)");
    sub->add_option("--csv", opt.csv, "CSV table path");
    sub->add_option("--seed", opt.seed, "seed for randomized instances")->capture_default_str();
    sub->add_option("--workers", opt.workers, "concurrent instances")->capture_default_str();
    sub->add_flag("--timings", opt.timings, "include wall-clock seconds (not byte-stable)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : kExitUsage;
  }

  const auto kind = *parse_experiment(app.get_subcommands().front()->get_name());
  ExperimentConfig cfg;
  try {
    cfg = load_config(opt.config, kind);
    cfg.seed = opt.seed;
    cfg.workers = opt.workers;
    cfg = resolve(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const Report report = run(cfg);
    const std::string json = render_json(report, opt.timings);
    if (opt.out.empty()) std::cout << json;
    else write_file(opt.out, json);
    if (!opt.csv.empty()) {
      std::ostringstream table;
      emit_csv(report, table);
      write_file(opt.csv, table.str());
    }
    summarize(report);
    return report.pass ? 0 : kExitFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
