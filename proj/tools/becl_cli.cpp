// Command-line front end: run, sweep, report, validate.
//
// Exit codes: 0 ok, 1 configuration error, 2 runtime failure,
// 3 an experiment ran but one of its checks failed.

#include <cstdio>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "becl.hpp"

namespace {

using namespace becl::lab;

enum Exit { kOk = 0, kConfigError = 1, kRuntimeFailure = 2, kCheckFailed = 3 };

struct Common {
  std::string config_path;
  std::string kind;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> emit_plots;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "Config file (INI)");
  cmd->add_option("--kind", c.kind, "Start from the built-in defaults of this kind instead of a file");
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--threads", c.threads, "Worker threads for sweeps");
  cmd->add_option("--emit-plots", c.emit_plots, "Write SVG plots (true/false)");
  cmd->add_option("--set", c.sets, "Override a value: section.key=value (repeatable)");
}

/// defaults < file < BECL_* environment < flags.
ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg;
  if (!c.config_path.empty()) {
    cfg = ExperimentConfig::from_ini(read_text(c.config_path));
  } else if (!c.kind.empty()) {
    cfg = ExperimentConfig::defaults(parse_kind(c.kind));
  } else {
    throw ConfigError("--config", "either --config or --kind is required");
  }
  cfg.apply_environment();
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set", "expected section.key=value, got '" + s + "'");
    cfg.set(s.substr(0, eq), s.substr(eq + 1));
  }
  if (c.out) cfg.set("experiment.out", *c.out);
  if (c.seed) cfg.set("experiment.seed", std::to_string(*c.seed));
  if (c.threads) cfg.set("experiment.threads", std::to_string(*c.threads));
  if (c.emit_plots) cfg.set("experiment.emit_plots", *c.emit_plots);
  cfg.validate();
  return cfg;
}

void print_checks(const RunResult& r) {
  for (const auto& c : r.checks) {
    std::printf("  [%s] %s = %.6g (%s)\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.value, c.bound.c_str());
  }
}

template <typename F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::length_error& e) {
    // an oversized many-body request: shrink the grid, modes or N
    std::fprintf(stderr, "config error: resource budget: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"becl: condensate dimensional-reduction experiments"};
  app.require_subcommand(1);

  Common run_opts, sweep_opts, validate_opts;
  auto* run = app.add_subcommand("run", "Run one experiment");
  add_common(run, run_opts);
  auto* sweep = app.add_subcommand("sweep", "Run the Cartesian product of the [sweep] section");
  add_common(sweep, sweep_opts);
  auto* validate = app.add_subcommand("validate", "Check a config and print its effective form");
  add_common(validate, validate_opts);

  std::string report_dir;
  bool report_plots = false;
  auto* report = app.add_subcommand("report", "Summarize finished runs below a directory");
  report->add_option("--out,dir", report_dir, "Directory holding run outputs")->required();
  report->add_flag("--emit-plots", report_plots, "Rebuild SVG plots from the CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (*run) {
    return guarded([&] {
      const auto cfg = load(run_opts);
      const auto r = run_experiment(cfg);
      std::printf("%s -> %s\n", cfg.section().c_str(), r.dir.string().c_str());
      print_checks(r);
      return r.passed() ? kOk : kCheckFailed;
    });
  }
  if (*sweep) {
    return guarded([&] {
      const auto cfg = load(sweep_opts);
      if (cfg.sweep.empty()) throw ConfigError("sweep", "the config has no [sweep] section");
      const auto outcomes = run_sweep(cfg, cfg.threads());
      bool any_error = false, any_fail = false;
      for (const auto& o : outcomes) {
        any_error |= !o.ok;
        any_fail |= o.ok && !o.passed;
      }
      std::printf("%zu runs -> %s\n", outcomes.size(), cfg.out_dir().c_str());
      return any_error ? kRuntimeFailure : any_fail ? kCheckFailed : kOk;
    });
  }
  if (*validate) {
    return guarded([&] {
      const auto cfg = load(validate_opts);
      std::fputs(cfg.to_ini().c_str(), stdout);
      return kOk;
    });
  }
  return guarded([&] {
    const auto r = build_report(report_dir, report_plots);
    std::printf("%d runs, %d failed, %zu plots -> %s/summary.md\n", r.runs, r.failed, r.plots.size(), report_dir.c_str());
    return r.failed ? kCheckFailed : kOk;
  });
}
