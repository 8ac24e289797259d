#pragma once

// One function per experiment kind. Each writes into the configured output
// directory:
//   config.ini      the effective configuration
//   <kind>.csv      the observables (17 significant digits)
//   manifest.json   anchor, files, plot specs, checks and their outcome
//   *.svg           when emit_plots is set, rendered from the CSV on disk
// Runs are deterministic given the config (including the seed).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "becl/hierarchy/bbgky.hpp"
#include "becl/hierarchy/gp_residual.hpp"
#include "becl/hierarchy/mollifier.hpp"
#include "becl/lab/config.hpp"
#include "becl/lab/io.hpp"
#include "becl/lab/plot.hpp"
#include "becl/lab/snapshot.hpp"
#include "becl/manybody/density.hpp"
#include "becl/manybody/diagnostics.hpp"
#include "becl/manybody/operator.hpp"
#include "becl/manybody/sobolev.hpp"
#include "becl/nls2d.hpp"
#include "becl/nls3d.hpp"
#include "becl/potential.hpp"
#include "becl/scaling.hpp"

namespace becl::lab {

struct Check {
  std::string name;
  double value = 0.0;
  std::string bound;  // human-readable pass condition
  bool pass = true;
};

struct RunResult {
  fs::path dir;
  std::vector<std::string> files;
  std::vector<Check> checks;
  json summary = json::object();
  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

inline std::string anchor_for(Kind k) {
  switch (k) {
    case Kind::nls2d: return "effective 2D cubic NLS (limit equation): split-step flow, mass and energy conservation";
    case Kind::dimred3d: return "dimensional reduction: 3D cubic NLS in a strong transverse trap vs the effective 2D NLS";
    case Kind::manybody: return "rescaled N-body dynamics: marginals, excess energy and transverse-excitation decay";
    case Kind::scaling_table: return "admissible (N, omega) window: exponent v(beta) as the maximum of four branches";
    case Kind::sobolev_sharpness: return "Sobolev estimates with omega-loss: sharpness of the four exponents";
    case Kind::mollifier_rate: return "comparison of the pair delta with a mollified interaction: rate in alpha";
    case Kind::hierarchy_residual: return "BBGKY and 2D GP hierarchy identities for computed marginals";
  }
  return "";
}

/// Per-run output bookkeeping.
class RunContext {
 public:
  explicit RunContext(const ExperimentConfig& cfg) : cfg_(cfg) {
    result_.dir = cfg.out_dir();
    ensure_output_dir(result_.dir);
    write_text(result_.dir / "config.ini", cfg.to_ini());
    result_.files.push_back("config.ini");
  }

  void table(const std::string& name, const CsvTable& t, std::optional<PlotSpec> plot = std::nullopt) {
    t.write(result_.dir / name);
    result_.files.push_back(name);
    if (plot) {
      json p = {{"csv", name},       {"title", plot->title},   {"x", plot->x},
                {"y", plot->y},      {"log_x", plot->log_x},   {"log_y", plot->log_y}};
      plots_.push_back(p);
      if (cfg_.emit_plots()) {
        const auto svg = plot_csv(result_.dir / name, *plot);
        result_.files.push_back(svg.filename().string());
      }
    }
  }

  void file(const std::string& name) { result_.files.push_back(name); }
  fs::path path(const std::string& name) const { return result_.dir / name; }

  void check(std::string name, double value, std::string bound, bool pass) {
    result_.checks.push_back({std::move(name), value, std::move(bound), pass});
  }
  json& summary() { return result_.summary; }

  RunResult finish() {
    json checks = json::array();
    for (const auto& c : result_.checks)
      checks.push_back({{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"pass", c.pass}});
    result_.files.push_back("manifest.json");
    const json manifest = {
        {"kind", cfg_.section()},
        {"anchor", anchor_for(cfg_.kind)},
        {"seed", cfg_.seed()},
        {"config", cfg_.to_ini()},
        {"files", result_.files},
        {"plots", plots_},
        {"checks", checks},
        {"summary", result_.summary},
        {"status", result_.passed() ? "pass" : "fail"},
    };
    write_json(result_.dir / "manifest.json", manifest);
    return result_;
  }

 private:
  const ExperimentConfig& cfg_;
  RunResult result_;
  json plots_ = json::array();
};

/// Number of steps of size <= dt_max covering t, and the adjusted dt.
inline std::pair<int, double> step_plan(double t, double dt_max) {
  if (t == 0.0) return {0, dt_max};
  const int steps = static_cast<int>(std::ceil(t / dt_max - 1e-9));
  return {steps, t / steps};
}

inline RunResult run_nls2d(const ExperimentConfig& cfg) {
  RunContext ctx(cfg);
  const double c = cfg.real("coupling");
  const auto [steps, dt] = step_plan(cfg.real("t_final"), cfg.real("dt"));
  NLS2DConfig sc{c, dt, 2, cfg.real("L"), static_cast<int>(cfg.integer("n"))};
  NLS2DSolver solver(sc);
  Field2D f = gaussian_2d(sc.grid(), cfg.real("width"), {0.0, 0.0}, {cfg.real("momentum_x"), cfg.real("momentum_y")}, true);
  const int every = static_cast<int>(cfg.integer("sample_every"));
  CsvTable t{{"time", "mass", "energy", "max_abs"}, {}};
  const double m0 = f.mass(), e0 = nls_energy_2d(f, c);
  auto sample = [&] { t.add({f.time, f.mass(), nls_energy_2d(f, c), f.max_abs()}); };
  sample();
  for (int s = 1; s <= steps; ++s) {
    solver.step(f);
    if (s % every == 0 || s == steps) sample();
  }
  ctx.table("nls2d.csv", t, PlotSpec{"2D NLS observables", "time", {"energy", "max_abs"}});
  const double mass_drift = std::abs(f.mass() - m0) / m0;
  const double energy_drift = std::abs(nls_energy_2d(f, c) - e0) / std::max(1e-300, std::abs(e0));
  ctx.summary() = {{"steps", steps}, {"dt", dt}, {"mass_drift", mass_drift}, {"energy_drift", energy_drift}};
  const double mass_bar = 1e-10 * std::max(1.0, steps / 1000.0);
  ctx.check("relative mass drift", mass_drift, "<= " + format17(mass_bar), mass_drift <= mass_bar);
  return ctx.finish();
}

inline RunResult run_dimred3d(const ExperimentConfig& cfg) {
  RunContext ctx(cfg);
  DimRedConfig dc;
  dc.omegas = cfg.reals("omegas");
  dc.t_final = cfg.real("t_final");
  dc.coupling = cfg.real("coupling");
  dc.width = cfg.real("width");
  dc.n = static_cast<int>(cfg.integer("n"));
  dc.half_length = cfg.real("L");
  dc.modes = static_cast<int>(cfg.integer("modes"));
  dc.dt_max = cfg.real("dt_max");
  dc.omega_dt = cfg.real("omega_dt");
  const auto res = dimensional_reduction_experiment(dc);
  CsvTable t{{"omega", "t_final", "g3", "dt", "l2_distance", "p1_mass", "leakage"}, {}};
  for (const auto& r : res.rows) t.add({r.omega, r.t_final, r.g3, r.dt, r.l2_distance, r.p1_mass, r.leakage ? 1.0 : 0.0});
  ctx.table("dimred3d.csv", t, PlotSpec{"3D-to-2D distance", "omega", {"l2_distance"}, true, true});
  ctx.summary() = {{"monotone", res.monotone}, {"ratios", res.ratios}};
  if (dc.coupling == 0.0) {
    double worst = 0.0;
    for (const auto& r : res.rows) worst = std::max(worst, r.l2_distance);
    ctx.check("max distance (linear case)", worst, "<= 1e-07", worst <= 1e-7);
  } else {
    const double min_ratio = res.ratios.empty() ? 0.0 : *std::min_element(res.ratios.begin(), res.ratios.end());
    ctx.check("strictly decreasing distance, min successive ratio", min_ratio, "decreasing and >= 2", res.pass());
  }
  return ctx.finish();
}

inline RunResult run_manybody(const ExperimentConfig& cfg) {
  RunContext ctx(cfg);
  const int n_part = static_cast<int>(cfg.integer("particles"));
  const double omega = cfg.real("omega"), beta = cfg.real("beta");
  const OneBodySpace space{PeriodicGrid2D(static_cast<int>(cfg.integer("n")), cfg.real("L")),
                           static_cast<int>(cfg.integer("modes"))};
  const std::size_t budget = static_cast<std::size_t>(cfg.integer("memory_mb")) << 20;
  const double a2 = cfg.real("kappa") / (2.0 * omega);
  std::vector<cplx> coeffs = {std::sqrt(1.0 - a2)};
  if (space.modes > 1) coeffs.push_back(std::sqrt(a2));
  const double width = cfg.real("width");
  const auto phi = one_body_vector(
      space, [width](double x, double y) { return cplx(std::exp(-0.5 * (x * x + y * y) / (width * width))); }, coeffs);

  ManyBodyState state = product_state(space, n_part, phi, budget);
  std::optional<ScaledPotential> pot;
  if (cfg.real("g") > 0.0) pot.emplace(GaussianProfile{cfg.real("g"), cfg.real("sigma")}, beta, n_part, omega);
  const ManyBodyOperator op(space, n_part, n_part, omega, pot);
  ManyBodyState target = product_state(space, 1, phi);
  const ManyBodyOperator free_op(space, 1, 1, omega, std::nullopt);

  const auto [steps, dt] = step_plan(cfg.real("t_final"), cfg.real("dt"));
  const int every = static_cast<int>(cfg.integer("sample_every"));
  std::vector<std::string> cols = {"time", "norm", "excess_energy", "P_1_1", "P_1_0_tracenorm"};
  if (n_part >= 2) {
    cols.push_back("P_10_10");
    cols.push_back("P_10_01_tracenorm");
  }
  cols.push_back("trace_distance_to_target");
  CsvTable t{cols, {}};
  const double e0 = excess_energy_per_particle(state, op);
  double worst_sym = 0.0, worst_trace = 0.0, worst_eig = 0.0;
  auto sample = [&] {
    const int a1[] = {1}, a0[] = {0}, a10[] = {1, 0}, a01[] = {0, 1};
    std::vector<double> row = {state.time, state.norm(), excess_energy_per_particle(state, op),
                               projection_statistics(state, a1, a1).trace.real(),
                               projection_statistics(state, a1, a0).trace_norm};
    if (n_part >= 2) {
      row.push_back(projection_statistics(state, a10, a10).trace.real());
      row.push_back(projection_statistics(state, a10, a01).trace_norm);
    }
    const auto g1 = marginal(state, 1);
    const auto tg = product_density(space, target.amplitudes(), 1);
    row.push_back(trace_distance(g1, tg).trace_norm);
    t.add(row);
    worst_sym = std::max(worst_sym, symmetry_defect(state));
    worst_trace = std::max(worst_trace, std::abs(g1.trace().real() - 1.0));
    worst_eig = std::min(worst_eig, g1.min_eigenvalue());
  };
  sample();
  for (int s = 1; s <= steps; ++s) {
    evolve(state, op, dt, 1);
    evolve(target, free_op, dt, 1);
    if (s % every == 0 || s == steps) sample();
  }
  PlotSpec plot{"transverse excitation statistics", "time", {"P_1_1", "P_1_0_tracenorm"}, false, true};
  if (n_part >= 2) plot.y.insert(plot.y.end(), {"P_10_10", "P_10_01_tracenorm"});
  ctx.table("manybody.csv", t, plot);
  if (cfg.flag("snapshot")) {
    save_snapshot(state, ctx.path("final.becl"), omega, beta);
    ctx.file("final.becl");
  }
  const double e1 = excess_energy_per_particle(state, op);
  const double drift = std::abs(e1 - e0) / std::max(1.0, std::abs(e0));
  ctx.summary() = {{"steps", steps}, {"dt", dt}, {"excess_energy_initial", e0}, {"excess_energy_final", e1}};
  ctx.check("norm error", std::abs(state.norm() - 1.0), "<= 1e-10", std::abs(state.norm() - 1.0) <= 1e-10);
  ctx.check("symmetry defect", worst_sym, "<= 1e-10", worst_sym <= 1e-10);
  ctx.check("relative energy drift", drift, "<= 1e-05", drift <= 1e-5);
  ctx.check("marginal trace error", worst_trace, "<= 1e-10", worst_trace <= 1e-10);
  ctx.check("marginal min eigenvalue", worst_eig, ">= -1e-10", worst_eig >= -1e-10);
  return ctx.finish();
}

inline RunResult run_scaling_table(const ExperimentConfig& cfg) {
  RunContext ctx(cfg);
  const auto rows = scaling::region_table(scaling::beta_grid(static_cast<int>(cfg.integer("count"))));
  const double n_part = cfg.real("particles");
  std::vector<std::string> cols = {"beta", "branch_1", "branch_2", "branch_3", "branch_4", "v"};
  if (n_part > 0.0) cols.push_back("admissible");
  CsvTable t{cols, {}};
  for (const auto& r : rows) {
    std::vector<double> row = {r.beta, r.branch[0], r.branch[1], r.branch[2], r.branch[3], r.v};
    if (n_part > 0.0) {
      row.push_back(scaling::admissible({r.beta, cfg.real("eps"), n_part, cfg.real("omega")}) ? 1.0 : 0.0);
    }
    t.add(row);
  }
  ctx.table("scaling-table.csv", t, PlotSpec{"v(beta)", "beta", {"v", "branch_1", "branch_2", "branch_3", "branch_4"}});
  // Re-read the file and re-evaluate every row.
  const auto back = CsvTable::read(ctx.path("scaling-table.csv"));
  std::size_t mismatches = back.rows.size() == rows.size() ? 0 : rows.size();
  for (const auto& r : back.rows) {
    const auto b = scaling::branch_values(r[0]);
    if (r[5] != scaling::v_of_beta(r[0]) || r[1] != b[0] || r[2] != b[1] || r[3] != b[2] || r[4] != b[3]) ++mismatches;
  }
  ctx.summary() = {{"rows", rows.size()}};
  ctx.check("rows differing from re-evaluation", static_cast<double>(mismatches), "== 0", mismatches == 0);
  return ctx.finish();
}

inline RunResult run_sobolev(const ExperimentConfig& cfg) {
  RunContext ctx(cfg);
  const auto omegas = cfg.reals("omegas");
  const SobolevGrid grid{static_cast<int>(cfg.integer("nx")), cfg.real("half_x"), static_cast<int>(cfg.integer("ny")),
                         cfg.real("half_y")};
  const auto res = sobolev_loss_sharpness(omegas, grid);
  CsvTable t{{"omega", "s_norm", "s2_norm", "grad_l2_over_s", "l6_over_s", "grad_l6_over_s2", "linf_over_s2"}, {}};
  for (const auto& r : res.rows) {
    const auto q = r.ratios();
    t.add({r.omega, r.s_norm, r.s2_norm, q[0], q[1], q[2], q[3]});
  }
  ctx.table("sobolev-sharpness.csv", t,
            PlotSpec{"omega-loss ratios", "omega", {"grad_l2_over_s", "l6_over_s", "grad_l6_over_s2", "linf_over_s2"}, true, true});
  const std::array<double, 4> expected = {0.5, 1.0 / 6.0, 2.0 / 3.0, 0.25};
  const std::array<const char*, 4> names = {"slope grad_l2/S", "slope l6/S", "slope grad_l6/S2", "slope linf/S2"};
  for (int i = 0; i < 4; ++i) {
    ctx.check(names[i], res.slopes[i], "within 0.05 of " + format17(expected[i]),
              std::abs(res.slopes[i] - expected[i]) <= 0.05);
  }
  ctx.check("||S f|| variation across omega", res.s_norm_variation, "<= 0.01", res.s_norm_variation <= 0.01);
  ctx.summary() = {{"slopes", res.slopes}, {"under_resolved", res.under_resolved}, {"worst_grid_change", res.worst_grid_change}};
  if (res.under_resolved) std::cerr << "warning: sobolev norms change by more than 1% under grid refinement\n";
  return ctx.finish();
}

inline RunResult run_mollifier(const ExperimentConfig& cfg) {
  RunContext ctx(cfg);
  const double kappa = cfg.real("kappa");
  const auto problem = MollifierProblem::standard(Grid3D{static_cast<int>(cfg.integer("n")), cfg.real("L")});
  const auto res = mollifier_rate(problem, kappa, cfg.reals("alphas"));
  CsvTable t{{"alpha", "difference"}, {}};
  for (std::size_t i = 0; i < res.alphas.size(); ++i) t.add({res.alphas[i], res.differences[i]});
  ctx.table("mollifier-rate.csv", t, PlotSpec{"delta vs mollified pair term", "alpha", {"difference"}, true, true});
  ctx.summary() = {{"slope", res.slope}, {"moment", res.moment}, {"excluded_alphas", res.excluded}};
  ctx.check("fitted slope", res.slope, ">= kappa - 0.05", res.slope >= kappa - 0.05);
  return ctx.finish();
}

/// Refinement level l uses n 2^l grid points and dt / 2^l.
inline RunResult run_hierarchy(const ExperimentConfig& cfg) {
  RunContext ctx(cfg);
  const std::string variant = cfg.text("variant");
  const int k = static_cast<int>(cfg.integer("k"));
  const int levels = static_cast<int>(cfg.integer("levels"));
  const int count = static_cast<int>(cfg.integer("observables"));
  const double t_eval = cfg.real("t");
  CsvTable t{{"level", "n", "dt", "residual", "floor_estimate"}, {}};
  json reports = json::array();
  std::vector<double> residuals;
  for (int l = 0; l < levels; ++l) {
    const int n = static_cast<int>(cfg.integer("n")) << l;
    const double dt = cfg.real("dt") / (1 << l);
    ResidualReport rep;
    if (variant == "gp2d") {
      const double c = cfg.real("coupling");
      NLS2DConfig sc{c, dt, 2, cfg.real("L"), n};
      const auto f0 = gaussian_2d(sc.grid(), 1.0, {0.0, 0.0}, {0.5, 0.0}, true);
      const auto traj = nls_triple(f0, sc, t_eval);
      rep = gp_residual_2d(traj, c, k, observable_panel(x_space(sc.grid()), k, count, cfg.seed()));
    } else {
      const int n_part = static_cast<int>(cfg.integer("particles"));
      const double omega = cfg.real("omega");
      const OneBodySpace space{PeriodicGrid2D(n, cfg.real("L")), static_cast<int>(cfg.integer("modes"))};
      std::vector<cplx> coeffs = {std::sqrt(0.9)};
      if (space.modes > 1) coeffs.push_back(std::sqrt(0.1));
      const auto phi = one_body_vector(
          space, [](double x, double y) { return std::exp(-0.5 * (x * x + y * y)) * std::polar(1.0, 0.3 * x); }, coeffs);
      const auto st = product_state(space, n_part, phi);
      const ScaledPotential pot(GaussianProfile{1.0, 1.0}, cfg.real("beta"), n_part, omega);
      const ManyBodyOperator op(space, n_part, n_part, omega, pot);
      const auto tr = evolve_triple(st, op, t_eval, dt);
      rep = bbgky_residual_vector(tr.minus, tr.center, tr.plus, op, observable_panel(space, k, count, cfg.seed()));
    }
    residuals.push_back(rep.residual);
    t.add({static_cast<double>(l), static_cast<double>(n), dt, rep.residual, rep.floor_estimate});
    for (std::size_t i = 0; i < rep.values.size(); ++i) {
      reports.push_back({{"level", l}, {"k", rep.k}, {"t", rep.t}, {"observable_id", rep.observable_ids[i]},
                         {"residual", rep.values[i]}, {"floor_estimate", rep.floor_estimate}});
    }
  }
  ctx.table("hierarchy-residual.csv", t, PlotSpec{"hierarchy residual", "dt", {"residual", "floor_estimate"}, true, true});
  write_json(ctx.path("residuals.json"), reports);
  ctx.file("residuals.json");
  std::vector<double> ratios;
  for (std::size_t i = 1; i < residuals.size(); ++i) {
    const double r = residuals[i - 1] / residuals[i];
    ratios.push_back(r);
    ctx.check("refinement ratio level " + std::to_string(i - 1) + "->" + std::to_string(i), r, "4 +- 30%",
              r >= 2.8 && r <= 5.2);
  }
  ctx.summary() = {{"variant", variant}, {"residuals", residuals}, {"ratios", ratios}};
  return ctx.finish();
}

inline RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  switch (cfg.kind) {
    case Kind::nls2d: return run_nls2d(cfg);
    case Kind::dimred3d: return run_dimred3d(cfg);
    case Kind::manybody: return run_manybody(cfg);
    case Kind::scaling_table: return run_scaling_table(cfg);
    case Kind::sobolev_sharpness: return run_sobolev(cfg);
    case Kind::mollifier_rate: return run_mollifier(cfg);
    case Kind::hierarchy_residual: return run_hierarchy(cfg);
  }
  throw std::logic_error("run_experiment: unhandled kind");
}

/// Rebuild every plot listed in a run's manifest from its CSV files.
inline std::vector<fs::path> replot_run(const fs::path& dir) {
  const json m = json::parse(read_text(dir / "manifest.json"));
  std::vector<fs::path> out;
  for (const auto& p : m.at("plots")) {
    PlotSpec spec{p.at("title").get<std::string>(), p.at("x").get<std::string>(),
                  p.at("y").get<std::vector<std::string>>(), p.at("log_x").get<bool>(), p.at("log_y").get<bool>()};
    out.push_back(plot_csv(dir / p.at("csv").get<std::string>(), spec));
  }
  return out;
}

}  // namespace becl::lab
