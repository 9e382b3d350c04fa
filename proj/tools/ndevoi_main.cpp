#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "ndevoi/csv.hpp"
#include "ndevoi/decision.hpp"
#include "ndevoi/errors.hpp"
#include "ndevoi/nde_models.hpp"
#include "ndevoi/scenario.hpp"
#include "ndevoi/two_step.hpp"
#include "ndevoi/verify.hpp"
#include "vendor/CLI11.hpp"

namespace {

namespace fs = std::filesystem;
using namespace ndevoi;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Options {
  std::string scenario;
  std::string out = ".";
  std::string model;
  std::string kind = "all";
  std::string manifest = "data/verify_manifest.json";
  double x_th = kNaN;
  double s_th = kNaN;
  double tol = 0.0;
  int grid = 0;
};

scenario::ScenarioConfig load_scenario(const std::string& name_or_path) {
  for (const std::string& b : scenario::builtin_names())
    if (name_or_path == b) return scenario::builtin(b);
  if (fs::exists(name_or_path)) return scenario::load(name_or_path);
  throw ConfigError("scenario '" + name_or_path +
                    "' is neither a builtin name (hypothetical, halfcell) nor a config file");
}

fs::path out_file(const Options& opt, const std::string& name) {
  fs::create_directories(opt.out);
  return fs::path(opt.out) / name;
}

void note_written(const fs::path& p) { std::cout << "wrote " << p.string() << "\n"; }

std::vector<double> linear_grid(Interval window, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = window.lo + (window.hi - window.lo) * double(i) / double(n - 1);
  return g;
}

Interval condition_window(const scenario::ScenarioConfig& cfg) {
  const auto* prior = std::get_if<dist::ContinuousDistribution>(&cfg.condition_prior);
  if (prior == nullptr)
    throw ConfigError("this table needs a continuous condition prior");
  Interval w = prior->plausible_interval(1e-9);
  if (const auto* base = std::get_if<scenario::BaseLognormalPoly>(&cfg.nde))
    w = w.clipped_to(base->condition_support);
  return w;
}

int run_pod(const scenario::ScenarioConfig& cfg, const Options& opt) {
  const double s_th = std::isfinite(opt.s_th) ? opt.s_th : cfg.s_th_fixed;
  if (!std::isfinite(s_th))
    throw ConfigError("pass --sth or configure a fixed signal threshold for the pod table");
  const model::PodCurve curve =
      model::pod_curve_from_base(scenario::make_base(cfg), s_th, cfg.orientation);
  const int n = opt.grid > 0 ? opt.grid : 201;
  const std::vector<double> x_grid = linear_grid(condition_window(cfg), n);
  const fs::path path = out_file(opt, "pod_curve.csv");
  model::write_pod_curve_csv(path, curve, x_grid);
  std::cout << "detection curve at signal threshold " << csv::format_shortest(s_th)
            << " (" << n << " condition points)\n";
  note_written(path);
  return 0;
}

int run_roc(const scenario::ScenarioConfig& cfg, const Options& opt) {
  scenario::Overrides ov;
  ov.x_th = opt.x_th;
  const model::RocModel roc = scenario::make_roc(cfg, ov);
  const int n = opt.grid > 0 ? opt.grid : 201;
  const Interval bracket = cfg.num.sweep_bracket;
  const quad::GridScale scale = cfg.num.sweep_scale;

  const fs::path trace_path = out_file(opt, "roc_trace.csv");
  model::write_roc_trace_csv(trace_path, model::roc_curve_trace(roc, n, bracket, scale));
  note_written(trace_path);

  const model::RocIndices idx = model::roc_indices(roc, std::max(n, 501), bracket, scale);
  std::cout << "prior Pr(Y=1): " << csv::format_shortest(roc.prior_y1) << "\n";
  std::cout << "area under curve: " << csv::format_shortest(idx.auc) << "\n";
  std::cout << "max(pod - pfa) cut-off: " << csv::format_shortest(idx.youden_s_th)
            << " (J = " << csv::format_shortest(idx.youden_j) << ")\n";
  std::cout << "closest-to-corner cut-off: " << csv::format_shortest(idx.corner_s_th)
            << " (distance " << csv::format_shortest(idx.corner_distance) << ")\n";

  // Per-design traces show how the learning population shifts the curve.
  if (!cfg.designs.empty()) {
    const auto* base_spec = std::get_if<scenario::BaseLognormalPoly>(&cfg.nde);
    const auto* prior = std::get_if<dist::ContinuousDistribution>(&cfg.condition_prior);
    if (base_spec != nullptr && prior != nullptr) {
      const model::BaseModel base = scenario::make_base(cfg);
      const double x_th = std::isfinite(opt.x_th) ? opt.x_th : cfg.x_th;
      for (const auto& [dname, d] : cfg.designs) {
        const model::RocModel droc =
            model::roc_from_base(base, x_th, d, *prior, cfg.orientation,
                                 quad::GridScale::Linear, cfg.num.inner_quad, dname);
        const fs::path dpath = out_file(opt, "roc_trace_" + dname + ".csv");
        model::write_roc_trace_csv(dpath, model::roc_curve_trace(droc, n, bracket, scale));
        note_written(dpath);
      }
    }
  }
  return 0;
}

int run_decide(const scenario::ScenarioConfig& cfg, const Options& opt) {
  const scenario::ModelFamily family = opt.model.empty()
                                           ? scenario::default_family(cfg)
                                           : scenario::family_from_name(opt.model);
  scenario::Overrides ov;
  ov.x_th = opt.x_th;
  ov.s_th = opt.s_th;
  const decide::OneStepProblem problem = scenario::one_step_problem(cfg, family, ov);
  const decide::PolicyReport report = decide::solve_one_step(problem);
  std::cout << report.to_text();

  // Fixed-threshold cost sweep, on the richest model kind that supports it.
  try {
    decide::OneStepProblem sweep_problem = problem;
    if (family == scenario::ModelFamily::DetectionCurve)
      sweep_problem = scenario::one_step_problem(cfg, scenario::ModelFamily::FullSignal, ov);
    else if (family == scenario::ModelFamily::OperatingPoint)
      sweep_problem =
          scenario::one_step_problem(cfg, scenario::ModelFamily::SignalClasses, ov);
    const decide::ThresholdCalibration cal = decide::calibrate_threshold(sweep_problem);
    csv::Table table;
    table.header = {"s_th", "cost", "on_detect", "on_clear"};
    for (const decide::SweepPoint& pt : cal.sweep)
      table.rows.push_back({csv::format_shortest(pt.s_th), csv::format_shortest(pt.cost),
                            bayes::action_name(pt.on_detect),
                            bayes::action_name(pt.on_clear)});
    const fs::path sweep_path = out_file(opt, "decide_sweep.csv");
    csv::write_atomic(sweep_path, csv::render(table));
    std::cout << "best fixed threshold: " << csv::format_shortest(cal.s_th_star)
              << " at expected cost " << csv::format_shortest(cal.cost_star) << "\n";
    note_written(sweep_path);
  } catch (const ConfigError&) {
    // No sweepable model kind in this scenario; the report above stands alone.
  }

  try {
    const int n = opt.grid > 0 ? opt.grid : 41;
    const std::vector<decide::SurfacePoint> surface = decide::cost_surface(problem, n);
    csv::Table table;
    table.header = {"pfa", "pod", "cost", "zone"};
    for (const decide::SurfacePoint& pt : surface)
      table.rows.push_back({csv::format_shortest(pt.pfa), csv::format_shortest(pt.pod),
                            csv::format_shortest(pt.cost), std::to_string(pt.zone)});
    const fs::path surf_path = out_file(opt, "decide_surface.csv");
    csv::write_atomic(surf_path, csv::render(table));
    note_written(surf_path);
  } catch (const ConfigError&) {
    // Surface needs a binary reduction (condition threshold); skip without one.
  }
  return 0;
}

int run_expdesign(const scenario::ScenarioConfig& cfg, const Options& opt) {
  if (cfg.designs.empty())
    throw ConfigError("scenario '" + cfg.name + "' defines no experimental designs");
  scenario::Overrides ov;
  ov.x_th = opt.x_th;
  const decide::OneStepProblem problem =
      scenario::one_step_problem(cfg, scenario::ModelFamily::FullSignal, ov);
  const std::vector<decide::DesignRow> rows =
      decide::experimental_design_report(problem, scenario::design_entries(cfg));

  csv::Table table;
  table.header = {"design", "s_th_star", "perceived_cost", "effective_cost",
                  "matches_application"};
  std::cout << "design  s_th*      perceived  effective\n";
  for (const decide::DesignRow& row : rows) {
    table.rows.push_back({row.name, csv::format_shortest(row.s_th_star),
                          csv::format_shortest(row.perceived_cost),
                          csv::format_shortest(row.effective_cost),
                          row.matches_application ? "true" : "false"});
    std::cout << row.name << "  " << csv::format_shortest(row.s_th_star) << "  "
              << csv::format_shortest(row.perceived_cost) << "  "
              << csv::format_shortest(row.effective_cost)
              << (row.matches_application ? "" : "  (population differs in service)")
              << "\n";

    csv::Table sweep;
    sweep.header = {"s_th", "cost"};
    for (const decide::SweepPoint& pt : row.sweep)
      sweep.rows.push_back({csv::format_shortest(pt.s_th), csv::format_shortest(pt.cost)});
    const fs::path spath = out_file(opt, "expdesign_sweep_" + row.name + ".csv");
    csv::write_atomic(spath, csv::render(sweep));
    note_written(spath);
  }
  const fs::path path = out_file(opt, "expdesign.csv");
  csv::write_atomic(path, csv::render(table));
  note_written(path);
  return 0;
}

int run_twostep(const scenario::ScenarioConfig& cfg, const Options& opt) {
  const seq::TwoStepProblem tp = scenario::two_step_problem(cfg);
  const bool all = opt.kind == "all";
  if (!all && opt.kind != "continuous" && opt.kind != "fixed" && opt.kind != "optimize")
    throw ConfigError("--kind must be continuous, fixed, optimize or all");

  if (all || opt.kind == "continuous") {
    if (!tp.roc)
      throw ConfigError("the continuous two-step solution needs signal-class densities");
    const decide::PolicyReport rep = seq::two_step_solve(tp, seq::ContinuousKind{});
    std::cout << rep.to_text() << "\n";

    const int n = opt.grid > 0 ? opt.grid : 401;
    seq::TwoStepSolver solver(tp);
    const quad::Fn margin = solver.first_step_margin();
    csv::Table table;
    table.header = {"s", "repair_minus_keep_cost"};
    for (double s : linear_grid(tp.num.signal_window, n))
      table.rows.push_back({csv::format_shortest(s), csv::format_shortest(-margin(s))});
    const fs::path mpath = out_file(opt, "twostep_margin.csv");
    csv::write_atomic(mpath, csv::render(table));
    note_written(mpath);
  }

  if (all || opt.kind == "fixed") {
    seq::FixedPointKind kind;
    if (std::isfinite(opt.s_th)) {
      if (!tp.roc)
        throw ConfigError("mapping --sth to an operating point needs signal-class densities");
      const model::ConfusionMatrix op = model::operating_point(*tp.roc, opt.s_th);
      kind = {op.pod, op.pfa};
    } else if (cfg.two_step && cfg.two_step->reference_pod > 0.0) {
      kind = {cfg.two_step->reference_pod, cfg.two_step->reference_pfa};
    } else {
      throw ConfigError("pass --sth or configure a reference operating point");
    }
    const decide::PolicyReport rep = seq::two_step_solve(tp, kind);
    std::cout << rep.to_text() << "\n";

    const int n = opt.grid > 0 ? opt.grid : 41;
    csv::Table table;
    table.header = {"pfa", "pod", "cost", "pattern"};
    for (const seq::SurfacePoint2& pt : seq::two_step_surface(tp, n))
      table.rows.push_back({csv::format_shortest(pt.pfa), csv::format_shortest(pt.pod),
                            csv::format_shortest(pt.cost), std::to_string(pt.pattern)});
    const fs::path spath = out_file(opt, "twostep_surface.csv");
    csv::write_atomic(spath, csv::render(table));
    note_written(spath);
  }

  if (all || opt.kind == "optimize") {
    if (!tp.roc)
      throw ConfigError("optimizing the shared threshold needs signal-class densities");
    const seq::TwoStepReport rep = seq::two_step_analyze(tp, seq::OptimizePointKind{});
    std::cout << seq::two_step_solve(tp, seq::OptimizePointKind{}).to_text();
    std::cout << "best shared threshold: " << csv::format_shortest(rep.s_th_fixed)
              << " (detection rate " << csv::format_shortest(rep.pod)
              << ", false call rate " << csv::format_shortest(rep.pfa) << ")\n";
    csv::Table table;
    table.header = {"s_th", "cost"};
    for (const decide::SweepPoint& pt : rep.sweep)
      table.rows.push_back({csv::format_shortest(pt.s_th), csv::format_shortest(pt.cost)});
    const fs::path opath = out_file(opt, "twostep_sweep.csv");
    csv::write_atomic(opath, csv::render(table));
    note_written(opath);

    if (cfg.two_step && std::isfinite(cfg.two_step->memoryless_s_th)) {
      const double s_mem = cfg.two_step->memoryless_s_th;
      const model::ConfusionMatrix op = model::operating_point(*tp.roc, s_mem);
      const double mem = seq::memoryless_policy_cost(tp, op.pod, op.pfa);
      const double planned = seq::two_step_fixed_point(tp, op.pod, op.pfa).expected_cost;
      std::cout << "repair-on-indication baseline at threshold "
                << csv::format_shortest(s_mem) << ": " << csv::format_shortest(mem)
                << (tp.unit.empty() ? "" : " " + tp.unit)
                << "\nbelief-tracking actions at the same operating point: "
                << csv::format_shortest(planned)
                << (tp.unit.empty() ? "" : " " + tp.unit) << "\n";
    }
    std::cout << "\n";
  }
  return 0;
}

int run_verify(const Options& opt) {
  std::string prefix;
  if (!opt.scenario.empty()) {
    if (opt.scenario == "hypothetical")
      prefix = "hyp.";
    else if (opt.scenario == "halfcell")
      prefix = "half.";
    else
      throw ConfigError("reference checks exist only for the builtin scenarios");
  }
  const verify::Report report = verify::run_manifest(opt.manifest, prefix, opt.tol);
  std::cout << verify::to_text(report);
  return report.all_pass() ? 0 : 1;
}

int run_config(const scenario::ScenarioConfig& cfg, const Options& opt) {
  if (opt.out == "." || opt.out.empty()) {
    std::cout << scenario::serialize(cfg);
    return 0;
  }
  fs::path path(opt.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  scenario::save(cfg, path);
  note_written(path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NDE quality models and value-of-information decision analysis"};
  app.require_subcommand(1);
  Options opt;

  const auto add_common = [&](CLI::App* sub, bool scenario_required = true) {
    auto* s = sub->add_option("--scenario", opt.scenario,
                              "builtin scenario name or path to a config file");
    if (scenario_required) s->required();
    sub->add_option("--out", opt.out, "output directory (or file for `config`)");
    return sub;
  };

  CLI::App* pod = add_common(app.add_subcommand(
      "pod", "tabulate the detection curve over the condition range"));
  pod->add_option("--sth", opt.s_th, "signal threshold defining an indication");
  pod->add_option("--grid", opt.grid, "number of condition points");

  CLI::App* roc = add_common(app.add_subcommand(
      "roc", "trace detection/false-alarm pairs across thresholds, with summary indices"));
  roc->add_option("--xth", opt.x_th, "condition threshold splitting good from bad");
  roc->add_option("--grid", opt.grid, "number of trace points");

  CLI::App* decide_cmd = add_common(app.add_subcommand(
      "decide", "solve the one-step repair decision and export sweep/surface data"));
  decide_cmd->add_option("--model", opt.model,
                         "model family: full_signal, detection_curve, signal_classes, "
                         "operating_point (default: the richest the scenario supports)");
  decide_cmd->add_option("--xth", opt.x_th, "condition threshold override");
  decide_cmd->add_option("--sth", opt.s_th, "signal threshold override");
  decide_cmd->add_option("--grid", opt.grid, "cost-surface resolution per axis");

  CLI::App* expdesign = add_common(app.add_subcommand(
      "expdesign", "compare threshold calibration across inspection-campaign populations"));
  expdesign->add_option("--xth", opt.x_th, "condition threshold override");

  CLI::App* twostep = add_common(app.add_subcommand(
      "twostep", "solve the two-step sequential inspect/repair problem"));
  twostep->add_option("--kind", opt.kind,
                      "continuous, fixed, optimize or all (default all)");
  twostep->add_option("--sth", opt.s_th, "fixed signal threshold for --kind fixed");
  twostep->add_option("--grid", opt.grid, "surface/margin grid resolution");

  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "check computed values against the reference manifest");
  verify_cmd->add_option("--scenario", opt.scenario,
                         "restrict checks to one builtin scenario");
  verify_cmd->add_option("--manifest", opt.manifest, "path to the manifest json");
  verify_cmd->add_option("--tol", opt.tol,
                         "extra relative tolerance applied to every value check");

  CLI::App* config_cmd = add_common(
      app.add_subcommand("config",
                         "print or save the scenario configuration as json"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (verify_cmd->parsed()) return run_verify(opt);
    const scenario::ScenarioConfig cfg = load_scenario(opt.scenario);
    if (pod->parsed()) return run_pod(cfg, opt);
    if (roc->parsed()) return run_roc(cfg, opt);
    if (decide_cmd->parsed()) return run_decide(cfg, opt);
    if (expdesign->parsed()) return run_expdesign(cfg, opt);
    if (twostep->parsed()) return run_twostep(cfg, opt);
    if (config_cmd->parsed()) return run_config(cfg, opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
