#include "ndevoi/verify.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "ndevoi/decision.hpp"
#include "ndevoi/errors.hpp"
#include "ndevoi/nde_models.hpp"
#include "ndevoi/scenario.hpp"
#include "ndevoi/two_step.hpp"
#include "vendor/json.hpp"

namespace ndevoi::verify {

namespace {

using json = nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// Cost-ratio threshold of the binary likelihood-ratio test: repairing wins
// on detection when lik_y1/lik_y0 exceeds this.
double cost_ratio(const decide::BinaryCore& core, const decide::Costs& costs) {
  const double w1 = core.prior_y1;
  const double w0 = 1.0 - w1;
  const auto& p = core.failure.p;
  const double gain = costs.c_failure * (p[1][0] - p[1][1]) - costs.c_repair;
  const double loss = costs.c_repair + costs.c_failure * (p[0][1] - p[0][0]);
  return (w0 * loss) / (w1 * gain);
}

// Lazily computed shared state: each accessor solves its sub-problem on
// first use and caches the result for every later check.
struct Workspace {
  const scenario::ScenarioConfig& hyp() {
    if (!hyp_) hyp_ = scenario::builtin("hypothetical");
    return *hyp_;
  }
  const scenario::ScenarioConfig& half() {
    if (!half_) half_ = scenario::builtin("halfcell");
    return *half_;
  }

  const decide::OneStepProblem& hyp_full() {
    if (!hyp_full_)
      hyp_full_ = scenario::one_step_problem(hyp(), scenario::ModelFamily::FullSignal);
    return *hyp_full_;
  }
  const decide::PriorDecision& hyp_prior() {
    if (!hyp_prior_) hyp_prior_ = decide::prior_optimal(hyp_full());
    return *hyp_prior_;
  }
  const decide::PolicyReport& hyp_m1() {
    if (!hyp_m1_) hyp_m1_ = decide::solve_one_step(hyp_full());
    return *hyp_m1_;
  }
  const decide::PolicyReport& hyp_m2() {
    if (!hyp_m2_)
      hyp_m2_ = decide::solve_one_step(
          scenario::one_step_problem(hyp(), scenario::ModelFamily::DetectionCurve));
    return *hyp_m2_;
  }
  const decide::ThresholdCalibration& hyp_m2_cal() {
    if (!hyp_m2_cal_) hyp_m2_cal_ = decide::calibrate_threshold(hyp_full());
    return *hyp_m2_cal_;
  }
  const decide::OneStepProblem& hyp_m3_problem() {
    if (!hyp_m3_problem_)
      hyp_m3_problem_ = scenario::one_step_problem(hyp(), scenario::ModelFamily::SignalClasses);
    return *hyp_m3_problem_;
  }
  const decide::PolicyReport& hyp_m3() {
    if (!hyp_m3_) hyp_m3_ = decide::solve_one_step(hyp_m3_problem());
    return *hyp_m3_;
  }
  const decide::BinaryCore& hyp_m3_core() {
    if (!hyp_m3_core_) hyp_m3_core_ = decide::make_binary_core(hyp_m3_problem());
    return *hyp_m3_core_;
  }
  const decide::PolicyReport& hyp_m3_x2() {
    if (!hyp_m3_x2_) {
      scenario::Overrides ov;
      ov.x_th = 0.2;
      hyp_m3_x2_ = decide::solve_one_step(
          scenario::one_step_problem(hyp(), scenario::ModelFamily::SignalClasses, ov));
    }
    return *hyp_m3_x2_;
  }
  const model::ConfusionMatrix& hyp_m4_op() {
    if (!hyp_m4_op_) hyp_m4_op_ = model::operating_point(scenario::make_roc(hyp()), 1e-2);
    return *hyp_m4_op_;
  }
  const decide::PolicyReport& hyp_m4() {
    if (!hyp_m4_) {
      scenario::Overrides ov;
      ov.s_th = 1e-2;
      hyp_m4_ = decide::solve_one_step(
          scenario::one_step_problem(hyp(), scenario::ModelFamily::OperatingPoint, ov));
    }
    return *hyp_m4_;
  }
  const std::vector<decide::DesignRow>& hyp_designs() {
    if (!hyp_designs_)
      hyp_designs_ =
          decide::experimental_design_report(hyp_full(), scenario::design_entries(hyp()));
    return *hyp_designs_;
  }
  const decide::DesignRow& design_row(const std::string& name) {
    for (const auto& row : hyp_designs())
      if (row.name == name) return row;
    throw ConfigError("no experimental design named '" + name + "'");
  }

  const decide::OneStepProblem& half_problem() {
    if (!half_problem_)
      half_problem_ = scenario::one_step_problem(half(), scenario::ModelFamily::SignalClasses);
    return *half_problem_;
  }
  const decide::PolicyReport& half_report() {
    if (!half_report_) half_report_ = decide::solve_one_step(half_problem());
    return *half_report_;
  }
  const decide::BinaryCore& half_core() {
    if (!half_core_) half_core_ = decide::make_binary_core(half_problem());
    return *half_core_;
  }
  const model::RocModel& half_roc() {
    if (!half_roc_) half_roc_ = scenario::make_roc(half());
    return *half_roc_;
  }
  const model::RocIndices& half_idx() {
    if (!half_idx_)
      half_idx_ = model::roc_indices(half_roc(), 2001, half().num.sweep_bracket,
                                     half().num.sweep_scale);
    return *half_idx_;
  }
  const decide::ThresholdCalibration& half_cal() {
    if (!half_cal_) half_cal_ = decide::calibrate_threshold(half_problem());
    return *half_cal_;
  }

  const seq::TwoStepProblem& half_tp() {
    if (!half_tp_) half_tp_ = scenario::two_step_problem(half());
    return *half_tp_;
  }
  const seq::PriorPair& ts_prior() {
    if (!ts_prior_) ts_prior_ = seq::two_step_prior(half_tp());
    return *ts_prior_;
  }
  const seq::TwoStepReport& ts_cont() {
    if (!ts_cont_) ts_cont_ = seq::two_step_analyze(half_tp(), seq::ContinuousKind{});
    return *ts_cont_;
  }
  const seq::TwoStepReport& ts_fixed() {
    if (!ts_fixed_) {
      const scenario::TwoStepSpec& spec = *half().two_step;
      ts_fixed_ = seq::two_step_analyze(
          half_tp(), seq::FixedPointKind{spec.reference_pod, spec.reference_pfa});
    }
    return *ts_fixed_;
  }
  const seq::TwoStepReport& ts_opt() {
    if (!ts_opt_) ts_opt_ = seq::two_step_analyze(half_tp(), seq::OptimizePointKind{});
    return *ts_opt_;
  }
  const model::ConfusionMatrix& mem_op() {
    if (!mem_op_)
      mem_op_ = model::operating_point(*half_tp().roc, half().two_step->memoryless_s_th);
    return *mem_op_;
  }
  double mem_cost() {
    if (!mem_cost_)
      mem_cost_ = seq::memoryless_policy_cost(half_tp(), mem_op().pod, mem_op().pfa);
    return *mem_cost_;
  }
  double m4_at_mem_cost() {
    if (!m4_at_mem_)
      m4_at_mem_ = seq::two_step_fixed_point(half_tp(), mem_op().pod, mem_op().pfa)
                       .expected_cost;
    return *m4_at_mem_;
  }

  // Recomputes the post-repair second-step policy from the reset belief and
  // compares it with the reported one; equality shows the second action
  // after a first-step repair does not depend on the first signal.
  bool a2_fixed_after_repair() {
    const seq::TwoStepReport& rep = ts_cont();
    seq::TwoStepSolver solver(half_tp());
    const decide::ContinuousPolicy fresh =
        solver.second_step_policy(half_tp().transition[1][0]);
    if (fresh.boundaries.size() != rep.step2_after_repair.boundaries.size()) return false;
    for (std::size_t i = 0; i < fresh.boundaries.size(); ++i)
      if (std::abs(fresh.boundaries[i] - rep.step2_after_repair.boundaries[i]) > 1e-9)
        return false;
    return !fresh.boundaries.empty();
  }

 private:
  std::optional<scenario::ScenarioConfig> hyp_, half_;
  std::optional<decide::OneStepProblem> hyp_full_, hyp_m3_problem_, half_problem_;
  std::optional<decide::PriorDecision> hyp_prior_;
  std::optional<decide::PolicyReport> hyp_m1_, hyp_m2_, hyp_m3_, hyp_m3_x2_, hyp_m4_,
      half_report_;
  std::optional<decide::ThresholdCalibration> hyp_m2_cal_, half_cal_;
  std::optional<decide::BinaryCore> hyp_m3_core_, half_core_;
  std::optional<model::ConfusionMatrix> hyp_m4_op_, mem_op_;
  std::optional<std::vector<decide::DesignRow>> hyp_designs_;
  std::optional<model::RocModel> half_roc_;
  std::optional<model::RocIndices> half_idx_;
  std::optional<seq::TwoStepProblem> half_tp_;
  std::optional<seq::PriorPair> ts_prior_;
  std::optional<seq::TwoStepReport> ts_cont_, ts_fixed_, ts_opt_;
  std::optional<double> mem_cost_, m4_at_mem_;
};

double first_boundary(const decide::ContinuousPolicy& policy) {
  if (policy.boundaries.empty())
    throw ConfigError("expected a policy boundary, found none");
  return policy.boundaries.front();
}

using ValueFn = std::function<double(Workspace&)>;
using FlagFn = std::function<bool(Workspace&)>;

const std::map<std::string, ValueFn>& value_registry() {
  static const std::map<std::string, ValueFn> reg = {
      {"hyp.prior.pr_fail_keep", [](Workspace& w) { return w.hyp_prior().p_fail_keep; }},
      {"hyp.prior.cost_keep", [](Workspace& w) { return w.hyp_prior().cost_keep; }},
      {"hyp.prior.cost_repair", [](Workspace& w) { return w.hyp_prior().cost_repair; }},
      {"hyp.prior.cost", [](Workspace& w) { return w.hyp_prior().expected_cost; }},
      {"hyp.m1.s_th", [](Workspace& w) { return first_boundary(w.hyp_m1().policy); }},
      {"hyp.m1.cost", [](Workspace& w) { return w.hyp_m1().expected_cost; }},
      {"hyp.m1.voi", [](Workspace& w) { return w.hyp_m1().voi; }},
      {"hyp.m2.cost", [](Workspace& w) { return w.hyp_m2().expected_cost; }},
      {"hyp.m2.voi", [](Workspace& w) { return w.hyp_m2().voi; }},
      {"hyp.m2.sweep_s_th", [](Workspace& w) { return w.hyp_m2_cal().s_th_star; }},
      {"hyp.m2.sweep_cost", [](Workspace& w) { return w.hyp_m2_cal().cost_star; }},
      {"hyp.m3.pr_y1", [](Workspace& w) { return w.hyp_m3_core().prior_y1; }},
      {"hyp.m3.p_fail_y1_keep",
       [](Workspace& w) { return w.hyp_m3_core().failure.p[1][0]; }},
      {"hyp.m3.p_fail_y0_keep",
       [](Workspace& w) { return w.hyp_m3_core().failure.p[0][0]; }},
      {"hyp.m3.ratio",
       [](Workspace& w) { return cost_ratio(w.hyp_m3_core(), w.hyp_m3_problem().costs); }},
      {"hyp.m3.s_th", [](Workspace& w) { return first_boundary(w.hyp_m3().policy); }},
      {"hyp.m3.cost", [](Workspace& w) { return w.hyp_m3().expected_cost; }},
      {"hyp.m3.voi", [](Workspace& w) { return w.hyp_m3().voi; }},
      {"hyp.m3.xth02.cost", [](Workspace& w) { return w.hyp_m3_x2().expected_cost; }},
      {"hyp.m3.xth02.voi", [](Workspace& w) { return w.hyp_m3_x2().voi; }},
      {"hyp.m4.pod", [](Workspace& w) { return w.hyp_m4_op().pod; }},
      {"hyp.m4.pfa", [](Workspace& w) { return w.hyp_m4_op().pfa; }},
      {"hyp.m4.cost", [](Workspace& w) { return w.hyp_m4().expected_cost; }},
      {"hyp.m4.diag_voi",
       [](Workspace& w) {
         // At PoD = PFA the observation carries nothing; the posterior equals
         // the prior, so optimally reacting to it saves exactly zero.
         const decide::BinaryCore& core = w.hyp_m3_core();
         const decide::Costs& costs = w.hyp_m3_problem().costs;
         const auto& p = core.failure.p;
         const double w1 = core.prior_y1;
         const double w0 = 1.0 - w1;
         const double keep = costs.c_failure * (w1 * p[1][0] + w0 * p[0][0]);
         const double repair =
             costs.c_repair + costs.c_failure * (w1 * p[1][1] + w0 * p[0][1]);
         const double prior_cost = std::min(keep, repair);
         return prior_cost -
                decide::binary_outcome_at(core, costs, 0.5, 0.5).expected_cost;
       }},
      {"hyp.design.ED1.s_th", [](Workspace& w) { return w.design_row("ED1").s_th_star; }},
      {"hyp.design.ED1.perceived",
       [](Workspace& w) { return w.design_row("ED1").perceived_cost; }},
      {"hyp.design.ED1.effective",
       [](Workspace& w) { return w.design_row("ED1").effective_cost; }},
      {"hyp.design.ED2.s_th", [](Workspace& w) { return w.design_row("ED2").s_th_star; }},
      {"hyp.design.ED2.perceived",
       [](Workspace& w) { return w.design_row("ED2").perceived_cost; }},
      {"hyp.design.ED2.effective",
       [](Workspace& w) { return w.design_row("ED2").effective_cost; }},
      {"hyp.design.ED3.s_th", [](Workspace& w) { return w.design_row("ED3").s_th_star; }},
      {"hyp.design.ED3.perceived",
       [](Workspace& w) { return w.design_row("ED3").perceived_cost; }},
      {"hyp.design.ED3.effective",
       [](Workspace& w) { return w.design_row("ED3").effective_cost; }},
      {"half.prior.cost_keep", [](Workspace& w) { return w.half_report().prior.cost_keep; }},
      {"half.prior.cost_repair",
       [](Workspace& w) { return w.half_report().prior.cost_repair; }},
      {"half.ratio",
       [](Workspace& w) { return cost_ratio(w.half_core(), w.half_problem().costs); }},
      {"half.policy.root_lo",
       [](Workspace& w) { return first_boundary(w.half_report().policy); }},
      {"half.policy.root_hi",
       [](Workspace& w) {
         const auto& b = w.half_report().policy.boundaries;
         if (b.size() < 2) throw ConfigError("expected two policy boundaries");
         return b.back();
       }},
      {"half.cont.cost", [](Workspace& w) { return w.half_report().expected_cost; }},
      {"half.cont.voi", [](Workspace& w) { return w.half_report().voi; }},
      {"half.roc.youden_s_th", [](Workspace& w) { return w.half_idx().youden_s_th; }},
      {"half.roc.corner_s_th", [](Workspace& w) { return w.half_idx().corner_s_th; }},
      {"half.roc.cost_at_youden",
       [](Workspace& w) {
         return decide::binary_cost_at_threshold(w.half_problem(),
                                                 w.half_idx().youden_s_th);
       }},
      {"half.m4.s_th_opt", [](Workspace& w) { return w.half_cal().s_th_star; }},
      {"half.m4.cost_opt", [](Workspace& w) { return w.half_cal().cost_star; }},
      {"half.m4.cost_at_suggested",
       [](Workspace& w) {
         return decide::binary_cost_at_threshold(w.half_problem(), w.half().s_th_fixed);
       }},
      {"half.m4.excess_pct",
       [](Workspace& w) {
         const double at = decide::binary_cost_at_threshold(w.half_problem(),
                                                            w.half().s_th_fixed);
         return 100.0 * (at / w.half_cal().cost_star - 1.0);
       }},
      {"half.ts.prior.cost", [](Workspace& w) { return w.ts_prior().expected_cost; }},
      {"half.ts.cont.cost", [](Workspace& w) { return w.ts_cont().expected_cost; }},
      {"half.ts.cont.voi", [](Workspace& w) { return w.ts_cont().voi; }},
      {"half.ts.cont.s_th1", [](Workspace& w) { return w.ts_cont().step1_threshold; }},
      {"half.ts.fixed.cost", [](Workspace& w) { return w.ts_fixed().expected_cost; }},
      {"half.ts.fixed.voi", [](Workspace& w) { return w.ts_fixed().voi; }},
      {"half.ts.opt.s_th", [](Workspace& w) { return w.ts_opt().s_th_fixed; }},
      {"half.ts.opt.cost", [](Workspace& w) { return w.ts_opt().expected_cost; }},
      {"half.ts.opt.voi", [](Workspace& w) { return w.ts_opt().voi; }},
      {"half.ts.memoryless.cost", [](Workspace& w) { return w.mem_cost(); }},
      {"half.ts.m4opt.cost", [](Workspace& w) { return w.m4_at_mem_cost(); }},
  };
  return reg;
}

const std::map<std::string, FlagFn>& flag_registry() {
  static const std::map<std::string, FlagFn> reg = {
      {"hyp.prior.action_keep",
       [](Workspace& w) { return w.hyp_prior().action == bayes::Action::Keep; }},
      {"hyp.design.ED1.matches",
       [](Workspace& w) { return w.design_row("ED1").matches_application; }},
      {"hyp.design.ED2.matches",
       [](Workspace& w) { return w.design_row("ED2").matches_application; }},
      {"hyp.design.ED3.matches",
       [](Workspace& w) { return w.design_row("ED3").matches_application; }},
      {"half.prior.action_keep",
       [](Workspace& w) { return w.half_report().prior.action == bayes::Action::Keep; }},
      {"half.ts.prior.a1_repair",
       [](Workspace& w) { return w.ts_prior().a1 == bayes::Action::Repair; }},
      {"half.ts.prior.a2_keep",
       [](Workspace& w) { return w.ts_prior().a2 == bayes::Action::Keep; }},
      {"half.ts.cont.a2_fixed_after_repair",
       [](Workspace& w) { return w.a2_fixed_after_repair(); }},
      {"half.ts.memoryless.above_fixed",
       [](Workspace& w) { return w.mem_cost() > w.ts_fixed().expected_cost; }},
      {"half.ts.m4opt.above_fixed",
       [](Workspace& w) { return w.m4_at_mem_cost() > w.ts_fixed().expected_cost; }},
  };
  return reg;
}

}  // namespace

Report run_manifest(const std::filesystem::path& manifest_path,
                    const std::string& id_prefix, double extra_rel_tol) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in)
    throw ConfigError("cannot open verification manifest '" + manifest_path.string() + "'");
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("verification manifest is not valid json: ") + e.what());
  }
  if (!root.is_object() || !root.contains("checks") || !root["checks"].is_array())
    throw ConfigError("verification manifest must hold a 'checks' array");

  Report report;
  Workspace ws;
  for (const json& entry : root["checks"]) {
    CheckOutcome out;
    out.id = entry.value("id", std::string("<missing id>"));
    if (!id_prefix.empty() && out.id.rfind(id_prefix, 0) != 0) continue;
    out.criterion = entry.value("criterion", 0);
    const std::string kind = entry.value("kind", std::string("value"));
    try {
      if (kind == "value" || kind == "range") {
        auto it = value_registry().find(out.id);
        if (it == value_registry().end())
          throw ConfigError("no computation registered for check '" + out.id + "'");
        const double got = it->second(ws);
        if (kind == "value") {
          const double expected = entry.at("expected").get<double>();
          const double tol_abs = entry.value("tol_abs", 0.0);
          const double tol_rel = std::max(entry.value("tol_rel", 0.0), extra_rel_tol);
          const double tol = std::max(tol_abs, tol_rel * std::abs(expected));
          out.pass = std::isfinite(got) && std::abs(got - expected) <= tol;
          out.detail = "got " + fmt(got) + ", expected " + fmt(expected) + " (tol " +
                       fmt(tol) + ")";
        } else {
          const double lo = entry.at("lo").get<double>();
          const double hi = entry.at("hi").get<double>();
          out.pass = std::isfinite(got) && got >= lo && got <= hi;
          out.detail =
              "got " + fmt(got) + ", expected within [" + fmt(lo) + ", " + fmt(hi) + "]";
        }
      } else if (kind == "flag") {
        auto it = flag_registry().find(out.id);
        if (it == flag_registry().end())
          throw ConfigError("no computation registered for check '" + out.id + "'");
        const bool got = it->second(ws);
        const bool expected = entry.at("expected").get<bool>();
        out.pass = got == expected;
        out.detail = std::string("got ") + (got ? "yes" : "no") + ", expected " +
                     (expected ? "yes" : "no");
      } else {
        out.pass = false;
        out.detail = "unknown check kind '" + kind + "'";
      }
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("error: ") + e.what();
    }
    (out.pass ? report.passed : report.failed) += 1;
    report.checks.push_back(std::move(out));
  }
  return report;
}

std::string to_text(const Report& report) {
  std::ostringstream os;
  for (const CheckOutcome& c : report.checks)
    os << (c.pass ? "pass" : "FAIL") << "  " << c.id << ": " << c.detail << "\n";
  os << "checks passed: " << report.passed << "/" << (report.passed + report.failed)
     << "\n";
  return os.str();
}

}  // namespace ndevoi::verify
