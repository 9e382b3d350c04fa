#include "ndevoi/decision.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "ndevoi/csv.hpp"
#include "ndevoi/errors.hpp"
#include "ndevoi/parallel.hpp"

namespace ndevoi::decide {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Stand-in for +/-inf log-margin values so root scans stay finite.
constexpr double kLogMarginCap = 1e6;

const dist::ContinuousDistribution* continuous_prior(const OneStepProblem& p) {
  return std::get_if<dist::ContinuousDistribution>(&p.condition_prior);
}

const bayes::ContinuousFailureModel* continuous_failure(const OneStepProblem& p) {
  return std::get_if<bayes::ContinuousFailureModel>(&p.failure);
}

// Finite condition window carrying all but ~1e-13 tails of the prior.
Interval condition_window(const OneStepProblem& p) {
  const auto* prior = continuous_prior(p);
  if (prior == nullptr) throw ConfigError("continuous condition prior required");
  Interval w = prior->plausible_interval(1e-13).clipped_to(prior->support());
  if (const auto* base = std::get_if<model::BaseModel>(&p.nde))
    w = w.clipped_to(base->condition_support);
  if (!(w.lo < w.hi)) throw ConfigError("empty condition window");
  return w;
}

double integrate_condition(const OneStepProblem& p, const quad::Fn& f) {
  const Interval w = condition_window(p);
  return quad::integrate(f, w, p.num.inner_quad).value;
}

// Midpoint of a segment in the coordinate the integrator works in.
double segment_mid(const Interval& seg, quad::GridScale scale) {
  if (scale == quad::GridScale::Log) return std::sqrt(seg.lo * seg.hi);
  return 0.5 * (seg.lo + seg.hi);
}

struct ActionCostFns {
  quad::Fn keep;      // unnormalized expected cost density of keeping at s
  quad::Fn repair;    // same for repairing
  quad::Fn evidence;  // marginal signal density (unnormalized posterior mass)
  quad::Fn margin;    // > 0 exactly where repair is optimal
};

// Continuous condition, full signal model: all quantities are integrals of
// likelihood-weighted costs over the condition prior.
ActionCostFns base_model_fns(const OneStepProblem& p) {
  const auto& base = std::get<model::BaseModel>(p.nde);
  const auto* prior = continuous_prior(p);
  const auto* failure = continuous_failure(p);
  if (prior == nullptr || failure == nullptr)
    throw ConfigError("a full signal model needs a continuous prior and failure model");

  const double c_r = p.costs.c_repair;
  const double c_f = p.costs.c_failure;
  const auto lik = base.signal_given_condition;
  const auto pfk = failure->p_fail_keep;
  const auto pfr = failure->p_fail_repair;
  const auto prior_pdf = [prior](double x) { return prior->pdf(x); };
  const OneStepProblem& prob = p;

  ActionCostFns fns;
  fns.keep = [&prob, lik, pfk, prior_pdf, c_f](double s) {
    return c_f * integrate_condition(prob, [&](double x) {
             return pfk(x) * lik(x).pdf(s) * prior_pdf(x);
           });
  };
  fns.repair = [&prob, lik, pfr, prior_pdf, c_r, c_f](double s) {
    return integrate_condition(prob, [&](double x) {
      return (c_r + c_f * pfr(x)) * lik(x).pdf(s) * prior_pdf(x);
    });
  };
  fns.evidence = [&prob, lik, prior_pdf](double s) {
    return integrate_condition(prob,
                               [&](double x) { return lik(x).pdf(s) * prior_pdf(x); });
  };
  // One integral instead of two: keep - repair under the same quadrature.
  fns.margin = [&prob, lik, pfk, pfr, prior_pdf, c_r, c_f](double s) {
    return integrate_condition(prob, [&](double x) {
      const double gain = c_f * pfk(x) - c_r - c_f * pfr(x);
      return gain * lik(x).pdf(s) * prior_pdf(x);
    });
  };
  return fns;
}

// Binary condition classes with conditional signal densities. The margin is
// evaluated in log space so its sign survives where the densities underflow.
ActionCostFns roc_model_fns(const OneStepProblem& p, const BinaryCore& core) {
  const auto& roc = std::get<model::RocModel>(p.nde);
  const double c_r = p.costs.c_repair;
  const double c_f = p.costs.c_failure;
  const double w1 = core.prior_y1;
  const double w0 = 1.0 - w1;
  const double keep1 = c_f * core.failure.p[1][0];
  const double keep0 = c_f * core.failure.p[0][0];
  const double rep1 = c_r + c_f * core.failure.p[1][1];
  const double rep0 = c_r + c_f * core.failure.p[0][1];
  const double gain = keep1 - rep1;  // benefit rate of repair when the state is bad
  const double loss = rep0 - keep0;  // waste rate of repair when the state is good

  const auto l0 = roc.lik_y0;
  const auto l1 = roc.lik_y1;
  const auto ll0 = roc.log_lik_y0;
  const auto ll1 = roc.log_lik_y1;

  ActionCostFns fns;
  fns.keep = [l0, l1, w0, w1, keep0, keep1](double s) {
    return keep1 * w1 * l1(s) + keep0 * w0 * l0(s);
  };
  fns.repair = [l0, l1, w0, w1, rep0, rep1](double s) {
    return rep1 * w1 * l1(s) + rep0 * w0 * l0(s);
  };
  fns.evidence = [l0, l1, w0, w1](double s) { return w1 * l1(s) + w0 * l0(s); };

  // margin(s) = a1 * l1(s) - b0 * l0(s); only the coefficient signs decide
  // which side of the likelihood ratio repair lives on.
  const double a1 = gain * w1;
  const double b0 = loss * w0;
  if (a1 > 0.0 && b0 > 0.0) {
    // usual regime: repair above a likelihood-ratio cut
    const double off = std::log(a1) - std::log(b0);
    fns.margin = [ll0, ll1, off](double s) {
      const double a = ll1(s);
      const double b = ll0(s);
      if (std::isinf(a) && std::isinf(b)) return -1.0;  // outside both supports
      if (std::isinf(a)) return -kLogMarginCap;
      if (std::isinf(b)) return kLogMarginCap;
      return std::clamp(off + a - b, -kLogMarginCap, kLogMarginCap);
    };
  } else if (a1 < 0.0 && b0 < 0.0) {
    // repair pays through the good state instead: the cut flips sides
    const double off = std::log(-b0) - std::log(-a1);
    fns.margin = [ll0, ll1, off](double s) {
      const double a = ll0(s);
      const double b = ll1(s);
      if (std::isinf(a) && std::isinf(b)) return -1.0;
      if (std::isinf(a)) return -kLogMarginCap;  // only the bad state is live: keep
      if (std::isinf(b)) return kLogMarginCap;
      return std::clamp(off + a - b, -kLogMarginCap, kLogMarginCap);
    };
  } else if (a1 <= 0.0) {
    // a1 <= 0 <= b0: repair never strictly better anywhere
    fns.margin = [](double) { return -1.0; };
  } else {
    // b0 <= 0 <= a1: repairing is never worse
    fns.margin = [](double) { return 1.0; };
  }
  return fns;
}

ActionCostFns action_cost_fns(const OneStepProblem& p) {
  if (std::holds_alternative<model::BaseModel>(p.nde)) return base_model_fns(p);
  if (std::holds_alternative<model::RocModel>(p.nde))
    return roc_model_fns(p, make_binary_core(p));
  throw ConfigError("a continuous observation needs a full signal model or signal classes");
}

quad::GridScale problem_signal_scale(const OneStepProblem& p) {
  if (const auto* roc = std::get_if<model::RocModel>(&p.nde)) return roc->signal_scale;
  return p.num.signal_scale;
}

// ---- binary-outcome internals ----

// PoD-curve family over a continuous condition: the four outcome/action
// costs as integrals against the prior, with the no-detection side obtained
// from cached totals.
struct PodFamily {
  const OneStepProblem* problem;
  const model::BaseModel* base;
  const dist::ContinuousDistribution* prior;
  const bayes::ContinuousFailureModel* failure;
  double total_keep;    // prior failure mass under keep, times nothing yet
  double total_repair;  // same under repair

  explicit PodFamily(const OneStepProblem& p) : problem(&p) {
    base = std::get_if<model::BaseModel>(&p.nde);
    prior = continuous_prior(p);
    failure = continuous_failure(p);
    if (prior == nullptr || failure == nullptr)
      throw ConfigError("a detection-curve sweep needs a continuous prior and failure model");
    const auto pdf = [this](double x) { return prior->pdf(x); };
    total_keep =
        integrate_condition(p, [&](double x) { return failure->p_fail_keep(x) * pdf(x); });
    total_repair = integrate_condition(
        p, [&](double x) { return failure->p_fail_repair(x) * pdf(x); });
  }

  BinaryOutcomeSolution at(const std::function<double(double)>& pod_fn) const {
    const auto pdf = [this](double x) { return prior->pdf(x); };
    const double pr_detect =
        integrate_condition(*problem, [&](double x) { return pod_fn(x) * pdf(x); });
    const double detect_keep_mass = integrate_condition(
        *problem, [&](double x) { return failure->p_fail_keep(x) * pod_fn(x) * pdf(x); });
    const double detect_repair_mass = integrate_condition(
        *problem, [&](double x) { return failure->p_fail_repair(x) * pod_fn(x) * pdf(x); });

    const double c_r = problem->costs.c_repair;
    const double c_f = problem->costs.c_failure;
    BinaryOutcomeSolution sol;
    sol.pr_detect = pr_detect;
    sol.cost_detect_keep = c_f * detect_keep_mass;
    sol.cost_detect_repair = c_r * pr_detect + c_f * detect_repair_mass;
    sol.cost_clear_keep = c_f * (total_keep - detect_keep_mass);
    sol.cost_clear_repair =
        c_r * (1.0 - pr_detect) + c_f * (total_repair - detect_repair_mass);
    finish(sol);
    return sol;
  }

  static void finish(BinaryOutcomeSolution& sol) {
    sol.on_detect =
        sol.cost_detect_repair < sol.cost_detect_keep ? Action::Repair : Action::Keep;
    sol.on_clear =
        sol.cost_clear_repair < sol.cost_clear_keep ? Action::Repair : Action::Keep;
    sol.expected_cost = std::min(sol.cost_detect_keep, sol.cost_detect_repair) +
                        std::min(sol.cost_clear_keep, sol.cost_clear_repair);
  }
};

quad::Fn pod_at_threshold(const model::BaseModel& base, double s_th,
                          model::SignalOrientation orientation) {
  return model::pod_curve_from_base(base, s_th, orientation).pod;
}

}  // namespace

bool ContinuousPolicy::repairs(double s) const {
  for (const auto& r : repair_regions)
    if (r.contains(s)) return true;
  return false;
}

BinaryCore make_binary_core(const OneStepProblem& problem) {
  BinaryCore core;

  if (const auto* table = std::get_if<bayes::BinaryFailureModel>(&problem.failure)) {
    core.failure = *table;
    if (const auto* p1 = std::get_if<double>(&problem.condition_prior)) {
      core.prior_y1 = *p1;
    } else if (const auto* roc = std::get_if<model::RocModel>(&problem.nde)) {
      core.prior_y1 = roc->prior_y1;
    } else if (const auto* prior = continuous_prior(problem);
               prior != nullptr && std::isfinite(problem.x_th)) {
      core.prior_y1 = 1.0 - prior->cdf(problem.x_th);
    } else {
      throw ConfigError("binary failure table needs a state probability");
    }
    return core;
  }

  const auto* failure = continuous_failure(problem);
  const auto* prior = continuous_prior(problem);
  if (failure == nullptr || prior == nullptr || !std::isfinite(problem.x_th))
    throw ConfigError(
        "reducing a continuous failure model to two states needs a continuous prior "
        "and a condition threshold");
  core.failure =
      bayes::binary_failure_from_continuous(*failure, *prior, problem.x_th,
                                            problem.num.inner_quad);
  if (const auto* roc = std::get_if<model::RocModel>(&problem.nde))
    core.prior_y1 = roc->prior_y1;
  else
    core.prior_y1 = 1.0 - prior->cdf(problem.x_th);
  return core;
}

PriorDecision prior_optimal(const OneStepProblem& problem) {
  PriorDecision d;
  const auto* failure = continuous_failure(problem);
  const auto* prior = continuous_prior(problem);
  if (failure != nullptr && prior != nullptr) {
    const auto pdf = [prior](double x) { return prior->pdf(x); };
    d.p_fail_keep = integrate_condition(
        problem, [&](double x) { return failure->p_fail_keep(x) * pdf(x); });
    d.p_fail_repair = integrate_condition(
        problem, [&](double x) { return failure->p_fail_repair(x) * pdf(x); });
  } else {
    const BinaryCore core = make_binary_core(problem);
    const double w1 = core.prior_y1;
    const double w0 = 1.0 - w1;
    d.p_fail_keep = w1 * core.failure.p[1][0] + w0 * core.failure.p[0][0];
    d.p_fail_repair = w1 * core.failure.p[1][1] + w0 * core.failure.p[0][1];
  }
  d.cost_keep = problem.costs.c_failure * d.p_fail_keep;
  d.cost_repair = problem.costs.c_repair + problem.costs.c_failure * d.p_fail_repair;
  d.action = d.cost_repair < d.cost_keep ? Action::Repair : Action::Keep;
  d.expected_cost = std::min(d.cost_keep, d.cost_repair);
  return d;
}

ConditionalCosts conditional_action_costs(const OneStepProblem& problem, double s) {
  const ActionCostFns fns = action_cost_fns(problem);
  return {fns.keep(s), fns.repair(s), fns.evidence(s)};
}

Action optimal_action_continuous(const OneStepProblem& problem, double s) {
  return action_cost_fns(problem).margin(s) > 0.0 ? Action::Repair : Action::Keep;
}

quad::Fn decision_margin(const OneStepProblem& problem) {
  return action_cost_fns(problem).margin;
}

ContinuousPolicy optimal_policy(const OneStepProblem& problem) {
  const ActionCostFns fns = action_cost_fns(problem);
  const Interval bracket = problem.num.decision_bracket;
  quad::RootSettings rs;
  rs.grid_points = problem.num.decision_grid;
  rs.scale = problem.num.decision_scale;
  rs.rel_tol = 1e-12;
  rs.abs_tol = 1e-14;

  ContinuousPolicy policy;
  policy.boundaries = quad::find_roots(fns.margin, bracket.lo, bracket.hi, rs);

  // Classify the sign of each inter-root segment at its midpoint; a repair
  // run touching a bracket end is taken to extend to infinity.
  std::vector<double> edges;
  edges.push_back(bracket.lo);
  edges.insert(edges.end(), policy.boundaries.begin(), policy.boundaries.end());
  edges.push_back(bracket.hi);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const Interval seg{edges[i], edges[i + 1]};
    if (!(seg.lo < seg.hi)) continue;
    const double mid = segment_mid(seg, problem.num.decision_scale);
    if (fns.margin(mid) <= 0.0) continue;
    Interval region = seg;
    if (i == 0) region.lo = -kInf;
    if (i + 2 == edges.size()) region.hi = kInf;
    if (!policy.repair_regions.empty() &&
        policy.repair_regions.back().hi == region.lo) {
      policy.repair_regions.back().hi = region.hi;  // merge across a grazing root
    } else {
      policy.repair_regions.push_back(region);
    }
  }
  return policy;
}

double preposterior_cost(const OneStepProblem& problem, const ContinuousPolicy& policy) {
  const ActionCostFns fns = action_cost_fns(problem);
  const Interval window = problem.num.signal_window;
  const quad::GridScale scale = problem_signal_scale(problem);

  std::vector<double> cuts;
  for (double b : policy.boundaries)
    if (b > window.lo && b < window.hi) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  std::vector<double> edges;
  edges.push_back(window.lo);
  edges.insert(edges.end(), cuts.begin(), cuts.end());
  edges.push_back(window.hi);

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const Interval seg{edges[i], edges[i + 1]};
    if (!(seg.lo < seg.hi)) continue;
    const bool repair = policy.repairs(segment_mid(seg, scale));
    const quad::Fn& f = repair ? fns.repair : fns.keep;
    total += quad::integrate_window(f, seg, scale, {}, problem.num.quad).value;
  }
  return total;
}

BinaryOutcomeSolution binary_outcome_at(const BinaryCore& core, const Costs& costs,
                                        double pod, double pfa) {
  const double w1 = core.prior_y1;
  const double w0 = 1.0 - w1;
  const double detect_bad = pod * w1;
  const double detect_good = pfa * w0;
  const double clear_bad = (1.0 - pod) * w1;
  const double clear_good = (1.0 - pfa) * w0;
  const auto& p = core.failure.p;

  BinaryOutcomeSolution sol;
  sol.pr_detect = detect_bad + detect_good;
  sol.cost_detect_keep = costs.c_failure * (p[1][0] * detect_bad + p[0][0] * detect_good);
  sol.cost_detect_repair = costs.c_repair * (detect_bad + detect_good) +
                           costs.c_failure * (p[1][1] * detect_bad + p[0][1] * detect_good);
  sol.cost_clear_keep = costs.c_failure * (p[1][0] * clear_bad + p[0][0] * clear_good);
  sol.cost_clear_repair = costs.c_repair * (clear_bad + clear_good) +
                          costs.c_failure * (p[1][1] * clear_bad + p[0][1] * clear_good);
  PodFamily::finish(sol);
  return sol;
}

double cost_of_binary_actions(const BinaryCore& core, const Costs& costs, double pod,
                              double pfa, Action on_detect, Action on_clear) {
  const BinaryOutcomeSolution sol = binary_outcome_at(core, costs, pod, pfa);
  const double detect =
      on_detect == Action::Repair ? sol.cost_detect_repair : sol.cost_detect_keep;
  const double clear =
      on_clear == Action::Repair ? sol.cost_clear_repair : sol.cost_clear_keep;
  return detect + clear;
}

BinaryOutcomeSolution solve_binary_outcome(const OneStepProblem& problem) {
  if (const auto* curve = std::get_if<model::PodCurve>(&problem.nde)) {
    if (continuous_prior(problem) != nullptr && continuous_failure(problem) != nullptr)
      return PodFamily(problem).at(curve->pod);
    // Binary condition: collapse the curve to its per-state detection rates
    // only if a threshold splits the states; without one this is ill-posed.
    throw ConfigError("a detection curve over a binary state is not supported; "
                      "use a detection/false-alarm pair");
  }
  if (const auto* cm = std::get_if<model::ConfusionMatrix>(&problem.nde))
    return binary_outcome_at(make_binary_core(problem), problem.costs, cm->pod, cm->pfa);
  throw ConfigError("binary-outcome analysis needs a detection curve or operating point");
}

Action optimal_action_binary(const OneStepProblem& problem, bool detected) {
  const BinaryOutcomeSolution sol = solve_binary_outcome(problem);
  return detected ? sol.on_detect : sol.on_clear;
}

double binary_cost_at_threshold(const OneStepProblem& problem, double s_th) {
  if (const auto* base = std::get_if<model::BaseModel>(&problem.nde)) {
    return PodFamily(problem).at(pod_at_threshold(*base, s_th, problem.orientation))
        .expected_cost;
  }
  if (const auto* roc = std::get_if<model::RocModel>(&problem.nde)) {
    const model::ConfusionMatrix op = model::operating_point(*roc, s_th);
    return binary_outcome_at(make_binary_core(problem), problem.costs, op.pod, op.pfa)
        .expected_cost;
  }
  throw ConfigError("threshold sweeps need a full signal model or signal classes");
}

ThresholdCalibration calibrate_threshold(const OneStepProblem& problem) {
  ThresholdCalibration cal;
  std::function<BinaryOutcomeSolution(double)> outcome_at;

  if (const auto* base = std::get_if<model::BaseModel>(&problem.nde)) {
    auto family = std::make_shared<PodFamily>(problem);
    const model::BaseModel* b = base;
    const auto orientation = problem.orientation;
    outcome_at = [family, b, orientation](double t) {
      return family->at(pod_at_threshold(*b, t, orientation));
    };
  } else if (const auto* roc = std::get_if<model::RocModel>(&problem.nde)) {
    auto core = std::make_shared<BinaryCore>(make_binary_core(problem));
    const Costs costs = problem.costs;
    const model::RocModel* r = roc;
    outcome_at = [core, costs, r](double t) {
      const model::ConfusionMatrix op = model::operating_point(*r, t);
      return binary_outcome_at(*core, costs, op.pod, op.pfa);
    };
  } else {
    throw ConfigError("threshold sweeps need a full signal model or signal classes");
  }

  const Interval bracket = problem.num.sweep_bracket;
  const int n = std::max(2, problem.num.sweep_points);
  cal.sweep.resize(n);
  parallel_for(n, [&](std::size_t i) {
    double t;
    if (problem.num.sweep_scale == quad::GridScale::Log) {
      const double r = std::log(bracket.hi / bracket.lo);
      t = bracket.lo * std::exp(r * double(i) / double(n - 1));
    } else {
      t = bracket.lo + (bracket.hi - bracket.lo) * double(i) / double(n - 1);
    }
    const BinaryOutcomeSolution sol = outcome_at(t);
    cal.sweep[i] = {t, sol.expected_cost, sol.on_detect, sol.on_clear};
  });

  quad::MinimizeSettings ms;
  ms.grid_points = std::max(129, n);
  ms.scale = problem.num.sweep_scale;
  const auto objective = [&outcome_at](double t) { return outcome_at(t).expected_cost; };
  const quad::MinimizeResult res =
      quad::minimize_scalar(objective, bracket.lo, bracket.hi, ms);
  cal.s_th_star = res.argmin;
  cal.cost_star = res.min;
  for (const auto& pt : cal.sweep) {
    if (pt.cost < cal.cost_star) {
      cal.cost_star = pt.cost;
      cal.s_th_star = pt.s_th;
    }
  }
  return cal;
}

std::vector<SurfacePoint> cost_surface(const OneStepProblem& problem, int n) {
  if (n < 2) throw ConfigError("surface grid needs at least 2 points per axis");
  const BinaryCore core = make_binary_core(problem);
  const PriorDecision prior = prior_optimal(problem);

  std::vector<SurfacePoint> out(static_cast<std::size_t>(n) * n);
  parallel_for(out.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx) / n;  // pfa index
    const int j = static_cast<int>(idx) % n;  // pod index
    const double pfa = double(i) / double(n - 1);
    const double pod = double(j) / double(n - 1);
    const BinaryOutcomeSolution sol = binary_outcome_at(core, problem.costs, pod, pfa);
    SurfacePoint pt;
    pt.pfa = pfa;
    pt.pod = pod;
    pt.cost = sol.expected_cost;
    pt.on_detect = sol.on_detect;
    pt.on_clear = sol.on_clear;
    if (sol.on_detect == prior.action && sol.on_clear == prior.action)
      pt.zone = 0;  // observation changes nothing
    else if (sol.on_detect == Action::Repair && sol.on_clear == Action::Keep)
      pt.zone = 1;  // follow the indication
    else if (sol.on_detect == Action::Keep && sol.on_clear == Action::Repair)
      pt.zone = 2;  // act against the indication
    else
      pt.zone = 3;
    out[idx] = pt;
  });
  return out;
}

std::vector<DesignRow> experimental_design_report(const OneStepProblem& problem,
                                                  const std::vector<DesignEntry>& designs) {
  const auto* base = std::get_if<model::BaseModel>(&problem.nde);
  const auto* prior = continuous_prior(problem);
  if (base == nullptr || prior == nullptr || !std::isfinite(problem.x_th))
    throw ConfigError("a design comparison needs a full signal model, a continuous "
                      "prior and a condition threshold");

  const BinaryCore core = make_binary_core(problem);
  const model::RocModel reference =
      model::roc_from_base(*base, problem.x_th, *prior, *prior, problem.orientation,
                           quad::GridScale::Linear, problem.num.inner_quad, "reference");

  std::vector<DesignRow> rows;
  rows.reserve(designs.size());
  for (const auto& entry : designs) {
    const model::RocModel roc =
        model::roc_from_base(*base, problem.x_th, entry.dist, *prior, problem.orientation,
                             quad::GridScale::Linear, problem.num.inner_quad, entry.name);

    OneStepProblem sub = problem;
    sub.nde = roc;
    ThresholdCalibration cal = calibrate_threshold(sub);

    const model::ConfusionMatrix believed = model::operating_point(roc, cal.s_th_star);
    const BinaryOutcomeSolution sol =
        binary_outcome_at(core, problem.costs, believed.pod, believed.pfa);

    DesignRow row;
    row.name = entry.name;
    row.s_th_star = cal.s_th_star;
    row.perceived_cost = cal.cost_star;
    row.on_detect = sol.on_detect;
    row.on_clear = sol.on_clear;
    row.matches_application = roc.design_matches_application;
    row.sweep = std::move(cal.sweep);

    // What those actions actually cost: the component population follows the
    // in-service prior, so the realized operating point is the reference one.
    const model::ConfusionMatrix realized =
        model::operating_point(reference, cal.s_th_star);
    row.effective_cost = cost_of_binary_actions(core, problem.costs, realized.pod,
                                                realized.pfa, sol.on_detect, sol.on_clear);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string PolicyReport::to_text() const {
  std::ostringstream os;
  const auto money = [this](double v) {
    std::string s = csv::format_sig12(v);
    if (!costs.unit.empty()) s += " " + costs.unit;
    return s;
  };
  if (!scenario.empty()) os << "scenario: " << scenario << "\n";
  os << "model: " << model_label << "\n";
  os << "prior action: " << bayes::action_name(prior.action)
     << ", expected cost " << money(prior.expected_cost) << "\n";
  os << "with inspection: expected cost " << money(expected_cost) << "\n";
  os << "value of information: " << money(voi);
  if (costs.nde_cost != 0.0) os << " (net " << money(net_voi) << ")";
  os << "\n";
  if (binary_observation) {
    os << "on indication: " << bayes::action_name(on_detect)
       << ", on clear: " << bayes::action_name(on_clear) << "\n";
  } else if (policy.repair_regions.empty()) {
    os << "repair for: no signal value\n";
  } else {
    os << "repair for signal in";
    for (const auto& r : policy.repair_regions)
      os << " [" << csv::format_sig12(r.lo) << ", " << csv::format_sig12(r.hi) << "]";
    os << "\n";
  }
  if (!notes.empty()) os << "note: " << notes << "\n";
  return os.str();
}

PolicyReport solve_one_step(const OneStepProblem& problem) {
  PolicyReport report;
  report.costs = problem.costs;
  report.prior = prior_optimal(problem);

  if (std::holds_alternative<model::BaseModel>(problem.nde) ||
      std::holds_alternative<model::RocModel>(problem.nde)) {
    report.binary_observation = false;
    report.policy = optimal_policy(problem);
    report.expected_cost = preposterior_cost(problem, report.policy);
    for (std::size_t i = 0; i < report.policy.boundaries.size(); ++i) {
      report.optimal_thresholds.push_back(
          {"policy boundary " + std::to_string(i + 1), report.policy.boundaries[i]});
    }
    if (const auto* roc = std::get_if<model::RocModel>(&problem.nde)) {
      report.model_label = "signal classes";
      if (!roc->design_matches_application)
        report.notes = "signal classes calibrated under the '" + roc->design_name +
                       "' size distribution, not the in-service prior";
    } else {
      report.model_label = "full signal model";
    }
    if (report.policy.repair_regions.size() > 1) {
      if (!report.notes.empty()) report.notes += "; ";
      report.notes +=
          "multiple repair intervals: the likelihood ratio is non-monotone "
          "(unequal signal spreads), a model artifact rather than a physical effect";
    }
  } else {
    report.binary_observation = true;
    const BinaryOutcomeSolution sol = solve_binary_outcome(problem);
    report.expected_cost = sol.expected_cost;
    report.on_detect = sol.on_detect;
    report.on_clear = sol.on_clear;
    if (const auto* curve = std::get_if<model::PodCurve>(&problem.nde)) {
      report.model_label = "detection curve";
      if (std::isfinite(curve->s_th))
        report.optimal_thresholds.push_back({"fixed signal threshold", curve->s_th});
    } else {
      report.model_label = "operating point";
    }
  }

  report.voi = report.prior.expected_cost - report.expected_cost;
  report.net_voi = report.voi - problem.costs.nde_cost;
  return report;
}

}  // namespace ndevoi::decide
