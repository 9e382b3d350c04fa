#pragma once

#include <string>
#include <variant>
#include <vector>

#include "ndevoi/bayes.hpp"
#include "ndevoi/nde_models.hpp"

namespace ndevoi::decide {

using bayes::Action;

struct Costs {
  double c_repair = 0.0;
  double c_failure = 0.0;
  double nde_cost = 0.0;
  std::string unit;
};

using NdeModel =
    std::variant<model::BaseModel, model::PodCurve, model::RocModel, model::ConfusionMatrix>;
using ConditionPrior = std::variant<dist::ContinuousDistribution, double>;
using FailureModel = std::variant<bayes::ContinuousFailureModel, bayes::BinaryFailureModel>;

// Scenario-tuned numeric controls: integration windows, root-scan brackets
// and sweep ranges are properties of the physical setup, not of the solver.
struct NumericProfile {
  Interval signal_window{-1.0, 1.0};
  quad::GridScale signal_scale = quad::GridScale::Linear;
  Interval decision_bracket{-1.0, 1.0};
  quad::GridScale decision_scale = quad::GridScale::Linear;
  int decision_grid = 2048;
  Interval sweep_bracket{-1.0, 1.0};
  quad::GridScale sweep_scale = quad::GridScale::Linear;
  int sweep_points = 61;
  quad::QuadSettings quad;        // signal-side integrals
  quad::QuadSettings inner_quad;  // condition-side (nested) integrals
};

// Single inspect-then-act decision: one component, one observation, then
// keep or repair, followed by possible failure.
struct OneStepProblem {
  ConditionPrior condition_prior{0.0};
  NdeModel nde;
  FailureModel failure;
  Costs costs;
  model::SignalOrientation orientation = model::SignalOrientation::SignalAbove;
  double x_th = std::numeric_limits<double>::quiet_NaN();
  NumericProfile num;
};

struct PriorDecision {
  Action action = Action::Keep;
  double expected_cost = 0.0;  // cost of the better action
  double cost_keep = 0.0;
  double cost_repair = 0.0;
  double p_fail_keep = 0.0;
  double p_fail_repair = 0.0;
};

// Optimal action with no observation. Ties go to keep.
PriorDecision prior_optimal(const OneStepProblem& problem);

// Binary condition summary: Pr(Y = 1) plus the per-state failure table,
// reducing a continuous condition at x_th where necessary.
struct BinaryCore {
  double prior_y1 = 0.0;
  bayes::BinaryFailureModel failure;
};
BinaryCore make_binary_core(const OneStepProblem& problem);

// Unnormalized conditional action costs at signal s (likelihood-weighted,
// not divided by the evidence; the action comparison is unaffected).
struct ConditionalCosts {
  double keep = 0.0;
  double repair = 0.0;
  double evidence = 0.0;
};
ConditionalCosts conditional_action_costs(const OneStepProblem& problem, double s);

Action optimal_action_continuous(const OneStepProblem& problem, double s);

// Decision margin m(s): m > 0 exactly where repair is optimal. Evaluated in
// log space for binary-state models so the sign stays meaningful far into
// the tails where the densities underflow.
quad::Fn decision_margin(const OneStepProblem& problem);

struct ContinuousPolicy {
  std::vector<double> boundaries;        // margin roots inside the decision bracket
  std::vector<Interval> repair_regions;  // regions where repair is optimal
  bool repairs(double s) const;
};

ContinuousPolicy optimal_policy(const OneStepProblem& problem);

// Expected total cost when acting per `policy` on the yet-unknown signal.
double preposterior_cost(const OneStepProblem& problem, const ContinuousPolicy& policy);

// ---- binary-outcome observation (indication present / absent) ----

struct BinaryOutcomeSolution {
  Action on_detect = Action::Keep;
  Action on_clear = Action::Keep;
  double expected_cost = 0.0;
  double pr_detect = 0.0;
  double cost_detect_keep = 0.0, cost_detect_repair = 0.0;  // unnormalized
  double cost_clear_keep = 0.0, cost_clear_repair = 0.0;
};

// Models with a binary observation: PoD-curve likelihoods over a continuous
// condition, or a detection/false-alarm pair over a binary condition.
BinaryOutcomeSolution solve_binary_outcome(const OneStepProblem& problem);

Action optimal_action_binary(const OneStepProblem& problem, bool detected);

// Binary-outcome expected cost at an explicit operating point.
BinaryOutcomeSolution binary_outcome_at(const BinaryCore& core, const Costs& costs,
                                        double pod, double pfa);
double cost_of_binary_actions(const BinaryCore& core, const Costs& costs, double pod,
                              double pfa, Action on_detect, Action on_clear);

// ---- reports ----

struct NamedThreshold {
  std::string name;
  double value = 0.0;
};

struct PolicyReport {
  std::string scenario;
  std::string model_label;
  PriorDecision prior;
  double expected_cost = 0.0;  // with the observation
  double voi = 0.0;            // prior.expected_cost - expected_cost
  double net_voi = 0.0;        // voi - nde_cost
  Costs costs;
  bool binary_observation = false;
  Action on_detect = Action::Keep;
  Action on_clear = Action::Keep;
  ContinuousPolicy policy;
  std::vector<NamedThreshold> optimal_thresholds;
  std::string notes;

  std::string to_text() const;
};

PolicyReport solve_one_step(const OneStepProblem& problem);

// ---- threshold calibration and surfaces ----

struct SweepPoint {
  double s_th = 0.0;
  double cost = 0.0;
  Action on_detect = Action::Keep;
  Action on_clear = Action::Keep;
};

struct ThresholdCalibration {
  double s_th_star = 0.0;
  double cost_star = 0.0;
  std::vector<SweepPoint> sweep;
};

// Expected cost of the binary-outcome problem as a function of the fixed
// signal threshold, minimized over the sweep bracket. Requires a base model
// (PoD-curve family) or a binary-state signal model (operating-point family).
ThresholdCalibration calibrate_threshold(const OneStepProblem& problem);

double binary_cost_at_threshold(const OneStepProblem& problem, double s_th);

struct SurfacePoint {
  double pfa = 0.0, pod = 0.0, cost = 0.0;
  Action on_detect = Action::Keep;
  Action on_clear = Action::Keep;
  int zone = 0;  // 0: observation ignored, 1: follow indication, 2: inverted, 3: other
};

// Expected cost over an n x n grid of operating points.
std::vector<SurfacePoint> cost_surface(const OneStepProblem& problem, int n);

struct DesignEntry {
  std::string name;
  dist::ContinuousDistribution dist;
};

struct DesignRow {
  std::string name;
  double s_th_star = 0.0;
  double perceived_cost = 0.0;  // cost believed under the design's likelihoods
  double effective_cost = 0.0;  // cost of the same actions under the reference model
  Action on_detect = Action::Keep;
  Action on_clear = Action::Keep;
  bool matches_application = false;
  std::vector<SweepPoint> sweep;
};

// Threshold calibration as seen through each inspection-campaign size
// distribution, evaluated against the application-prior reference model.
std::vector<DesignRow> experimental_design_report(const OneStepProblem& problem,
                                                  const std::vector<DesignEntry>& designs);

}  // namespace ndevoi::decide
