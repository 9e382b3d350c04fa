#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ndevoi/decision.hpp"

namespace ndevoi::seq {

using bayes::Action;

// Component inspected at two consecutive times, with possible degradation in
// between. Repair resets the state to good before the transition applies;
// each step charges its own repair cost, plus its failure cost whenever the
// post-action state of that step is bad.
struct TwoStepProblem {
  double prior_y1 = 0.0;                               // Pr(first-step state is bad)
  double transition[2][2] = {{1.0, 0.0}, {0.0, 1.0}};  // [y2][y1'], columns sum to 1
  std::optional<model::RocModel> roc;  // same inspection device at both steps
  double c_repair[2] = {0.0, 0.0};     // per step
  double c_failure[2] = {0.0, 0.0};    // per step
  std::string unit;
  double nde_cost = 0.0;
  int belief_grid = 2049;  // cost-to-go grid resolution, at least 512
  decide::NumericProfile num;
};

// Throws ConfigError on malformed probabilities, transition columns that do
// not sum to 1, or a belief grid under 512 points.
void validate(const TwoStepProblem& p);

// Pr(second-step state is bad) given Pr(post-action first-step state is bad) = q.
double transition_to_bad(const TwoStepProblem& p, double q);

struct PriorPair {
  Action a1 = Action::Keep;
  Action a2 = Action::Keep;
  double expected_cost = 0.0;
  double pair_cost[2][2] = {{0.0, 0.0}, {0.0, 0.0}};  // [a1][a2]
};

// Best of the four open-loop action pairs, with no observations. Ties keep.
PriorPair two_step_prior(const TwoStepProblem& p);

// Policy tree for a fixed operating point: the action after each first-step
// outcome, and after each (first, second) outcome pair.
struct FixedPointPolicy {
  Action a1[2] = {Action::Keep, Action::Keep};  // indexed by I1
  Action a2[2][2] = {{Action::Keep, Action::Keep},
                     {Action::Keep, Action::Keep}};  // indexed by [I1][I2]
  double expected_cost = 0.0;
  double pr_detect1 = 0.0;
  // Action pattern as a 6-bit code: a1(I1=1) a1(I1=0) a2(1,1) a2(1,0) a2(0,1)
  // a2(0,0), repair = 1, a1(I1=1) in the highest bit. Distinguishes the
  // qualitative policy zones of the operating-point plane.
  int pattern = 0;
};

FixedPointPolicy two_step_fixed_point(const TwoStepProblem& p, double pod, double pfa);

// Expected cost of repairing exactly on indication at both steps, ignoring
// history. Baseline for how much the belief-tracking policy saves.
double memoryless_policy_cost(const TwoStepProblem& p, double pod, double pfa);

struct SurfacePoint2 {
  double pfa = 0.0, pod = 0.0, cost = 0.0;
  int pattern = 0;
};

// Fixed-point solution over an n x n grid of operating points.
std::vector<SurfacePoint2> two_step_surface(const TwoStepProblem& p, int n);

// Backward induction on the sufficient statistic Pr(state bad | history).
// The second-step cost-to-go is tabulated on a uniform belief grid and
// linearly interpolated.
class TwoStepSolver {
 public:
  explicit TwoStepSolver(TwoStepProblem p);

  const TwoStepProblem& problem() const { return p_; }

  double cost_to_go(double q) const;        // table interpolation
  double cost_to_go_exact(double q) const;  // direct quadrature, for cross-checks

  // Optimal second-step repair regions when the pre-observation belief is q.
  decide::ContinuousPolicy second_step_policy(double q) const;

  // Posterior Pr(state bad | first signal s); exact far into the tails.
  double belief_after_signal(double s) const;

  // First-step margin, > 0 exactly where an immediate repair is optimal.
  quad::Fn first_step_margin() const;
  decide::ContinuousPolicy first_step_policy() const;

  double expected_cost(const decide::ContinuousPolicy& step1) const;

 private:
  double j2_point(double q) const;

  TwoStepProblem p_;
  std::vector<double> j2_;
};

struct ContinuousKind {};
struct FixedPointKind {
  double pod = 0.0;
  double pfa = 0.0;
};
struct OptimizePointKind {};
using TwoStepNdeKind = std::variant<ContinuousKind, FixedPointKind, OptimizePointKind>;

struct TwoStepReport {
  PriorPair prior;
  double expected_cost = 0.0;
  double voi = 0.0;
  std::string kind_label;
  // continuous kind:
  decide::ContinuousPolicy step1;
  decide::ContinuousPolicy step2_after_repair;
  double step1_threshold = std::numeric_limits<double>::quiet_NaN();
  // fixed-point and optimized kinds:
  std::optional<FixedPointPolicy> tree;
  double s_th_fixed = std::numeric_limits<double>::quiet_NaN();
  double pod = std::numeric_limits<double>::quiet_NaN();
  double pfa = std::numeric_limits<double>::quiet_NaN();
  std::vector<decide::SweepPoint> sweep;  // optimized kind: cost per candidate s_th
};

TwoStepReport two_step_analyze(const TwoStepProblem& p, const TwoStepNdeKind& kind);

decide::PolicyReport two_step_solve(const TwoStepProblem& p, const TwoStepNdeKind& kind);

}  // namespace ndevoi::seq
