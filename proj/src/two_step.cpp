#include "ndevoi/two_step.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ndevoi/csv.hpp"
#include "ndevoi/errors.hpp"
#include "ndevoi/parallel.hpp"

namespace ndevoi::seq {

namespace {

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

// Midpoint in the coordinate the scan works in.
double segment_mid(const Interval& seg, quad::GridScale scale) {
  if (scale == quad::GridScale::Log) return std::sqrt(seg.lo * seg.hi);
  return 0.5 * (seg.lo + seg.hi);
}

struct StageCost {
  double keep = 0.0;
  double repair = 0.0;
  double min() const { return keep < repair ? keep : repair; }
  Action best() const { return repair < keep ? Action::Repair : Action::Keep; }
};

}  // namespace

void validate(const TwoStepProblem& p) {
  if (!is_probability(p.prior_y1)) throw ConfigError("prior state probability outside [0, 1]");
  for (int col = 0; col < 2; ++col) {
    if (!is_probability(p.transition[0][col]) || !is_probability(p.transition[1][col]))
      throw ConfigError("transition entries outside [0, 1]");
    const double sum = p.transition[0][col] + p.transition[1][col];
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("transition columns must sum to 1");
  }
  for (int i = 0; i < 2; ++i) {
    if (!(p.c_repair[i] >= 0.0) || !(p.c_failure[i] >= 0.0))
      throw ConfigError("negative cost");
  }
  if (p.belief_grid < 512) throw ConfigError("belief grid needs at least 512 points");
}

double transition_to_bad(const TwoStepProblem& p, double q) {
  return p.transition[1][1] * q + p.transition[1][0] * (1.0 - q);
}

PriorPair two_step_prior(const TwoStepProblem& p) {
  validate(p);
  PriorPair out;
  double best = std::numeric_limits<double>::infinity();
  for (int a1 = 0; a1 < 2; ++a1) {
    const double post1 = a1 == 1 ? 0.0 : p.prior_y1;  // repair resets the state
    const double q2 = transition_to_bad(p, post1);
    for (int a2 = 0; a2 < 2; ++a2) {
      const double post2 = a2 == 1 ? 0.0 : q2;
      const double cost = (a1 == 1 ? p.c_repair[0] : 0.0) + p.c_failure[0] * post1 +
                          (a2 == 1 ? p.c_repair[1] : 0.0) + p.c_failure[1] * post2;
      out.pair_cost[a1][a2] = cost;
      // Strict inequality: ties resolve to the earlier (keep-favoring) pair.
      if (cost < best) {
        best = cost;
        out.a1 = static_cast<Action>(a1);
        out.a2 = static_cast<Action>(a2);
      }
    }
  }
  out.expected_cost = best;
  return out;
}

// ---- fixed operating point ----

namespace {

// Second-step cost-to-go at belief q for a fixed operating point:
// sum over the indication of the cheaper action, unnormalized.
StageCost fixed_second_step(const TwoStepProblem& p, double pod, double pfa, double q,
                            Action* on_detect, Action* on_clear) {
  const double detect_bad = pod * q;
  const double detect_good = pfa * (1.0 - q);
  const double clear_bad = (1.0 - pod) * q;
  const double clear_good = (1.0 - pfa) * (1.0 - q);

  StageCost detect{p.c_failure[1] * detect_bad,
                   p.c_repair[1] * (detect_bad + detect_good)};
  StageCost clear{p.c_failure[1] * clear_bad,
                  p.c_repair[1] * (clear_bad + clear_good)};
  if (on_detect != nullptr) *on_detect = detect.best();
  if (on_clear != nullptr) *on_clear = clear.best();
  return {detect.keep + clear.keep, detect.min() + clear.min()};  // keep slot unused
}

double fixed_cost_to_go(const TwoStepProblem& p, double pod, double pfa, double q,
                        Action* on_detect = nullptr, Action* on_clear = nullptr) {
  return fixed_second_step(p, pod, pfa, q, on_detect, on_clear).repair;
}

}  // namespace

FixedPointPolicy two_step_fixed_point(const TwoStepProblem& p, double pod, double pfa) {
  validate(p);
  if (!is_probability(pod) || !is_probability(pfa))
    throw ConfigError("operating point outside [0, 1]");

  const double w1 = p.prior_y1;
  const double w0 = 1.0 - w1;
  const double mass1 = pod * w1 + pfa * w0;         // Pr(I1 = 1)
  const double mass0 = (1.0 - pod) * w1 + (1.0 - pfa) * w0;

  const double q_after_repair = transition_to_bad(p, 0.0);

  FixedPointPolicy out;
  out.pr_detect1 = mass1;

  double total = 0.0;
  for (int i1 = 0; i1 < 2; ++i1) {
    const double mass = i1 == 1 ? mass1 : mass0;
    if (mass <= 0.0) continue;  // outcome never occurs
    const double bad_mass = i1 == 1 ? pod * w1 : (1.0 - pod) * w1;
    const double q1 = bad_mass / mass;

    Action keep_detect, keep_clear;
    const double keep_to_go =
        fixed_cost_to_go(p, pod, pfa, transition_to_bad(p, q1), &keep_detect, &keep_clear);
    Action rep_detect, rep_clear;
    const double rep_to_go =
        fixed_cost_to_go(p, pod, pfa, q_after_repair, &rep_detect, &rep_clear);

    const StageCost stage{p.c_failure[0] * q1 + keep_to_go,
                          p.c_repair[0] + rep_to_go};
    out.a1[i1] = stage.best();
    out.a2[i1][1] = out.a1[i1] == Action::Repair ? rep_detect : keep_detect;
    out.a2[i1][0] = out.a1[i1] == Action::Repair ? rep_clear : keep_clear;
    total += mass * stage.min();
  }
  out.expected_cost = total;
  out.pattern = (static_cast<int>(out.a1[1]) << 5) | (static_cast<int>(out.a1[0]) << 4) |
                (static_cast<int>(out.a2[1][1]) << 3) |
                (static_cast<int>(out.a2[1][0]) << 2) |
                (static_cast<int>(out.a2[0][1]) << 1) | static_cast<int>(out.a2[0][0]);
  return out;
}

double memoryless_policy_cost(const TwoStepProblem& p, double pod, double pfa) {
  validate(p);
  if (!is_probability(pod) || !is_probability(pfa))
    throw ConfigError("operating point outside [0, 1]");

  const double w1 = p.prior_y1;
  const double w0 = 1.0 - w1;

  double total = 0.0;
  for (int i1 = 0; i1 < 2; ++i1) {
    const double bad_mass = i1 == 1 ? pod * w1 : (1.0 - pod) * w1;
    const double good_mass = i1 == 1 ? pfa * w0 : (1.0 - pfa) * w0;
    const double mass = bad_mass + good_mass;
    if (mass <= 0.0) continue;

    // Repair exactly on indication.
    double post_bad;
    if (i1 == 1) {
      total += mass * p.c_repair[0];
      post_bad = 0.0;
    } else {
      total += p.c_failure[0] * bad_mass;
      post_bad = bad_mass / mass;
    }

    const double q2 = transition_to_bad(p, post_bad);
    const double detect2 = pod * q2 + pfa * (1.0 - q2);
    total += mass * (p.c_repair[1] * detect2 + p.c_failure[1] * (1.0 - pod) * q2);
  }
  return total;
}

std::vector<SurfacePoint2> two_step_surface(const TwoStepProblem& p, int n) {
  if (n < 2) throw ConfigError("surface grid needs at least 2 points per axis");
  validate(p);
  std::vector<SurfacePoint2> out(static_cast<std::size_t>(n) * n);
  parallel_for(out.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx) / n;
    const int j = static_cast<int>(idx) % n;
    const double pfa = double(i) / double(n - 1);
    const double pod = double(j) / double(n - 1);
    const FixedPointPolicy sol = two_step_fixed_point(p, pod, pfa);
    out[idx] = {pfa, pod, sol.expected_cost, sol.pattern};
  });
  return out;
}

// ---- continuous observations ----

TwoStepSolver::TwoStepSolver(TwoStepProblem p) : p_(std::move(p)) {
  validate(p_);
  if (!p_.roc.has_value())
    throw ConfigError("continuous two-step analysis needs a signal-class model");
  j2_.resize(static_cast<std::size_t>(p_.belief_grid));
  parallel_for(j2_.size(), [&](std::size_t i) {
    j2_[i] = j2_point(double(i) / double(j2_.size() - 1));
  });
}

// Direct evaluation of the second-step cost-to-go at belief q: integrate the
// cheaper of the two unnormalized action costs over the signal window,
// splitting at the repair boundaries so each piece is smooth.
double TwoStepSolver::j2_point(double q) const {
  if (q <= 0.0) return 0.0;
  const double c_r = p_.c_repair[1];
  const double c_f = p_.c_failure[1];
  if (q >= 1.0) return std::min(c_r, c_f);

  const decide::ContinuousPolicy policy = second_step_policy(q);
  const auto& roc = *p_.roc;
  const auto l0 = roc.lik_y0;
  const auto l1 = roc.lik_y1;

  const auto cost_keep = [&](double s) { return c_f * q * l1(s); };
  const auto cost_repair = [&](double s) {
    return c_r * (q * l1(s) + (1.0 - q) * l0(s));
  };

  const Interval window = p_.num.signal_window;
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
    const bool repair = policy.repairs(segment_mid(seg, roc.signal_scale));
    total += quad::integrate_window(repair ? quad::Fn(cost_repair) : quad::Fn(cost_keep),
                                    seg, roc.signal_scale, {}, p_.num.quad)
                 .value;
  }
  return total;
}

double TwoStepSolver::cost_to_go(double q) const {
  if (q <= 0.0) return j2_.front();
  if (q >= 1.0) return j2_.back();
  const double t = q * double(j2_.size() - 1);
  const std::size_t i = std::min(static_cast<std::size_t>(t), j2_.size() - 2);
  const double frac = t - double(i);
  return j2_[i] * (1.0 - frac) + j2_[i + 1] * frac;
}

double TwoStepSolver::cost_to_go_exact(double q) const { return j2_point(q); }

decide::ContinuousPolicy TwoStepSolver::second_step_policy(double q) const {
  // Repair beats keep where c_r * evidence < c_f * q * lik1; in log space the
  // margin is ll1 - ll0 against a belief-dependent offset, so the boundaries
  // are findable even where both densities underflow.
  const auto& roc = *p_.roc;
  const double c_r = p_.c_repair[1];
  const double c_f = p_.c_failure[1];

  decide::ContinuousPolicy policy;
  if (q <= 0.0 || c_f <= c_r) return policy;  // repair never pays
  if (q >= 1.0) {
    policy.repair_regions.push_back(Interval::whole());
    return policy;
  }

  const double offset = std::log(c_r * (1.0 - q)) - std::log((c_f - c_r) * q);
  const auto ll0 = roc.log_lik_y0;
  const auto ll1 = roc.log_lik_y1;
  const auto margin = [ll0, ll1, offset](double s) {
    const double a = ll1(s);
    const double b = ll0(s);
    if (std::isinf(a) && std::isinf(b)) return -1.0;
    if (std::isinf(a)) return -1e6;
    if (std::isinf(b)) return 1e6;
    return std::clamp(a - b - offset, -1e6, 1e6);
  };

  const Interval bracket = p_.num.decision_bracket;
  quad::RootSettings rs;
  rs.grid_points = p_.num.decision_grid;
  rs.scale = p_.num.decision_scale;
  policy.boundaries = quad::find_roots(margin, bracket.lo, bracket.hi, rs);

  std::vector<double> edges;
  edges.push_back(bracket.lo);
  edges.insert(edges.end(), policy.boundaries.begin(), policy.boundaries.end());
  edges.push_back(bracket.hi);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const Interval seg{edges[i], edges[i + 1]};
    if (!(seg.lo < seg.hi)) continue;
    if (margin(segment_mid(seg, p_.num.decision_scale)) <= 0.0) continue;
    Interval region = seg;
    if (i == 0) region.lo = -Interval::inf;
    if (i + 2 == edges.size()) region.hi = Interval::inf;
    policy.repair_regions.push_back(region);
  }
  return policy;
}

double TwoStepSolver::belief_after_signal(double s) const {
  const auto& roc = *p_.roc;
  const double w1 = p_.prior_y1;
  const double w0 = 1.0 - w1;
  if (w1 <= 0.0) return 0.0;
  if (w0 <= 0.0) return 1.0;
  const double a = roc.log_lik_y1(s);
  const double b = roc.log_lik_y0(s);
  if (std::isinf(a) && std::isinf(b)) return w1;  // outside both supports
  if (std::isinf(a)) return 0.0;
  if (std::isinf(b)) return 1.0;
  // q = w1 / (w1 + w0 * exp(ll0 - ll1)); exp saturates cleanly to 0 or inf.
  return w1 / (w1 + w0 * std::exp(b - a));
}

quad::Fn TwoStepSolver::first_step_margin() const {
  const TwoStepSolver* self = this;
  const double repair_cost = p_.c_repair[0] + cost_to_go(transition_to_bad(p_, 0.0));
  return [self, repair_cost](double s) {
    const double q = self->belief_after_signal(s);
    const double keep_cost = self->p_.c_failure[0] * q +
                             self->cost_to_go(transition_to_bad(self->p_, q));
    return keep_cost - repair_cost;
  };
}

decide::ContinuousPolicy TwoStepSolver::first_step_policy() const {
  const quad::Fn margin = first_step_margin();
  const Interval bracket = p_.num.decision_bracket;
  quad::RootSettings rs;
  rs.grid_points = p_.num.decision_grid;
  rs.scale = p_.num.decision_scale;

  decide::ContinuousPolicy policy;
  policy.boundaries = quad::find_roots(margin, bracket.lo, bracket.hi, rs);

  std::vector<double> edges;
  edges.push_back(bracket.lo);
  edges.insert(edges.end(), policy.boundaries.begin(), policy.boundaries.end());
  edges.push_back(bracket.hi);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const Interval seg{edges[i], edges[i + 1]};
    if (!(seg.lo < seg.hi)) continue;
    if (margin(segment_mid(seg, p_.num.decision_scale)) <= 0.0) continue;
    Interval region = seg;
    if (i == 0) region.lo = -Interval::inf;
    if (i + 2 == edges.size()) region.hi = Interval::inf;
    policy.repair_regions.push_back(region);
  }
  return policy;
}

double TwoStepSolver::expected_cost(const decide::ContinuousPolicy& step1) const {
  const auto& roc = *p_.roc;
  const double w1 = p_.prior_y1;
  const double w0 = 1.0 - w1;
  const auto l0 = roc.lik_y0;
  const auto l1 = roc.lik_y1;
  const double repair_cost = p_.c_repair[0] + cost_to_go(transition_to_bad(p_, 0.0));
  const TwoStepSolver* self = this;

  // Unnormalized conditional costs, weighted by the marginal signal density.
  const auto repair_integrand = [l0, l1, w0, w1, repair_cost](double s) {
    return repair_cost * (w1 * l1(s) + w0 * l0(s));
  };
  const auto keep_integrand = [self, l0, l1, w0, w1](double s) {
    const double ev = w1 * l1(s) + w0 * l0(s);
    const double q = self->belief_after_signal(s);
    return self->p_.c_failure[0] * w1 * l1(s) +
           ev * self->cost_to_go(transition_to_bad(self->p_, q));
  };

  const Interval window = p_.num.signal_window;
  std::vector<double> cuts;
  for (double b : step1.boundaries)
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
    const bool repair = step1.repairs(segment_mid(seg, roc.signal_scale));
    total +=
        quad::integrate_window(repair ? quad::Fn(repair_integrand) : quad::Fn(keep_integrand),
                               seg, roc.signal_scale, {}, p_.num.quad)
            .value;
  }
  return total;
}

// ---- entry points ----

TwoStepReport two_step_analyze(const TwoStepProblem& p, const TwoStepNdeKind& kind) {
  TwoStepReport report;
  report.prior = two_step_prior(p);

  if (std::holds_alternative<ContinuousKind>(kind)) {
    TwoStepSolver solver(p);
    report.kind_label = "two-step signal classes";
    report.step1 = solver.first_step_policy();
    report.step2_after_repair = solver.second_step_policy(transition_to_bad(p, 0.0));
    report.expected_cost = solver.expected_cost(report.step1);
    if (!report.step1.boundaries.empty())
      report.step1_threshold = report.step1.boundaries.back();
  } else if (const auto* fixed = std::get_if<FixedPointKind>(&kind)) {
    report.kind_label = "two-step operating point";
    report.tree = two_step_fixed_point(p, fixed->pod, fixed->pfa);
    report.expected_cost = report.tree->expected_cost;
    report.pod = fixed->pod;
    report.pfa = fixed->pfa;
  } else {
    if (!p.roc.has_value())
      throw ConfigError("operating-point optimization needs a signal-class model");
    report.kind_label = "two-step optimized operating point";

    const auto cost_at = [&p](double s_th) {
      const model::ConfusionMatrix op = model::operating_point(*p.roc, s_th);
      return two_step_fixed_point(p, op.pod, op.pfa);
    };

    const Interval bracket = p.num.sweep_bracket;
    const int n = std::max(2, p.num.sweep_points);
    report.sweep.resize(n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
      double t;
      if (p.num.sweep_scale == quad::GridScale::Log) {
        const double r = std::log(bracket.hi / bracket.lo);
        t = bracket.lo * std::exp(r * double(i) / double(n - 1));
      } else {
        t = bracket.lo + (bracket.hi - bracket.lo) * double(i) / double(n - 1);
      }
      const FixedPointPolicy sol = cost_at(t);
      report.sweep[i] = {t, sol.expected_cost, sol.a1[1], sol.a1[0]};
    });

    quad::MinimizeSettings ms;
    ms.grid_points = std::max(129, n);
    ms.scale = p.num.sweep_scale;
    const quad::MinimizeResult res = quad::minimize_scalar(
        [&cost_at](double t) { return cost_at(t).expected_cost; }, bracket.lo, bracket.hi,
        ms);
    report.s_th_fixed = res.argmin;
    report.expected_cost = res.min;
    for (const auto& pt : report.sweep) {
      if (pt.cost < report.expected_cost) {
        report.expected_cost = pt.cost;
        report.s_th_fixed = pt.s_th;
      }
    }
    const model::ConfusionMatrix op = model::operating_point(*p.roc, report.s_th_fixed);
    report.pod = op.pod;
    report.pfa = op.pfa;
    report.tree = two_step_fixed_point(p, op.pod, op.pfa);
  }

  report.voi = report.prior.expected_cost - report.expected_cost;
  return report;
}

decide::PolicyReport two_step_solve(const TwoStepProblem& p, const TwoStepNdeKind& kind) {
  const TwoStepReport r = two_step_analyze(p, kind);

  decide::PolicyReport out;
  out.model_label = r.kind_label;
  out.costs.c_repair = p.c_repair[0];
  out.costs.c_failure = p.c_failure[0];
  out.costs.nde_cost = p.nde_cost;
  out.costs.unit = p.unit;

  out.prior.action = r.prior.a1;
  out.prior.expected_cost = r.prior.expected_cost;
  out.prior.cost_keep = std::min(r.prior.pair_cost[0][0], r.prior.pair_cost[0][1]);
  out.prior.cost_repair = std::min(r.prior.pair_cost[1][0], r.prior.pair_cost[1][1]);

  out.expected_cost = r.expected_cost;
  out.voi = r.prior.expected_cost - r.expected_cost;
  out.net_voi = out.voi - p.nde_cost;

  std::ostringstream notes;
  notes << "prior action pair (" << bayes::action_name(r.prior.a1) << ", "
        << bayes::action_name(r.prior.a2) << ")";

  if (r.tree.has_value()) {
    out.binary_observation = true;
    out.on_detect = r.tree->a1[1];
    out.on_clear = r.tree->a1[0];
    if (std::isfinite(r.s_th_fixed))
      out.optimal_thresholds.push_back({"fixed signal threshold", r.s_th_fixed});
    notes << "; second-step actions (I1,I2): (1,1)->"
          << bayes::action_name(r.tree->a2[1][1]) << ", (1,0)->"
          << bayes::action_name(r.tree->a2[1][0]) << ", (0,1)->"
          << bayes::action_name(r.tree->a2[0][1]) << ", (0,0)->"
          << bayes::action_name(r.tree->a2[0][0]);
  } else {
    out.binary_observation = false;
    out.policy = r.step1;
    for (std::size_t i = 0; i < r.step1.boundaries.size(); ++i)
      out.optimal_thresholds.push_back(
          {"first-step boundary " + std::to_string(i + 1), r.step1.boundaries[i]});
    notes << "; after a first-step repair the second-step policy is fixed:";
    if (r.step2_after_repair.repair_regions.empty()) {
      notes << " never repair";
    } else {
      for (const auto& reg : r.step2_after_repair.repair_regions)
        notes << " repair in [" << csv::format_sig12(reg.lo) << ", "
              << csv::format_sig12(reg.hi) << "]";
    }
    notes << "; after keeping, the second-step boundaries shift with the first signal";
  }
  out.notes = notes.str();
  return out;
}

}  // namespace ndevoi::seq
