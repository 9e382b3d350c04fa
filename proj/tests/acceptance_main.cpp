// Acceptance runner: one pass/fail line per criterion, nonzero exit when any
// fails. Criteria 1-12 are the published reference numbers grouped out of
// data/verify_manifest.json; 13-16 are property suites evaluated here.
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ndevoi/decision.hpp"
#include "ndevoi/errors.hpp"
#include "ndevoi/nde_models.hpp"
#include "ndevoi/oracle.hpp"
#include "ndevoi/scenario.hpp"
#include "ndevoi/verify.hpp"

using namespace ndevoi;
using bayes::Action;
using dist::ContinuousDistribution;

namespace {

struct Criterion {
  int number;
  std::string label;
  bool pass;
  std::string detail;
};

std::vector<Criterion> results;

void report(int number, const std::string& label, bool pass, const std::string& detail) {
  results.push_back({number, label, pass, detail});
}

const char* kLabels[12] = {
    "prior decision, hypothetical",
    "full signal model, hypothetical",
    "detection curve, hypothetical",
    "signal classes and condition split, hypothetical",
    "fixed operating point, hypothetical",
    "test-population mismatch table, hypothetical",
    "one-step decision, halfcell",
    "curve indices and fixed thresholds, halfcell",
    "two-step open-loop plan, halfcell",
    "two-step full-signal solution, halfcell",
    "two-step operating points, halfcell",
    "two-step history-blind baseline, halfcell",
};

void manifest_criteria() {
  verify::Report rep;
  try {
    rep = verify::run_manifest("data/verify_manifest.json");
  } catch (const std::exception& e) {
    for (int c = 1; c <= 12; ++c)
      report(c, kLabels[c - 1], false, std::string("manifest error: ") + e.what());
    return;
  }
  std::map<int, std::pair<int, int>> tally;  // criterion -> (passed, total)
  std::map<int, std::string> first_fail;
  for (const auto& chk : rep.checks) {
    auto& t = tally[chk.criterion];
    ++t.second;
    if (chk.pass)
      ++t.first;
    else if (!first_fail.count(chk.criterion))
      first_fail[chk.criterion] = chk.id + " (" + chk.detail + ")";
  }
  for (int c = 1; c <= 12; ++c) {
    const auto it = tally.find(c);
    if (it == tally.end()) {
      report(c, kLabels[c - 1], false, "no checks found in manifest");
      continue;
    }
    const auto [ok, total] = it->second;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%d/%d reference values", ok, total);
    std::string detail = buf;
    if (ok != total) detail += ", first miss: " + first_fail[c];
    report(c, kLabels[c - 1], ok == total, detail);
  }
}

// 50 randomized condition splits: both class densities must carry unit mass.
void normalization_suite() {
  const auto cfg = scenario::builtin("hypothetical");
  const auto base = scenario::make_base(cfg);
  const auto prior = std::get<ContinuousDistribution>(cfg.condition_prior);

  std::mt19937_64 rng(108331);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int bad = 0, draws = 0;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double x_th = 0.02 * std::pow(15.0, u01(rng));  // log-uniform [0.02, 0.3]
    ContinuousDistribution design = ContinuousDistribution::exponential(1.0);
    switch (i % 3) {
      case 0:
        design = ContinuousDistribution::exponential(0.01 + 0.09 * u01(rng));
        break;
      case 1:
        design = ContinuousDistribution::lognormal(std::log(0.005) +
                                                       u01(rng) * std::log(40.0),
                                                   0.3 + 0.9 * u01(rng));
        break;
      default:
        design = ContinuousDistribution::uniform(
            0.0, std::max(1.5 * x_th, 0.1) + 0.5 * u01(rng));
        break;
    }
    try {
      const auto roc = model::roc_from_base(base, x_th, design, prior,
                                            cfg.orientation, quad::GridScale::Linear,
                                            cfg.num.inner_quad);
      for (const auto* lik : {&roc.lik_y0, &roc.lik_y1}) {
        const double mass = quad::integrate_window([&](double s) { return (*lik)(s); },
                                                   roc.signal_window, roc.signal_scale)
                                .value;
        ++draws;
        worst = std::max(worst, std::fabs(mass - 1.0));
        if (std::fabs(mass - 1.0) > 1e-6) ++bad;
      }
    } catch (const std::exception&) {
      ++draws;
      ++bad;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%d densities, worst |mass-1| = %.2e", draws, worst);
  report(13, "class densities stay normalized across random splits", bad == 0, buf);
}

// Both routes from the conditional signal model to an operating point must
// land on the same (pod, pfa): average the detection curve over the split
// condition, or split first and threshold the class densities.
void commutativity_suite() {
  const auto cfg = scenario::builtin("hypothetical");
  const auto base = scenario::make_base(cfg);
  const auto prior = std::get<ContinuousDistribution>(cfg.condition_prior);

  double worst = 0.0;
  int bad = 0;
  for (int ix = 0; ix < 10; ++ix) {
    const double x_th = 0.02 * std::pow(20.0, ix / 9.0);  // [0.02, 0.4]
    const auto roc = model::roc_from_base(base, x_th, prior, prior, cfg.orientation,
                                          quad::GridScale::Linear, cfg.num.inner_quad);
    for (int is = 0; is < 10; ++is) {
      const double s_th = 1e-3 * std::pow(300.0, is / 9.0);  // [1e-3, 0.3]
      const auto curve = model::pod_curve_from_base(base, s_th, cfg.orientation);
      const auto via_curve = model::confusion_from_pod_curve(curve, prior, x_th,
                                                             quad::GridScale::Linear,
                                                             cfg.num.inner_quad);
      const auto via_split = model::operating_point(roc, s_th);
      const double d = std::max(std::fabs(via_curve.pod - via_split.pod),
                                std::fabs(via_curve.pfa - via_split.pfa));
      worst = std::max(worst, d);
      if (d > 1e-4) ++bad;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "100 grid points, worst disagreement = %.2e", worst);
  report(14, "model reductions commute to the same operating point", bad == 0, buf);
}

// Optimal richer-model costs must not exceed any cost reachable by the
// coarser model they generalize.
void dominance_suite() {
  const auto cfg = scenario::builtin("hypothetical");
  const auto p1 = scenario::one_step_problem(cfg, scenario::ModelFamily::FullSignal);
  const auto rep1 = decide::solve_one_step(p1);
  const double slack = 1e-3 * rep1.prior.expected_cost;

  int bad = 0;
  double worst = 0.0;
  const auto cal = decide::calibrate_threshold(p1);  // binary-indication sweep
  for (const auto& pt : cal.sweep) {
    const double gap = rep1.expected_cost - pt.cost;
    worst = std::max(worst, gap);
    if (gap > slack) ++bad;
  }

  // split-condition model against every point on its own curve, both scenarios
  int curve_points = 0;
  for (const char* name : {"hypothetical", "halfcell"}) {
    const auto c = scenario::builtin(name);
    const auto p3 = scenario::one_step_problem(c, scenario::ModelFamily::SignalClasses);
    const auto rep3 = decide::solve_one_step(p3);
    const auto core = decide::make_binary_core(p3);
    const auto& roc = std::get<model::RocModel>(p3.nde);
    const double slack3 = 1e-3 * rep3.prior.expected_cost;
    for (int i = 0; i < 61; ++i) {
      const double t = i / 60.0;
      const Interval b = p3.num.sweep_bracket;
      const double s_th = p3.num.sweep_scale == quad::GridScale::Log
                              ? b.lo * std::pow(b.hi / b.lo, t)
                              : b.lo + t * (b.hi - b.lo);
      const auto op = model::operating_point(roc, s_th);
      const double cost =
          decide::binary_outcome_at(core, p3.costs, op.pod, op.pfa).expected_cost;
      const double gap = rep3.expected_cost - cost;
      worst = std::max(worst, gap);
      if (gap > slack3) ++bad;
      ++curve_points;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%zu sweep + %d curve points, worst overshoot = %.2e",
                cal.sweep.size(), curve_points, std::max(worst, 0.0));
  report(15, "optimized models dominate every coarser operating point", bad == 0, buf);
}

// The quadrature answers must survive a from-scratch discrete audit.
void oracle_suite() {
  bool pass = true;
  std::string detail;

  {
    const auto cfg = scenario::builtin("hypothetical");
    const auto p = scenario::one_step_problem(cfg, scenario::ModelFamily::FullSignal);
    const auto base = scenario::make_base(cfg);
    const auto prior = std::get<ContinuousDistribution>(cfg.condition_prior);
    const auto& failure = std::get<bayes::ContinuousFailureModel>(p.failure);
    const auto policy = decide::optimal_policy(p);
    const double c_e = decide::preposterior_cost(p, policy);

    auto act = [&policy](double s) { return policy.repairs(s) ? Action::Repair : Action::Keep; };
    auto p_fail = [&failure](double x, Action a) { return failure.p_fail(x, a); };
    const double coarse = oracle::oracle_expected_cost(
        oracle::make_grid(base, prior, 400, 400), act, p.costs, p_fail);
    const double fine = oracle::oracle_expected_cost(
        oracle::make_grid(base, prior, 800, 800), act, p.costs, p_fail);
    const double err_c = std::fabs(coarse - c_e) / c_e;
    const double err_f = std::fabs(fine - c_e) / c_e;
    pass = pass && err_c <= 0.01 && err_f <= err_c + 1e-12;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "continuous audit %.3f%% -> %.3f%%", 100 * err_c,
                  100 * err_f);
    detail += buf;
  }
  {
    const auto cfg = scenario::builtin("halfcell");
    const auto p = scenario::one_step_problem(cfg, scenario::default_family(cfg));
    const auto rep = decide::solve_one_step(p);
    const auto& spec = std::get<scenario::SignalClassDensities>(cfg.nde);
    const auto& table = std::get<bayes::BinaryFailureModel>(p.failure);
    auto act = [&rep](double s) { return rep.policy.repairs(s) ? Action::Repair : Action::Keep; };
    auto p_fail = [&table](double y, Action a) { return table.p_fail(int(y), a); };
    const double coarse = oracle::oracle_expected_cost(
        oracle::make_grid(spec.lik_y0, spec.lik_y1, 0.05, 2000), act, p.costs, p_fail);
    const double fine = oracle::oracle_expected_cost(
        oracle::make_grid(spec.lik_y0, spec.lik_y1, 0.05, 4000), act, p.costs, p_fail);
    const double err_c = std::fabs(coarse - rep.expected_cost) / rep.expected_cost;
    const double err_f = std::fabs(fine - rep.expected_cost) / rep.expected_cost;
    pass = pass && err_c <= 0.01 && err_f <= err_c + 1e-12;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "; binary audit %.3f%% -> %.3f%%", 100 * err_c,
                  100 * err_f);
    detail += buf;
  }
  report(16, "quadrature matches brute-force audits, improving on refinement", pass, detail);
}

}  // namespace

int main() {
  try {
    manifest_criteria();
    normalization_suite();
    commutativity_suite();
    dominance_suite();
    oracle_suite();
  } catch (const std::exception& e) {
    std::printf("fatal: %s\n", e.what());
    return 99;
  }

  int failed = 0;
  for (const auto& c : results) {
    std::printf("%s  criterion %02d: %s (%s)\n", c.pass ? "pass" : "FAIL", c.number,
                c.label.c_str(), c.detail.c_str());
    if (!c.pass) ++failed;
  }
  std::printf("criteria passed: %zu/%zu\n", results.size() - failed, results.size());
  return failed == 0 ? 0 : 1;
}
