#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "vendor/doctest.h"

#include <cmath>

#include "ndevoi/oracle.hpp"
#include "ndevoi/scenario.hpp"

using namespace ndevoi;
using bayes::Action;
using dist::ContinuousDistribution;

namespace {

struct HypSetup {
  scenario::ScenarioConfig cfg = scenario::builtin("hypothetical");
  decide::OneStepProblem problem =
      scenario::one_step_problem(cfg, scenario::ModelFamily::FullSignal);
  model::BaseModel base = scenario::make_base(cfg);
  ContinuousDistribution prior = std::get<ContinuousDistribution>(cfg.condition_prior);
  const bayes::ContinuousFailureModel& failure =
      std::get<bayes::ContinuousFailureModel>(problem.failure);

  std::function<double(double, Action)> p_fail() const {
    return [this](double x, Action a) { return failure.p_fail(x, a); };
  }
};

}  // namespace

TEST_CASE("grid masses telescope to one, row by row") {
  HypSetup h;
  auto grid = oracle::make_grid(h.base, h.prior, 80, 120);
  REQUIRE(grid.mass.size() == 80);
  REQUIRE(grid.x_nodes.size() == 80);
  REQUIRE(grid.s_nodes.size() == 120);
  CHECK(grid.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& row : grid.mass) {
    REQUIRE(row.size() == 120);
    double sum = 0.0;
    for (double m : row) {
      CHECK(m >= 0.0);
      sum += m;
    }
    CHECK(sum == doctest::Approx(1.0 / 80).epsilon(1e-12));
  }
}

TEST_CASE("binary grids weight the two states by the prior") {
  const auto l0 = ContinuousDistribution::normal(-0.207, 0.0804);
  const auto l1 = ContinuousDistribution::normal(-0.354, 0.08);
  auto grid = oracle::make_grid(l0, l1, 0.05, 400);
  REQUIRE(grid.mass.size() == 2);
  CHECK(grid.x_nodes[0] == 0.0);
  CHECK(grid.x_nodes[1] == 1.0);
  double w0 = 0.0, w1 = 0.0;
  for (double m : grid.mass[0]) w0 += m;
  for (double m : grid.mass[1]) w1 += m;
  CHECK(w0 == doctest::Approx(0.95).epsilon(1e-12));
  CHECK(w1 == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("always-keep and always-repair reduce to the prior costs") {
  HypSetup h;
  // the failure curve is convex deep into the prior tail, so the quantile
  // rows converge slowly on this audit; use plenty of them
  auto grid = oracle::make_grid(h.base, h.prior, 4000, 50);
  auto prior_dec = decide::prior_optimal(h.problem);

  const double keep_cost = oracle::oracle_expected_cost(
      grid, [](double) { return Action::Keep; }, h.problem.costs, h.p_fail());
  const double repair_cost = oracle::oracle_expected_cost(
      grid, [](double) { return Action::Repair; }, h.problem.costs, h.p_fail());
  // constant policies do not depend on the signal discretization at all;
  // the only error is the condition row discretization
  CHECK(keep_cost == doctest::Approx(prior_dec.cost_keep).epsilon(5e-3));
  CHECK(repair_cost == doctest::Approx(prior_dec.cost_repair).epsilon(1e-6));
}

TEST_CASE("the quadrature preposterior cost survives a brute-force audit") {
  HypSetup h;
  auto policy = decide::optimal_policy(h.problem);
  const double quad_cost = decide::preposterior_cost(h.problem, policy);

  auto act = [&policy](double s) {
    return policy.repairs(s) ? Action::Repair : Action::Keep;
  };
  auto grid = oracle::make_grid(h.base, h.prior, 400, 400);
  const double brute = oracle::oracle_expected_cost(grid, act, h.problem.costs, h.p_fail());
  CHECK(brute == doctest::Approx(quad_cost).epsilon(0.01));

  // doubling the grid brings the audit closer, not further
  auto fine = oracle::make_grid(h.base, h.prior, 800, 800);
  const double brute_fine =
      oracle::oracle_expected_cost(fine, act, h.problem.costs, h.p_fail());
  CHECK(std::fabs(brute_fine - quad_cost) <= std::fabs(brute - quad_cost) + 1e-12);
}

TEST_CASE("the binary-state audit agrees with the continuous solve") {
  const auto cfg = scenario::builtin("halfcell");
  auto problem = scenario::one_step_problem(cfg, scenario::default_family(cfg));
  auto rep = decide::solve_one_step(problem);

  const auto& spec = std::get<scenario::SignalClassDensities>(cfg.nde);
  auto grid = oracle::make_grid(spec.lik_y0, spec.lik_y1, 0.05, 2000);
  const auto& table = std::get<bayes::BinaryFailureModel>(problem.failure);
  auto p_fail = [&table](double y, Action a) {
    return table.p_fail(static_cast<int>(y), a);
  };
  auto act = [&rep](double s) {
    return rep.policy.repairs(s) ? Action::Repair : Action::Keep;
  };
  const double brute = oracle::oracle_expected_cost(grid, act, problem.costs, p_fail);
  CHECK(brute == doctest::Approx(rep.expected_cost).epsilon(0.01));

  auto fine = oracle::make_grid(spec.lik_y0, spec.lik_y1, 0.05, 4000);
  const double brute_fine = oracle::oracle_expected_cost(fine, act, problem.costs, p_fail);
  CHECK(std::fabs(brute_fine - rep.expected_cost) <=
        std::fabs(brute - rep.expected_cost) + 1e-12);
}
