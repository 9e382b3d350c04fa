#pragma once

#include <functional>
#include <vector>

#include "ndevoi/bayes.hpp"
#include "ndevoi/decision.hpp"
#include "ndevoi/nde_models.hpp"

namespace ndevoi::oracle {

// Discretized joint distribution of (condition, signal), built from closed
// form cdf evaluations and plain sums only. Deliberately independent of the
// quadrature machinery so it can stand witness against it.
struct OracleGrid {
  std::vector<double> x_nodes;  // representative condition value per row
  std::vector<double> s_nodes;  // representative signal value per column
  std::vector<std::vector<double>> mass;  // [row][column]

  double total_mass() const;
};

// Continuous condition: rows at prior-quantile nodes (equal prior mass per
// row), columns at quantiles of the sum-approximated marginal signal
// distribution. The outer columns absorb the signal tails, so each row's
// masses telescope to exactly 1/nx and the table sums to 1.
OracleGrid make_grid(const model::BaseModel& base,
                     const dist::ContinuousDistribution& prior, int nx, int ns);

// Binary condition: row 0 is the good state (weight 1 - prior_y1), row 1 the
// bad state; x_nodes are 0 and 1.
OracleGrid make_grid(const dist::ContinuousDistribution& lik_y0,
                     const dist::ContinuousDistribution& lik_y1, double prior_y1,
                     int ns);

// Exhaustive expected cost of `policy` over the discrete joint: for each
// cell, the action is policy(s_node) and the cost c_R·[repair] +
// c_F·p_fail(x_node, action).
double oracle_expected_cost(const OracleGrid& grid,
                            const std::function<bayes::Action(double)>& policy,
                            const decide::Costs& costs,
                            const std::function<double(double, bayes::Action)>& p_fail);

}  // namespace ndevoi::oracle
