#include "ndevoi/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "ndevoi/errors.hpp"
#include "ndevoi/parallel.hpp"

namespace ndevoi::oracle {

namespace {

// Inverts a monotone cdf by bisection. Pure cdf evaluations, no quadrature.
double invert_cdf(const std::function<double(double)>& cdf, double p, double lo,
                  double hi) {
  for (int i = 0; i < 200 && hi - lo > 1e-13 * (1.0 + std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Column edges and nodes at quantiles of `cdf`: edges at k/ns with the outer
// edges pushed to +/-inf, nodes at (k+0.5)/ns except the outer nodes, which
// sit at the bracketing window ends so they stay finite.
void build_columns(const std::function<double(double)>& cdf, const Interval& window,
                   int ns, std::vector<double>& edges, std::vector<double>& nodes) {
  edges.assign(static_cast<std::size_t>(ns) + 1, 0.0);
  nodes.assign(static_cast<std::size_t>(ns), 0.0);
  edges.front() = -Interval::inf;
  edges.back() = Interval::inf;
  parallel_for(static_cast<std::size_t>(ns) - 1, [&](std::size_t k) {
    edges[k + 1] = invert_cdf(cdf, double(k + 1) / double(ns), window.lo, window.hi);
  });
  parallel_for(static_cast<std::size_t>(ns), [&](std::size_t j) {
    nodes[j] = invert_cdf(cdf, (double(j) + 0.5) / double(ns), window.lo, window.hi);
  });
}

}  // namespace

double OracleGrid::total_mass() const {
  double total = 0.0;
  for (const auto& row : mass)
    for (double m : row) total += m;
  return total;
}

OracleGrid make_grid(const model::BaseModel& base,
                     const dist::ContinuousDistribution& prior, int nx, int ns) {
  if (nx < 2 || ns < 2) throw ConfigError("oracle grid needs at least 2x2 cells");

  OracleGrid grid;
  grid.x_nodes.resize(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i)
    grid.x_nodes[i] = prior.quantile((double(i) + 0.5) / double(nx));

  // Conditional signal distributions at the row nodes, reused heavily below.
  std::vector<dist::ContinuousDistribution> cond;
  cond.reserve(grid.x_nodes.size());
  Interval window{Interval::inf, -Interval::inf};
  for (double x : grid.x_nodes) {
    cond.push_back(base.signal_given_condition(x));
    const Interval w = cond.back().plausible_interval(1e-9);
    window.lo = std::min(window.lo, w.lo);
    window.hi = std::max(window.hi, w.hi);
  }

  // Marginal signal cdf approximated by the row average; rows carry equal
  // prior mass, so this is the exact cdf of the discretized joint.
  const auto marginal_cdf = [&cond](double s) {
    double sum = 0.0;
    for (const auto& d : cond) sum += d.cdf(s);
    return sum / double(cond.size());
  };

  std::vector<double> edges;
  build_columns(marginal_cdf, window, ns, edges, grid.s_nodes);

  grid.mass.assign(static_cast<std::size_t>(nx),
                   std::vector<double>(static_cast<std::size_t>(ns), 0.0));
  const double row_mass = 1.0 / double(nx);
  parallel_for(static_cast<std::size_t>(nx), [&](std::size_t i) {
    double prev = 0.0;  // cdf at -inf
    for (int j = 0; j < ns; ++j) {
      const double next = j + 1 == ns ? 1.0 : cond[i].cdf(edges[j + 1]);
      grid.mass[i][j] = row_mass * std::max(0.0, next - prev);
      prev = next;
    }
  });
  return grid;
}

OracleGrid make_grid(const dist::ContinuousDistribution& lik_y0,
                     const dist::ContinuousDistribution& lik_y1, double prior_y1,
                     int ns) {
  if (ns < 2) throw ConfigError("oracle grid needs at least 2 signal cells");
  if (!(prior_y1 >= 0.0 && prior_y1 <= 1.0))
    throw ConfigError("prior_y1 must lie in [0, 1]");

  OracleGrid grid;
  grid.x_nodes = {0.0, 1.0};
  const double w[2] = {1.0 - prior_y1, prior_y1};

  const Interval w0 = lik_y0.plausible_interval(1e-9);
  const Interval w1 = lik_y1.plausible_interval(1e-9);
  const Interval window{std::min(w0.lo, w1.lo), std::max(w0.hi, w1.hi)};

  const auto marginal_cdf = [&](double s) {
    return w[0] * lik_y0.cdf(s) + w[1] * lik_y1.cdf(s);
  };

  std::vector<double> edges;
  build_columns(marginal_cdf, window, ns, edges, grid.s_nodes);

  grid.mass.assign(2, std::vector<double>(static_cast<std::size_t>(ns), 0.0));
  for (int y = 0; y < 2; ++y) {
    const auto& lik = y == 0 ? lik_y0 : lik_y1;
    double prev = 0.0;
    for (int j = 0; j < ns; ++j) {
      const double next = j + 1 == ns ? 1.0 : lik.cdf(edges[j + 1]);
      grid.mass[y][j] = w[y] * std::max(0.0, next - prev);
      prev = next;
    }
  }
  return grid;
}

double oracle_expected_cost(const OracleGrid& grid,
                            const std::function<bayes::Action(double)>& policy,
                            const decide::Costs& costs,
                            const std::function<double(double, bayes::Action)>& p_fail) {
  const std::size_t ns = grid.s_nodes.size();

  // Resolve the policy once per column; every row shares the signal nodes.
  std::vector<bayes::Action> actions(ns);
  for (std::size_t j = 0; j < ns; ++j) actions[j] = policy(grid.s_nodes[j]);

  std::vector<double> row_cost(grid.x_nodes.size(), 0.0);
  parallel_for(grid.x_nodes.size(), [&](std::size_t i) {
    const double x = grid.x_nodes[i];
    const double fail_cost[2] = {costs.c_failure * p_fail(x, bayes::Action::Keep),
                                 costs.c_repair +
                                     costs.c_failure * p_fail(x, bayes::Action::Repair)};
    double sum = 0.0;
    const auto& row = grid.mass[i];
    for (std::size_t j = 0; j < ns; ++j)
      sum += row[j] * fail_cost[static_cast<int>(actions[j])];
    row_cost[i] = sum;
  });

  double total = 0.0;
  for (double c : row_cost) total += c;
  return total;
}

}  // namespace ndevoi::oracle
