#pragma once

#include <functional>

#include "ndevoi/distributions.hpp"
#include "ndevoi/interval.hpp"
#include "ndevoi/quadrature.hpp"

namespace ndevoi::bayes {

enum class Action { Keep = 0, Repair = 1 };

inline const char* action_name(Action a) { return a == Action::Repair ? "repair" : "keep"; }

// Failure probability of the component given its condition, per action.
struct ContinuousFailureModel {
  std::function<double(double)> p_fail_keep;    // x -> Pr(F | x, keep)
  std::function<double(double)> p_fail_repair;  // x -> Pr(F | x, repair)

  double p_fail(double x, Action a) const {
    return a == Action::Repair ? p_fail_repair(x) : p_fail_keep(x);
  }
};

// Failure probability table for a binary condition: p[y][action].
struct BinaryFailureModel {
  double p[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

  double p_fail(int y, Action a) const { return p[y][static_cast<int>(a)]; }
};

// Marginal likelihood of an observation whose conditional density over the
// uncertain parameter is `likelihood`. Integrates over the prior's plausible
// window (optionally in log coordinates). Throws ZeroEvidence below 1e-300.
double evidence(const dist::ContinuousDistribution& prior,
                const quad::Fn& likelihood,
                quad::GridScale scale = quad::GridScale::Linear,
                const quad::QuadSettings& settings = {});

double evidence(double prior_y1, double lik_y0, double lik_y1);

struct ContinuousPosterior {
  std::function<double(double)> unnormalized;  // theta -> likelihood(theta) * prior pdf
  double evidence = 0.0;

  double density(double theta) const { return unnormalized(theta) / evidence; }
};

struct BinaryPosterior {
  double p_y1 = 0.0;
  double evidence = 0.0;
};

ContinuousPosterior posterior(const dist::ContinuousDistribution& prior,
                              const quad::Fn& likelihood,
                              quad::GridScale scale = quad::GridScale::Linear,
                              const quad::QuadSettings& settings = {});

BinaryPosterior posterior(double prior_y1, double lik_y0, double lik_y1);

// Posterior failure probability: E[p_fail(theta, a) | observation].
double posterior_failure(const dist::ContinuousDistribution& prior,
                         const quad::Fn& likelihood, const ContinuousFailureModel& failure,
                         Action action, quad::GridScale scale = quad::GridScale::Linear,
                         const quad::QuadSettings& settings = {});

double posterior_failure(double prior_y1, double lik_y0, double lik_y1,
                         const BinaryFailureModel& failure, Action action);

// Aggregates a continuous failure model into the binary table implied by the
// condition threshold x_th: p[y][a] = E[p_fail(X, a) | Y = y].
BinaryFailureModel binary_failure_from_continuous(const ContinuousFailureModel& failure,
                                                  const dist::ContinuousDistribution& prior_x,
                                                  double x_th,
                                                  const quad::QuadSettings& settings = {});

}  // namespace ndevoi::bayes
