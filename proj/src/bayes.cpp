#include "ndevoi/bayes.hpp"

#include <cmath>

#include "ndevoi/errors.hpp"

namespace ndevoi::bayes {

namespace {

constexpr double kEvidenceFloor = 1e-300;

double integrate_against_prior(const dist::ContinuousDistribution& prior,
                               const quad::Fn& weight, quad::GridScale scale,
                               const quad::QuadSettings& settings) {
  const Interval w = prior.plausible_interval(1e-13).clipped_to(prior.support());
  auto f = [&](double x) { return weight(x) * prior.pdf(x); };
  return quad::integrate_window(f, w, scale, {}, settings).value;
}

}  // namespace

double evidence(const dist::ContinuousDistribution& prior, const quad::Fn& likelihood,
                quad::GridScale scale, const quad::QuadSettings& settings) {
  const double ev = integrate_against_prior(prior, likelihood, scale, settings);
  if (!(ev >= kEvidenceFloor)) {
    throw ZeroEvidence("marginal likelihood underflowed: " + std::to_string(ev));
  }
  return ev;
}

double evidence(double prior_y1, double lik_y0, double lik_y1) {
  const double ev = prior_y1 * lik_y1 + (1.0 - prior_y1) * lik_y0;
  if (!(ev >= kEvidenceFloor)) {
    throw ZeroEvidence("marginal likelihood underflowed: " + std::to_string(ev));
  }
  return ev;
}

ContinuousPosterior posterior(const dist::ContinuousDistribution& prior,
                              const quad::Fn& likelihood, quad::GridScale scale,
                              const quad::QuadSettings& settings) {
  const double ev = evidence(prior, likelihood, scale, settings);
  ContinuousPosterior post;
  post.unnormalized = [prior, likelihood](double theta) {
    return likelihood(theta) * prior.pdf(theta);
  };
  post.evidence = ev;
  return post;
}

BinaryPosterior posterior(double prior_y1, double lik_y0, double lik_y1) {
  const double ev = evidence(prior_y1, lik_y0, lik_y1);
  return {prior_y1 * lik_y1 / ev, ev};
}

double posterior_failure(const dist::ContinuousDistribution& prior,
                         const quad::Fn& likelihood, const ContinuousFailureModel& failure,
                         Action action, quad::GridScale scale,
                         const quad::QuadSettings& settings) {
  const double ev = evidence(prior, likelihood, scale, settings);
  auto weighted = [&](double x) { return failure.p_fail(x, action) * likelihood(x); };
  return integrate_against_prior(prior, weighted, scale, settings) / ev;
}

double posterior_failure(double prior_y1, double lik_y0, double lik_y1,
                         const BinaryFailureModel& failure, Action action) {
  const BinaryPosterior post = posterior(prior_y1, lik_y0, lik_y1);
  return post.p_y1 * failure.p_fail(1, action) + (1.0 - post.p_y1) * failure.p_fail(0, action);
}

BinaryFailureModel binary_failure_from_continuous(const ContinuousFailureModel& failure,
                                                  const dist::ContinuousDistribution& prior_x,
                                                  double x_th,
                                                  const quad::QuadSettings& settings) {
  const double mass_above = 1.0 - prior_x.cdf(x_th);
  const double mass_below = prior_x.cdf(x_th);
  if (mass_above < 1e-12 || mass_below < 1e-12) {
    throw DegenerateDesign("prior leaves mass " +
                           std::to_string(std::min(mass_above, mass_below)) +
                           " on one side of x_th = " + std::to_string(x_th));
  }
  const Interval w = prior_x.plausible_interval(1e-13).clipped_to(prior_x.support());
  BinaryFailureModel table;
  for (Action a : {Action::Keep, Action::Repair}) {
    auto f = [&](double x) { return failure.p_fail(x, a) * prior_x.pdf(x); };
    const double above =
        quad::integrate(f, {std::max(x_th, w.lo), w.hi}, settings).value;
    const double below =
        quad::integrate(f, {w.lo, std::min(x_th, w.hi)}, settings).value;
    table.p[1][static_cast<int>(a)] = above / mass_above;
    table.p[0][static_cast<int>(a)] = below / mass_below;
  }
  return table;
}

}  // namespace ndevoi::bayes
