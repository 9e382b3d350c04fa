#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "vendor/doctest.h"

#include <cmath>

#include "ndevoi/bayes.hpp"
#include "ndevoi/errors.hpp"

using namespace ndevoi;
using bayes::Action;
using dist::ContinuousDistribution;

TEST_CASE("binary evidence and posterior are plain mixture arithmetic") {
  // weights 0.3 / 0.7, likelihoods 2.0 / 0.5
  CHECK(bayes::evidence(0.3, 0.5, 2.0) == doctest::Approx(0.3 * 2.0 + 0.7 * 0.5).epsilon(1e-15));
  auto post = bayes::posterior(0.3, 0.5, 2.0);
  CHECK(post.p_y1 == doctest::Approx(0.6 / 0.95).epsilon(1e-15));
  CHECK(post.evidence == doctest::Approx(0.95).epsilon(1e-15));

  // an uninformative observation leaves the prior alone
  CHECK(bayes::posterior(0.2, 3.0, 3.0).p_y1 == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("zero evidence is an error, not a silent division") {
  CHECK_THROWS_AS(bayes::posterior(0.5, 0.0, 0.0), ZeroEvidence);
  const auto prior = ContinuousDistribution::normal(0.0, 1.0);
  CHECK_THROWS_AS(bayes::evidence(prior, [](double) { return 0.0; }), ZeroEvidence);
}

TEST_CASE("continuous evidence matches the conjugate normal closed form") {
  // theta ~ N(0, 1), observation s | theta ~ N(theta, 0.2): marginal N(0, sqrt(1.04))
  const auto prior = ContinuousDistribution::normal(0.0, 1.0);
  const double s = 0.5, sig_l = 0.2;
  auto lik = [&](double theta) {
    const double z = (s - theta) / sig_l;
    return std::exp(-0.5 * z * z) / (sig_l * 2.50662827463100050242);
  };
  const double marg_sd = std::sqrt(1.0 + sig_l * sig_l);
  const double expected =
      std::exp(-0.5 * (s / marg_sd) * (s / marg_sd)) / (marg_sd * 2.50662827463100050242);
  CHECK(bayes::evidence(prior, lik) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("continuous posterior integrates to one and recenters correctly") {
  const auto prior = ContinuousDistribution::normal(1.0, 2.0);
  const double s = -1.0, sig_l = 0.5;
  auto lik = [&](double theta) {
    const double z = (s - theta) / sig_l;
    return std::exp(-0.5 * z * z);  // unnormalized is fine
  };
  auto post = bayes::posterior(prior, lik);
  auto mass = quad::integrate([&](double t) { return post.density(t); }, {-9.0, 9.0});
  CHECK(mass.value == doctest::Approx(1.0).epsilon(1e-8));

  // posterior mean of the conjugate pair
  const double w = (2.0 * 2.0) / (2.0 * 2.0 + sig_l * sig_l);
  const double mean_expected = w * s + (1.0 - w) * 1.0;
  auto mean = quad::integrate([&](double t) { return t * post.density(t); }, {-9.0, 9.0});
  CHECK(mean.value == doctest::Approx(mean_expected).epsilon(1e-8));
}

TEST_CASE("binary posterior failure probability mixes the table rows") {
  bayes::BinaryFailureModel table;
  table.p[0][0] = 0.02;
  table.p[0][1] = 0.01;
  table.p[1][0] = 0.60;
  table.p[1][1] = 0.05;
  const double prior = 0.25, l0 = 1.5, l1 = 4.0;
  const double q = bayes::posterior(prior, l0, l1).p_y1;
  CHECK(bayes::posterior_failure(prior, l0, l1, table, Action::Keep) ==
        doctest::Approx((1.0 - q) * 0.02 + q * 0.60).epsilon(1e-14));
  CHECK(bayes::posterior_failure(prior, l0, l1, table, Action::Repair) ==
        doctest::Approx((1.0 - q) * 0.01 + q * 0.05).epsilon(1e-14));
}

TEST_CASE("continuous posterior failure reduces to known moments") {
  // uniform condition, identity failure curve, flat likelihood: E[X] = 1/2
  const auto prior = ContinuousDistribution::uniform(0.0, 1.0);
  bayes::ContinuousFailureModel failure;
  failure.p_fail_keep = [](double x) { return x; };
  failure.p_fail_repair = [](double) { return 0.0; };
  auto flat = [](double) { return 1.0; };
  CHECK(bayes::posterior_failure(prior, flat, failure, Action::Keep) ==
        doctest::Approx(0.5).epsilon(1e-9));
  CHECK(bayes::posterior_failure(prior, flat, failure, Action::Repair) ==
        doctest::Approx(0.0));

  // likelihood proportional to x reweights to E[X^2]/E[X] = 2/3
  auto tilt = [](double x) { return x; };
  CHECK(bayes::posterior_failure(prior, tilt, failure, Action::Keep) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("collapsing a continuous failure model at a threshold preserves class means") {
  const auto prior = ContinuousDistribution::uniform(0.0, 1.0);
  bayes::ContinuousFailureModel failure;
  failure.p_fail_keep = [](double x) { return x; };
  failure.p_fail_repair = [](double) { return 0.005; };
  auto table = bayes::binary_failure_from_continuous(failure, prior, 0.25);
  // E[X | X <= 0.25] and E[X | X > 0.25] for the uniform
  CHECK(table.p[0][0] == doctest::Approx(0.125).epsilon(1e-9));
  CHECK(table.p[1][0] == doctest::Approx(0.625).epsilon(1e-9));
  CHECK(table.p[0][1] == doctest::Approx(0.005).epsilon(1e-9));
  CHECK(table.p[1][1] == doctest::Approx(0.005).epsilon(1e-9));
}

TEST_CASE("action helpers expose the table verbatim") {
  bayes::BinaryFailureModel table;
  table.p[1][0] = 0.9;
  CHECK(table.p_fail(1, Action::Keep) == 0.9);
  CHECK(table.p_fail(1, Action::Repair) == 0.0);
  CHECK(bayes::action_name(Action::Keep) == std::string("keep"));
  CHECK(bayes::action_name(Action::Repair) == std::string("repair"));

  bayes::ContinuousFailureModel cont;
  cont.p_fail_keep = [](double x) { return 0.1 * x; };
  cont.p_fail_repair = [](double) { return 0.0; };
  CHECK(cont.p_fail(2.0, Action::Keep) == doctest::Approx(0.2));
  CHECK(cont.p_fail(2.0, Action::Repair) == 0.0);
}
