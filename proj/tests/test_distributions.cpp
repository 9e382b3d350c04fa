#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "vendor/doctest.h"

#include <cmath>
#include <vector>

#include "ndevoi/distributions.hpp"
#include "ndevoi/errors.hpp"

using namespace ndevoi;
using dist::ContinuousDistribution;

namespace {

std::vector<ContinuousDistribution> zoo() {
  return {
      ContinuousDistribution::exponential(0.03),
      ContinuousDistribution::exponential(7.0),
      ContinuousDistribution::normal(-0.207, 0.0804),
      ContinuousDistribution::normal(3.0, 2.0),
      ContinuousDistribution::lognormal(-2.5, 0.5),
      ContinuousDistribution::lognormal(0.0, 1.0),
      ContinuousDistribution::uniform(0.0, 0.5),
      ContinuousDistribution::uniform(-3.0, 4.0),
  };
}

// centered difference of the cdf, with a step scaled to the local width
double cdf_slope(const ContinuousDistribution& d, double x) {
  const Interval w = d.plausible_interval(1e-6);
  const double h = std::max(1e-7, 1e-7 * (w.hi - w.lo));
  return (d.cdf(x + h) - d.cdf(x - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("standard normal cdf hits tabulated values") {
  CHECK(dist::std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(dist::std_normal_cdf(1.0) == doctest::Approx(0.841344746068543).epsilon(1e-12));
  CHECK(dist::std_normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(dist::std_normal_cdf(-8.0) == doctest::Approx(6.22096057427178e-16).epsilon(1e-9));
  CHECK(dist::std_normal_cdf(8.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("standard normal quantile inverts the cdf over the full double range") {
  // Left tail: probabilities stay away from 1.0, full relative precision.
  for (double z = -8.0; z <= 0.0; z += 0.25) {
    CHECK(dist::std_normal_quantile(dist::std_normal_cdf(z)) ==
          doctest::Approx(z).epsilon(1e-9));
  }
  // Right tail: cdf saturates toward 1.0, so z is only recoverable up to the
  // probability-space rounding 2^-53 divided by the local density.
  for (double z = 0.25; z <= 8.0; z += 0.25) {
    const double phi = std::exp(-0.5 * z * z) / 2.50662827463100050242;
    const double attainable = 4.0 * 1.11e-16 / phi + 1e-12;
    const double back = dist::std_normal_quantile(dist::std_normal_cdf(z));
    CHECK(std::fabs(back - z) <= attainable);
  }
  CHECK(dist::std_normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  // deep tail probabilities survive the round trip in probability space
  for (double p : {1e-12, 1e-9, 1e-4, 0.3, 0.9, 1 - 1e-9}) {
    CHECK(dist::std_normal_cdf(dist::std_normal_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
  }
}

TEST_CASE("quantile and cdf are mutual inverses for every distribution kind") {
  for (const auto& d : zoo()) {
    for (double p : {1e-9, 1e-4, 0.01, 0.2, 0.5, 0.77, 0.99, 1 - 1e-6}) {
      const double x = d.quantile(p);
      CHECK(d.cdf(x) == doctest::Approx(p).epsilon(1e-8));
    }
  }
}

TEST_CASE("pdf equals the slope of the cdf") {
  for (const auto& d : zoo()) {
    for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const double x = d.quantile(p);
      const double pdf = d.pdf(x);
      CHECK(pdf == doctest::Approx(cdf_slope(d, x)).epsilon(1e-4));
      CHECK(pdf >= 0.0);
    }
  }
}

TEST_CASE("log_pdf agrees with log(pdf) and survives where pdf underflows") {
  for (const auto& d : zoo()) {
    for (double p : {0.05, 0.5, 0.95}) {
      const double x = d.quantile(p);
      CHECK(d.log_pdf(x) == doctest::Approx(std::log(d.pdf(x))).epsilon(1e-10));
    }
  }
  // Normal far tail: pdf underflows to 0 yet the log density is exact
  const auto n = ContinuousDistribution::normal(0.0, 1.0);
  CHECK(n.pdf(50.0) == 0.0);
  CHECK(n.log_pdf(50.0) ==
        doctest::Approx(-0.5 * 50.0 * 50.0 - 0.918938533204673).epsilon(1e-12));
  // outside the support the log density is -inf
  const auto u = ContinuousDistribution::uniform(0.0, 1.0);
  CHECK(std::isinf(u.log_pdf(2.0)));
  CHECK(u.log_pdf(2.0) < 0.0);
  const auto ln = ContinuousDistribution::lognormal(0.0, 1.0);
  CHECK(std::isinf(ln.log_pdf(-1.0)));
}

TEST_CASE("supports and plausible windows bound the mass they claim to") {
  const auto e = ContinuousDistribution::exponential(2.0);
  CHECK(e.support().lo == 0.0);
  CHECK(!e.support().finite());
  CHECK(e.pdf(-0.5) == 0.0);
  CHECK(e.cdf(-0.5) == 0.0);

  const auto u = ContinuousDistribution::uniform(-3.0, 4.0);
  CHECK(u.support().lo == -3.0);
  CHECK(u.support().hi == 4.0);

  for (const auto& d : zoo()) {
    const Interval w = d.plausible_interval(1e-9);
    CHECK(d.cdf(w.lo) <= 1.1e-9);
    CHECK(1.0 - d.cdf(w.hi) <= 1.1e-9);
    CHECK(w.finite());
  }
}

TEST_CASE("means match the closed forms") {
  CHECK(ContinuousDistribution::exponential(0.03).mean() == doctest::Approx(0.03));
  CHECK(ContinuousDistribution::normal(-0.354, 0.08).mean() == doctest::Approx(-0.354));
  CHECK(ContinuousDistribution::uniform(0.0, 0.5).mean() == doctest::Approx(0.25));
  CHECK(ContinuousDistribution::lognormal(-2.5, 0.5).mean() ==
        doctest::Approx(std::exp(-2.5 + 0.125)).epsilon(1e-12));
}

TEST_CASE("exponential cdf and quantile are exact in the far tail") {
  const auto e = ContinuousDistribution::exponential(0.03);
  // Pr(X > x) = exp(-x / mean)
  CHECK(1.0 - e.cdf(0.1) == doctest::Approx(std::exp(-0.1 / 0.03)).epsilon(1e-10));
  CHECK(1.0 - e.cdf(0.2) == doctest::Approx(std::exp(-0.2 / 0.03)).epsilon(1e-10));
  CHECK(e.quantile(1.0 - std::exp(-10.0)) == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("upper_quantile resolves tails that quantile(1 - q) cannot") {
  // agreement with quantile where 1 - q is still representable; below ~1e-8
  // the rounding of 1 - q itself dominates quantile's accuracy, so the
  // comparison loosens there and the tail round trip takes over
  for (const auto& d : zoo()) {
    for (double q : {0.9, 0.5, 1e-2, 1e-6}) {
      CHECK(d.upper_quantile(q) == doctest::Approx(d.quantile(1.0 - q)).epsilon(1e-9));
    }
    CHECK(d.upper_quantile(1e-10) == doctest::Approx(d.quantile(1.0 - 1e-10)).epsilon(1e-5));
    for (double q : {1e-10, 1e-6, 1e-2, 0.5}) {
      CHECK(1.0 - d.cdf(d.upper_quantile(q)) == doctest::Approx(q).epsilon(1e-6));
    }
    CHECK(d.upper_quantile(0.0) == d.support().hi);
    CHECK(d.upper_quantile(1.0) == d.support().lo);
    CHECK_THROWS_AS(d.upper_quantile(-0.1), ConfigError);
    CHECK_THROWS_AS(d.upper_quantile(1.5), ConfigError);
  }

  // beyond the resolution of 1 - q: quantile has already collapsed to the
  // support end, upper_quantile still lands on the exact tail point
  const auto e = ContinuousDistribution::exponential(0.03);
  CHECK(std::isinf(e.quantile(1.0 - 1e-18)));
  CHECK(e.upper_quantile(1e-18) == doctest::Approx(-0.03 * std::log(1e-18)).epsilon(1e-13));
  CHECK(e.upper_quantile(1e-200) == doctest::Approx(0.03 * 200 * std::log(10.0)).epsilon(1e-13));

  // symmetric families: deep left and right tails mirror around the center
  const auto n = ContinuousDistribution::normal(3.0, 2.0);
  CHECK(n.upper_quantile(1e-150) + n.quantile(1e-150) == doctest::Approx(6.0).epsilon(1e-10));
  const auto ln = ContinuousDistribution::lognormal(-2.5, 0.5);
  CHECK(ln.upper_quantile(1e-100) * ln.quantile(1e-100) ==
        doctest::Approx(std::exp(-5.0)).epsilon(1e-10));

  CHECK(ContinuousDistribution::uniform(-3.0, 4.0).upper_quantile(0.25) ==
        doctest::Approx(2.25).epsilon(1e-14));
}

TEST_CASE("kind names round-trip and unknown names are rejected") {
  using dist::Kind;
  for (Kind k : {Kind::Exponential, Kind::Lognormal, Kind::Normal, Kind::Uniform}) {
    CHECK(dist::kind_from_name(dist::kind_name(k)) == k);
  }
  CHECK_THROWS_AS(dist::kind_from_name("cauchy"), ConfigError);
}

TEST_CASE("equality compares kind and parameters") {
  CHECK(ContinuousDistribution::normal(0.0, 1.0) == ContinuousDistribution::normal(0.0, 1.0));
  CHECK(!(ContinuousDistribution::normal(0.0, 1.0) == ContinuousDistribution::normal(0.0, 2.0)));
  CHECK(!(ContinuousDistribution::normal(0.0, 1.0) ==
          ContinuousDistribution::lognormal(0.0, 1.0)));
}
