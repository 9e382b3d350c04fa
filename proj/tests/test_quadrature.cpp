#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "vendor/doctest.h"

#include <cmath>
#include <random>

#include "ndevoi/errors.hpp"
#include "ndevoi/quadrature.hpp"

using namespace ndevoi;
using quad::GridScale;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2Pi = 2.50662827463100050242;
}  // namespace

TEST_CASE("polynomials on finite intervals are integrated to near machine precision") {
  auto r = quad::integrate([](double x) { return 3.0 * x * x; }, {0.0, 1.0});
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-14));

  r = quad::integrate([](double x) { return x * x * x - 2.0 * x + 1.0; }, {-2.0, 3.0});
  // antiderivative x^4/4 - x^2 + x evaluated at the ends
  const double exact = (81.0 / 4.0 - 9.0 + 3.0) - (4.0 - 4.0 - 2.0);
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-14));
}

TEST_CASE("smooth transcendental integrals match closed forms") {
  auto r = quad::integrate([](double x) { return std::sin(x); }, {0.0, kPi});
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));

  r = quad::integrate([](double x) { return std::exp(-x * x / 2.0); }, {-10.0, 10.0});
  CHECK(r.value == doctest::Approx(kSqrt2Pi).epsilon(1e-13));
}

TEST_CASE("infinite endpoints are transformed, not truncated") {
  auto r = quad::integrate([](double x) { return std::exp(-x); }, Interval::at_least(0.0));
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-11));

  r = quad::integrate([](double x) { return std::exp(-x * x / 2.0) / kSqrt2Pi; },
                      Interval::whole());
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-11));

  // heavy-ish tail: mean of an exponential
  r = quad::integrate([](double x) { return x * std::exp(-x / 7.0) / 7.0; },
                      Interval::at_least(0.0));
  CHECK(r.value == doctest::Approx(7.0).epsilon(1e-10));
}

TEST_CASE("error estimate brackets the true error on a hard integrand") {
  // sharp peak at 0.3, width 1e-3, inside a unit interval
  const double c = 0.3, w = 1e-3;
  auto f = [&](double x) {
    const double z = (x - c) / w;
    return std::exp(-0.5 * z * z) / (w * kSqrt2Pi);
  };
  auto r = quad::integrate(f, {0.0, 1.0});
  CHECK(std::fabs(r.value - 1.0) <= std::max(r.error_estimate * 10.0, 1e-9));
  CHECK(r.subdivisions > 8);
}

TEST_CASE("segmented integration handles kinks exactly at the breakpoints") {
  const double c = 1.0 / 3.0;
  auto f = [&](double x) { return std::fabs(x - c); };
  const double exact = 0.5 * (c * c + (1.0 - c) * (1.0 - c));
  auto r = quad::integrate_segmented(f, {0.0, 1.0}, {c});
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-14));
  // breakpoints outside the domain are ignored
  r = quad::integrate_segmented(f, {0.0, 1.0}, {-5.0, c, 7.0});
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-14));
}

TEST_CASE("log-scale windows resolve peaks spanning decades") {
  // lognormal density, median 1e-3, wide window
  const double mu = std::log(1e-3), sig = 0.5;
  auto pdf = [&](double s) {
    const double z = (std::log(s) - mu) / sig;
    return std::exp(-0.5 * z * z) / (s * sig * kSqrt2Pi);
  };
  auto r = quad::integrate_window(pdf, {1e-9, 1e6}, GridScale::Log);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));

  // linear scale copes once breakpoints bracket the peak and the window is
  // not absurdly wider than the mass it holds
  auto rl = quad::integrate_window(pdf, {1e-9, 0.5}, GridScale::Linear, {1e-4, 1e-2});
  CHECK(rl.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("non-finite integrand values are reported, not averaged over") {
  auto f = [](double x) { return std::log(x - 0.5); };  // NaN left of 0.5
  CHECK_THROWS_AS(quad::integrate(f, {0.0, 1.0}), NonFiniteIntegrand);
}

TEST_CASE("exhausting the subdivision budget raises instead of returning garbage") {
  quad::QuadSettings tight;
  tight.rel_tol = 1e-13;
  tight.abs_tol = 1e-300;
  tight.max_subdivisions = 12;
  auto f = [](double x) { return std::sin(1.0 / (x + 1e-4)); };
  CHECK_THROWS_AS(quad::integrate(f, {0.0, 1.0}, tight), NonConvergence);
}

TEST_CASE("minimizer refines beyond the scan grid and never loses to it") {
  auto f = [](double x) { return (x - 1.7) * (x - 1.7) + 0.3; };
  auto m = quad::minimize_scalar(f, 0.0, 5.0);
  CHECK(m.argmin == doctest::Approx(1.7).epsilon(1e-7));
  CHECK(m.min == doctest::Approx(0.3).epsilon(1e-12));

  // multimodal objective: result must be at least as good as any random probe
  auto g = [](double x) { return std::sin(3.0 * x) + 0.05 * x; };
  auto mg = quad::minimize_scalar(g, 0.0, 20.0);
  std::mt19937_64 rng(20240811);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  for (int i = 0; i < 2000; ++i) CHECK(mg.min <= g(u(rng)) + 1e-12);
}

TEST_CASE("minimizer honors log-spaced scan grids") {
  auto f = [](double x) { return std::pow(std::log10(x) + 5.0, 2); };  // min at 1e-5
  quad::MinimizeSettings ms;
  ms.scale = GridScale::Log;
  auto m = quad::minimize_scalar(f, 1e-8, 1.0, ms);
  CHECK(m.argmin == doctest::Approx(1e-5).epsilon(1e-5));
}

TEST_CASE("minimizer rejects non-finite objectives") {
  auto f = [](double x) { return x < 0.5 ? 1.0 : std::numeric_limits<double>::quiet_NaN(); };
  CHECK_THROWS_AS(quad::minimize_scalar(f, 0.0, 1.0), NonFiniteObjective);
}

TEST_CASE("root finder locates every simple root in the bracket") {
  auto f = [](double x) { return (x - 1.0) * (x - 2.0) * (x - 3.0); };
  auto roots = quad::find_roots(f, 0.0, 4.0);
  REQUIRE(roots.size() == 3);
  CHECK(roots[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(roots[1] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(roots[2] == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("root finder works on log-spaced grids across decades") {
  auto f = [](double x) { return std::log(x) - std::log(5e-3); };
  quad::RootSettings rs;
  rs.scale = GridScale::Log;
  auto roots = quad::find_roots(f, 1e-6, 1.0, rs);
  REQUIRE(roots.size() == 1);
  CHECK(roots[0] == doctest::Approx(5e-3).epsilon(1e-10));
}

TEST_CASE("tangency without a sign change is not reported as a root") {
  auto f = [](double x) { return (x - 1.0) * (x - 1.0); };
  CHECK(quad::find_roots(f, 0.0, 2.0).empty());
}

TEST_CASE("root finder rejects non-finite evaluations") {
  auto f = [](double x) { return std::sqrt(x - 0.5); };  // NaN below 0.5
  CHECK_THROWS_AS(quad::find_roots(f, 0.0, 1.0), NonFiniteObjective);
}
