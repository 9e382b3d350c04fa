#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "vendor/doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ndevoi/distributions.hpp"
#include "ndevoi/errors.hpp"
#include "ndevoi/nde_models.hpp"

using namespace ndevoi;
using dist::ContinuousDistribution;
using model::SignalOrientation;

namespace {

// S | X = x lognormal around a polynomial median, the shape used throughout.
model::BaseModel toy_base(double sigma_log = 0.8) {
  model::BaseModel base;
  base.signal_given_condition = [sigma_log](double x) {
    return ContinuousDistribution::lognormal(std::log(0.01 + x * x), sigma_log);
  };
  base.condition_support = Interval::at_least(0.0);
  base.signal_support = Interval::at_least(0.0);
  return base;
}

double phi(double z) { return dist::std_normal_cdf(z); }

// halfcell-style binary signal model: potentials, detection below threshold
const double kMu0 = -0.207, kSig0 = 0.0804;
const double kMu1 = -0.354, kSig1 = 0.08;

model::RocModel potentials(double prior_y1 = 0.05) {
  return model::roc_from_distributions(ContinuousDistribution::normal(kMu0, kSig0),
                                       ContinuousDistribution::normal(kMu1, kSig1),
                                       prior_y1, SignalOrientation::SignalBelow);
}

}  // namespace

TEST_CASE("detection curve from a conditional lognormal matches the closed form") {
  const double s_th = 0.03, sig = 0.8;
  auto curve = model::pod_curve_from_base(toy_base(sig), s_th, SignalOrientation::SignalAbove);
  CHECK(curve.s_th == s_th);
  for (double x : {0.0, 0.05, 0.1, 0.3, 1.0}) {
    const double expected = 1.0 - phi((std::log(s_th) - std::log(0.01 + x * x)) / sig);
    CHECK(curve.pod(x) == doctest::Approx(expected).epsilon(1e-12));
  }
  // flipped orientation detects below the threshold instead
  auto below = model::pod_curve_from_base(toy_base(sig), s_th, SignalOrientation::SignalBelow);
  for (double x : {0.0, 0.1, 0.5}) {
    CHECK(below.pod(x) == doctest::Approx(1.0 - curve.pod(x)).epsilon(1e-12));
  }
}

TEST_CASE("detection curves are monotone in the condition when the median rises") {
  auto curve = model::pod_curve_from_base(toy_base(), 0.05, SignalOrientation::SignalAbove);
  double prev = -1.0;
  for (double x = 0.0; x <= 2.0; x += 0.02) {
    const double p = curve.pod(x);
    CHECK(p >= prev - 1e-12);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    prev = p;
  }
}

TEST_CASE("binary-state operating points match normal cdf arithmetic") {
  auto roc = potentials();
  // detection means signal at or below the cut-off
  for (double s : {-0.4, -0.2515, -0.2, -0.1}) {
    auto op = model::operating_point(roc, s);
    CHECK(op.pod == doctest::Approx(phi((s - kMu1) / kSig1)).epsilon(1e-12));
    CHECK(op.pfa == doctest::Approx(phi((s - kMu0) / kSig0)).epsilon(1e-12));
  }
  // the reference cut-off sits near (0.90, 0.29)
  auto ref = model::operating_point(roc, -0.2515);
  CHECK(ref.pod == doctest::Approx(0.90).epsilon(2e-3));
  CHECK(ref.pfa == doctest::Approx(0.29).epsilon(2e-2));
}

TEST_CASE("quadrature and cdf routes to an operating point agree") {
  auto roc = potentials();
  for (double s : {-0.45, -0.3, -0.25, -0.15}) {
    auto via_cdf = model::operating_point(roc, s);
    auto via_quad = model::roc_point(roc, s);
    CHECK(via_quad.pod == doctest::Approx(via_cdf.pod).epsilon(1e-8));
    CHECK(via_quad.pfa == doctest::Approx(via_cdf.pfa).epsilon(1e-8));
  }
}

TEST_CASE("log likelihoods track the plain ones and survive deep tails") {
  auto roc = potentials();
  for (double s : {-0.5, -0.3, -0.2, 0.0}) {
    CHECK(roc.log_lik_y0(s) == doctest::Approx(std::log(roc.lik_y0(s))).epsilon(1e-10));
    CHECK(roc.log_lik_y1(s) == doctest::Approx(std::log(roc.lik_y1(s))).epsilon(1e-10));
  }
  // at s = -10 both densities underflow but the log ratio is still finite
  const double log_ratio = roc.log_lik_y1(-10.0) - roc.log_lik_y0(-10.0);
  CHECK(std::isfinite(log_ratio));
  CHECK(log_ratio > 100.0);  // such a low potential is overwhelmingly the bad state
}

TEST_CASE("class densities split from a conditional model integrate to one") {
  const auto prior = ContinuousDistribution::exponential(0.03);
  auto roc = model::roc_from_base(toy_base(), 0.1, prior, prior,
                                  SignalOrientation::SignalAbove, quad::GridScale::Linear);
  CHECK(roc.prior_y1 == doctest::Approx(std::exp(-0.1 / 0.03)).epsilon(1e-9));
  for (auto* lik : {&roc.lik_y0, &roc.lik_y1}) {
    auto mass =
        quad::integrate_window([&](double s) { return (*lik)(s); }, roc.signal_window,
                               roc.signal_scale);
    CHECK(mass.value == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("splitting the condition keeps the application prior even for shifted designs") {
  const auto prior = ContinuousDistribution::exponential(0.03);
  const auto design = ContinuousDistribution::uniform(0.0, 0.5);
  auto roc = model::roc_from_base(toy_base(), 0.1, design, prior,
                                  SignalOrientation::SignalAbove, quad::GridScale::Linear,
                                  {}, "flat");
  CHECK(roc.prior_y1 == doctest::Approx(std::exp(-0.1 / 0.03)).epsilon(1e-9));
  CHECK(roc.design_name == "flat");
  CHECK(!roc.design_matches_application);
  CHECK(roc.x_th == doctest::Approx(0.1));
}

TEST_CASE("designs leaving one condition class empty are rejected") {
  const auto prior = ContinuousDistribution::exponential(0.03);
  const auto above_only = ContinuousDistribution::uniform(0.5, 0.9);
  CHECK_THROWS_AS(model::roc_from_base(toy_base(), 0.1, above_only, prior,
                                       SignalOrientation::SignalAbove),
                  DegenerateDesign);
}

TEST_CASE("averaging a detection curve equals thresholding the class densities") {
  const auto prior = ContinuousDistribution::exponential(0.03);
  const double x_th = 0.1;
  for (double s_th : {0.01, 0.03, 0.1}) {
    auto curve = model::pod_curve_from_base(toy_base(), s_th, SignalOrientation::SignalAbove);
    auto via_curve = model::confusion_from_pod_curve(curve, prior, x_th);
    auto roc = model::roc_from_base(toy_base(), x_th, prior, prior,
                                    SignalOrientation::SignalAbove);
    auto via_split = model::operating_point(roc, s_th);
    CHECK(via_curve.pod == doctest::Approx(via_split.pod).epsilon(1e-6));
    CHECK(via_curve.pfa == doctest::Approx(via_split.pfa).epsilon(1e-6));
  }
}

TEST_CASE("traces come out sorted by false-alarm rate and span the whole curve") {
  auto roc = potentials();
  auto trace = model::roc_curve_trace(roc, 201, {-0.8, 0.1});
  REQUIRE(trace.size() == 201);
  for (size_t i = 1; i < trace.size(); ++i) {
    CHECK(trace[i].pfa >= trace[i - 1].pfa - 1e-15);
    CHECK(trace[i].pod >= trace[i - 1].pod - 1e-9);  // higher pfa never lowers pod here
  }
  CHECK(trace.front().pfa < 1e-10);
  CHECK(trace.back().pod > 0.99);
}

TEST_CASE("area under the curve matches the pairwise-comparison closed form") {
  auto roc = potentials();
  auto idx = model::roc_indices(roc, 2001, {-0.8, 0.1});
  // Pr(bad-state signal below good-state signal) for two independent normals
  const double expected = phi((kMu0 - kMu1) / std::hypot(kSig0, kSig1));
  CHECK(idx.auc == doctest::Approx(expected).epsilon(1e-5));
}

TEST_CASE("Youden cut-off sits where the class densities cross") {
  auto roc = potentials();
  auto idx = model::roc_indices(roc, 2001, {-0.8, 0.1});
  const auto f0 = ContinuousDistribution::normal(kMu0, kSig0);
  const auto f1 = ContinuousDistribution::normal(kMu1, kSig1);
  auto crossings = quad::find_roots(
      [&](double s) { return f1.pdf(s) - f0.pdf(s); }, -0.5, 0.0);
  REQUIRE(!crossings.empty());
  CHECK(idx.youden_s_th == doctest::Approx(crossings.front()).epsilon(1e-5));
  CHECK(idx.youden_j > 0.0);
  CHECK(idx.youden_j <= 1.0);

  // corner point is locally optimal in the corner distance
  auto dist_at = [&](double s) {
    auto op = model::operating_point(roc, s);
    return std::hypot(op.pfa, 1.0 - op.pod);
  };
  CHECK(idx.corner_distance <= dist_at(idx.corner_s_th - 0.05) + 1e-12);
  CHECK(idx.corner_distance <= dist_at(idx.corner_s_th + 0.05) + 1e-12);
  CHECK(idx.corner_distance == doctest::Approx(dist_at(idx.corner_s_th)).epsilon(1e-9));
}

TEST_CASE("csv exports are deterministic and carry the declared headers") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ndevoi_model_csv";
  fs::create_directories(dir);

  auto roc = potentials();
  auto trace = model::roc_curve_trace(roc, 11, {-0.8, 0.1});
  const fs::path p1 = dir / "trace_a.csv", p2 = dir / "trace_b.csv";
  model::write_roc_trace_csv(p1, trace);
  model::write_roc_trace_csv(p2, trace);
  std::ifstream a(p1), b(p2);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  CHECK(sa.substr(0, 14) == "s_th,pfa,pod\n-");
  CHECK(std::count(sa.begin(), sa.end(), '\n') == 12);

  auto curve = model::pod_curve_from_base(toy_base(), 0.03, SignalOrientation::SignalAbove);
  const fs::path p3 = dir / "curve.csv";
  model::write_pod_curve_csv(p3, curve, {0.0, 0.1, 0.2});
  std::ifstream c(p3);
  std::string sc((std::istreambuf_iterator<char>(c)), std::istreambuf_iterator<char>());
  CHECK(sc.substr(0, 6) == "x,pod\n");
  CHECK(std::count(sc.begin(), sc.end(), '\n') == 4);
  fs::remove_all(dir);
}
