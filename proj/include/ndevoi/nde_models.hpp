#pragma once

#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ndevoi/distributions.hpp"
#include "ndevoi/interval.hpp"
#include "ndevoi/quadrature.hpp"

namespace ndevoi::model {

// Which side of the signal threshold counts as an indication.
enum class SignalOrientation { SignalAbove, SignalBelow };

enum class Provenance { DerivedFromBase, Given };

// Full conditional signal model: the signal distribution for each condition
// value x. The richest of the four quality-model kinds; the other three can
// be derived from it.
struct BaseModel {
  std::function<dist::ContinuousDistribution(double)> signal_given_condition;
  Interval condition_support;
  Interval signal_support = Interval::whole();
};

// Probability of detection as a function of the condition, for a fixed
// signal threshold. The curve is a lazy closure over the base model.
struct PodCurve {
  std::function<double(double)> pod;
  double s_th = std::numeric_limits<double>::quiet_NaN();
  SignalOrientation orientation = SignalOrientation::SignalAbove;
  Provenance provenance = Provenance::Given;
};

// Conditional signal densities given the binary condition state, plus the
// application prior Pr(Y = 1). detect_mass_* give the detection-side mass at
// a threshold (closed-form cdfs where available, quadrature otherwise);
// log_lik_* keep likelihood ratios computable where the densities underflow.
struct RocModel {
  std::function<double(double)> lik_y0;
  std::function<double(double)> lik_y1;
  std::function<double(double)> log_lik_y0;
  std::function<double(double)> log_lik_y1;
  std::function<double(double)> detect_mass_y0;
  std::function<double(double)> detect_mass_y1;
  double prior_y1 = 0.0;
  SignalOrientation orientation = SignalOrientation::SignalAbove;
  Interval signal_window;  // finite window carrying all but ~1e-12 of both densities
  // Log when the window spans many decades of a positive signal, so signal
  // integrals resolve narrow relative peaks.
  quad::GridScale signal_scale = quad::GridScale::Linear;
  Provenance provenance = Provenance::Given;
  // Populated when derived from a base model:
  double x_th = std::numeric_limits<double>::quiet_NaN();
  std::string design_name;
  bool design_matches_application = true;
};

// Detection / false-alarm probability pair at one operating point.
struct ConfusionMatrix {
  double pod = 0.0;
  double pfa = 0.0;
  SignalOrientation orientation = SignalOrientation::SignalAbove;
};

// ---- transitions between model kinds ----

PodCurve pod_curve_from_base(const BaseModel& base, double s_th,
                             SignalOrientation orientation);

// Conditional signal densities for the two condition classes split at x_th,
// weighting defect sizes by the inspection campaign's size distribution
// `design`. Pr(Y = 1) always comes from the application prior. Throws
// DegenerateDesign when the design leaves less than 1e-12 mass on one side
// of x_th.
RocModel roc_from_base(const BaseModel& base, double x_th,
                       const dist::ContinuousDistribution& design,
                       const dist::ContinuousDistribution& application_prior,
                       SignalOrientation orientation,
                       quad::GridScale condition_scale = quad::GridScale::Linear,
                       const quad::QuadSettings& settings = {},
                       std::string design_name = {});

// Binary-state model given directly by its two signal distributions.
RocModel roc_from_distributions(const dist::ContinuousDistribution& lik_y0,
                                const dist::ContinuousDistribution& lik_y1,
                                double prior_y1, SignalOrientation orientation);

// Operating point at s_th obtained by integrating the likelihood densities
// over the detection side.
ConfusionMatrix roc_point(const RocModel& roc, double s_th,
                          const quad::QuadSettings& settings = {});

// Same operating point through the detect_mass closures (cdf-based when the
// model was built from distributions or a base model).
ConfusionMatrix operating_point(const RocModel& roc, double s_th);

// Operating point implied by averaging a PoD curve over the two condition
// classes of `prior` split at x_th.
ConfusionMatrix confusion_from_pod_curve(const PodCurve& curve,
                                         const dist::ContinuousDistribution& prior,
                                         double x_th,
                                         quad::GridScale condition_scale = quad::GridScale::Linear,
                                         const quad::QuadSettings& settings = {});

struct TracePoint {
  double s_th;
  double pfa;
  double pod;
};

// Operating points for n thresholds across `bracket`, sorted by ascending
// PFA. With a Log scale the thresholds are geometrically spaced.
std::vector<TracePoint> roc_curve_trace(const RocModel& roc, int n, Interval bracket,
                                        quad::GridScale scale = quad::GridScale::Linear);

struct RocIndices {
  double auc = 0.0;
  double youden_j = 0.0;
  double youden_s_th = 0.0;
  double corner_distance = 0.0;
  double corner_s_th = 0.0;
};

// AUC (trapezoid over the trace, closed with the (0,0) and (1,1) corners),
// Youden point (max pod - pfa) and closest-to-corner point, both refined
// beyond the trace grid.
RocIndices roc_indices(const RocModel& roc, int n, Interval bracket,
                       quad::GridScale scale = quad::GridScale::Linear);

// CSV exports: header "s_th,pfa,pod" / "x,pod", 12 significant digits,
// written atomically.
void write_roc_trace_csv(const std::filesystem::path& path,
                         const std::vector<TracePoint>& trace);
void write_pod_curve_csv(const std::filesystem::path& path, const PodCurve& curve,
                         const std::vector<double>& x_grid);

}  // namespace ndevoi::model
