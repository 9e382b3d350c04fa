#include "ndevoi/nde_models.hpp"

#include <algorithm>
#include <cmath>

#include "ndevoi/csv.hpp"
#include "ndevoi/errors.hpp"
#include "ndevoi/parallel.hpp"

namespace ndevoi::model {

namespace {

constexpr double kDesignMassFloor = 1e-12;

// Signal window: envelope of the conditional signal distributions across a
// quantile spread of the condition distribution. Raw quantiles alone are not
// enough: the class conditioned on the thin side of x_th renormalizes by a
// mass that can be as small as kDesignMassFloor, so its quantiles sit far
// beyond the raw ones. Probing each side of x_th in within-class mass keeps
// the envelope covering all but ~1e-10 of either class density.
Interval signal_envelope(const BaseModel& base, const dist::ContinuousDistribution& weight,
                         double x_th) {
  static const double qs[] = {1e-10, 1e-6, 1e-3, 0.01, 0.05, 0.25, 0.5,
                              0.75,  0.95, 0.99, 1.0 - 1e-3, 1.0 - 1e-6, 1.0 - 1e-10};
  static const double class_qs[] = {1e-10, 1e-6, 1e-3, 0.05, 0.5, 0.95};
  Interval env{Interval::inf, -Interval::inf};
  auto absorb = [&](double x) {
    if (!std::isfinite(x) || !base.condition_support.contains(x)) return;
    const Interval w = base.signal_given_condition(x).plausible_interval(1e-13);
    env.lo = std::min(env.lo, w.lo);
    env.hi = std::max(env.hi, w.hi);
  };
  for (double q : qs) absorb(weight.quantile(q));
  const double below = weight.cdf(x_th);
  const double above = 1.0 - below;
  for (double q : class_qs) {
    if (below > 0.0) absorb(weight.quantile(below * q));
    if (above > 0.0) absorb(weight.upper_quantile(above * q));
  }
  absorb(x_th);
  return env.clipped_to(base.signal_support);
}

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

double safe_log(double v) {
  // Floors log(0) so sign-based margin scans stay finite.
  if (v <= 0.0) return -1e6;
  return std::log(v);
}

quad::GridScale auto_signal_scale(const Interval& window) {
  if (window.lo > 0.0 && window.hi / window.lo > 100.0) return quad::GridScale::Log;
  return quad::GridScale::Linear;
}

}  // namespace

PodCurve pod_curve_from_base(const BaseModel& base, double s_th,
                             SignalOrientation orientation) {
  if (!base.signal_support.contains(s_th))
    throw ConfigError("signal threshold outside the signal support");
  auto model = base.signal_given_condition;
  std::function<double(double)> pod;
  if (orientation == SignalOrientation::SignalAbove) {
    pod = [model, s_th](double x) { return 1.0 - model(x).cdf(s_th); };
  } else {
    pod = [model, s_th](double x) { return model(x).cdf(s_th); };
  }
  return {std::move(pod), s_th, orientation, Provenance::DerivedFromBase};
}

RocModel roc_from_base(const BaseModel& base, double x_th,
                       const dist::ContinuousDistribution& design,
                       const dist::ContinuousDistribution& application_prior,
                       SignalOrientation orientation, quad::GridScale condition_scale,
                       const quad::QuadSettings& settings, std::string design_name) {
  const double mass_above = 1.0 - design.cdf(x_th);
  const double mass_below = design.cdf(x_th);
  if (mass_above < kDesignMassFloor || mass_below < kDesignMassFloor) {
    throw DegenerateDesign("design '" + design_name + "' leaves mass " +
                           std::to_string(std::min(mass_above, mass_below)) +
                           " on one side of x_th = " + std::to_string(x_th));
  }

  // Each class window is cut in within-class mass. Cutting at the raw 1e-13
  // quantiles instead would truncate up to 1e-13 / mass of a thin class.
  const Interval above =
      Interval{x_th, design.upper_quantile(mass_above * 1e-13)}.clipped_to(base.condition_support);
  const Interval below =
      Interval{design.quantile(mass_below * 1e-13), x_th}.clipped_to(base.condition_support);

  auto model = base.signal_given_condition;

  auto make_lik = [=](Interval xr, double mass) {
    return [=](double s) {
      auto f = [&](double x) { return model(x).pdf(s) * design.pdf(x); };
      return quad::integrate_window(f, xr, condition_scale, {}, settings).value / mass;
    };
  };
  auto make_mass = [=](Interval xr, double mass) {
    return [=](double s_th) {
      auto f = [&](double x) {
        const double cdf = model(x).cdf(s_th);
        const double detect = orientation == SignalOrientation::SignalAbove ? 1.0 - cdf : cdf;
        return detect * design.pdf(x);
      };
      return clamp01(quad::integrate_window(f, xr, condition_scale, {}, settings).value / mass);
    };
  };

  RocModel roc;
  roc.lik_y1 = make_lik(above, mass_above);
  roc.lik_y0 = make_lik(below, mass_below);
  roc.log_lik_y1 = [lik = roc.lik_y1](double s) { return safe_log(lik(s)); };
  roc.log_lik_y0 = [lik = roc.lik_y0](double s) { return safe_log(lik(s)); };
  roc.detect_mass_y1 = make_mass(above, mass_above);
  roc.detect_mass_y0 = make_mass(below, mass_below);
  roc.prior_y1 = 1.0 - application_prior.cdf(x_th);
  roc.orientation = orientation;
  roc.signal_window = signal_envelope(base, design, x_th);
  roc.signal_scale = auto_signal_scale(roc.signal_window);
  roc.provenance = Provenance::DerivedFromBase;
  roc.x_th = x_th;
  roc.design_name = std::move(design_name);
  roc.design_matches_application = design == application_prior;
  return roc;
}

RocModel roc_from_distributions(const dist::ContinuousDistribution& lik_y0,
                                const dist::ContinuousDistribution& lik_y1,
                                double prior_y1, SignalOrientation orientation) {
  if (!(prior_y1 >= 0.0 && prior_y1 <= 1.0)) {
    throw ConfigError("prior_y1 must lie in [0, 1]");
  }
  RocModel roc;
  roc.lik_y0 = [lik_y0](double s) { return lik_y0.pdf(s); };
  roc.lik_y1 = [lik_y1](double s) { return lik_y1.pdf(s); };
  roc.log_lik_y0 = [lik_y0](double s) { return lik_y0.log_pdf(s); };
  roc.log_lik_y1 = [lik_y1](double s) { return lik_y1.log_pdf(s); };
  if (orientation == SignalOrientation::SignalAbove) {
    roc.detect_mass_y0 = [lik_y0](double t) { return 1.0 - lik_y0.cdf(t); };
    roc.detect_mass_y1 = [lik_y1](double t) { return 1.0 - lik_y1.cdf(t); };
  } else {
    roc.detect_mass_y0 = [lik_y0](double t) { return lik_y0.cdf(t); };
    roc.detect_mass_y1 = [lik_y1](double t) { return lik_y1.cdf(t); };
  }
  roc.prior_y1 = prior_y1;
  roc.orientation = orientation;
  const Interval w0 = lik_y0.plausible_interval(1e-12);
  const Interval w1 = lik_y1.plausible_interval(1e-12);
  roc.signal_window = {std::min(w0.lo, w1.lo), std::max(w0.hi, w1.hi)};
  roc.signal_scale = auto_signal_scale(roc.signal_window);
  roc.provenance = Provenance::Given;
  return roc;
}

ConfusionMatrix roc_point(const RocModel& roc, double s_th,
                          const quad::QuadSettings& settings) {
  const Interval w = roc.signal_window;
  Interval side;
  if (roc.orientation == SignalOrientation::SignalAbove) {
    side = {std::max(s_th, w.lo), w.hi};
  } else {
    side = {w.lo, std::min(s_th, w.hi)};
  }
  ConfusionMatrix cm;
  cm.orientation = roc.orientation;
  if (side.lo >= side.hi) {
    cm.pod = cm.pfa = 0.0;
    return cm;
  }
  if (roc.signal_scale == quad::GridScale::Log && side.lo <= 0.0) {
    side.lo = w.lo;
  }
  cm.pod = clamp01(quad::integrate_window(roc.lik_y1, side, roc.signal_scale, {}, settings).value);
  cm.pfa = clamp01(quad::integrate_window(roc.lik_y0, side, roc.signal_scale, {}, settings).value);
  return cm;
}

ConfusionMatrix operating_point(const RocModel& roc, double s_th) {
  return {clamp01(roc.detect_mass_y1(s_th)), clamp01(roc.detect_mass_y0(s_th)),
          roc.orientation};
}

ConfusionMatrix confusion_from_pod_curve(const PodCurve& curve,
                                         const dist::ContinuousDistribution& prior,
                                         double x_th, quad::GridScale condition_scale,
                                         const quad::QuadSettings& settings) {
  const double mass_above = 1.0 - prior.cdf(x_th);
  const double mass_below = prior.cdf(x_th);
  if (mass_above < kDesignMassFloor || mass_below < kDesignMassFloor) {
    throw DegenerateDesign("prior leaves mass " +
                           std::to_string(std::min(mass_above, mass_below)) +
                           " on one side of x_th = " + std::to_string(x_th));
  }
  const Interval xw = prior.plausible_interval(1e-13).clipped_to(prior.support());
  auto f = [&](double x) { return curve.pod(x) * prior.pdf(x); };
  const double above =
      quad::integrate_window(f, {std::max(x_th, xw.lo), xw.hi}, condition_scale, {}, settings)
          .value;
  const double below =
      quad::integrate_window(f, {xw.lo, std::min(x_th, xw.hi)}, condition_scale, {}, settings)
          .value;
  return {clamp01(above / mass_above), clamp01(below / mass_below), curve.orientation};
}

std::vector<TracePoint> roc_curve_trace(const RocModel& roc, int n, Interval bracket,
                                        quad::GridScale scale) {
  if (n < 2) throw ConfigError("trace needs at least 2 thresholds");
  std::vector<double> ts(static_cast<std::size_t>(n));
  if (scale == quad::GridScale::Log) {
    if (!(bracket.lo > 0.0)) throw ConfigError("log-scale trace requires positive bracket");
    const double llo = std::log(bracket.lo), lhi = std::log(bracket.hi);
    for (int i = 0; i < n; ++i) ts[i] = std::exp(llo + (lhi - llo) * i / (n - 1));
  } else {
    for (int i = 0; i < n; ++i) ts[i] = bracket.lo + (bracket.hi - bracket.lo) * i / (n - 1);
  }

  std::vector<TracePoint> trace(ts.size());
  parallel_for(ts.size(), [&](std::size_t i) {
    const ConfusionMatrix cm = operating_point(roc, ts[i]);
    trace[i] = {ts[i], cm.pfa, cm.pod};
  });
  std::sort(trace.begin(), trace.end(), [](const TracePoint& a, const TracePoint& b) {
    if (a.pfa != b.pfa) return a.pfa < b.pfa;
    if (a.pod != b.pod) return a.pod < b.pod;
    return a.s_th < b.s_th;
  });
  return trace;
}

RocIndices roc_indices(const RocModel& roc, int n, Interval bracket,
                       quad::GridScale scale) {
  const std::vector<TracePoint> trace = roc_curve_trace(roc, n, bracket, scale);

  RocIndices idx;
  double prev_pfa = 0.0, prev_pod = 0.0;
  for (const TracePoint& p : trace) {
    idx.auc += (p.pfa - prev_pfa) * 0.5 * (p.pod + prev_pod);
    prev_pfa = p.pfa;
    prev_pod = p.pod;
  }
  idx.auc += (1.0 - prev_pfa) * 0.5 * (1.0 + prev_pod);

  quad::MinimizeSettings ms;
  ms.grid_points = std::max(n, 65);
  ms.scale = scale;
  ms.abs_tol = 1e-10;
  const auto yr = quad::minimize_scalar(
      [&](double t) {
        const ConfusionMatrix cm = operating_point(roc, t);
        return cm.pfa - cm.pod;
      },
      bracket.lo, bracket.hi, ms);
  idx.youden_s_th = yr.argmin;
  idx.youden_j = -yr.min;

  const auto cr = quad::minimize_scalar(
      [&](double t) {
        const ConfusionMatrix cm = operating_point(roc, t);
        return std::hypot(cm.pfa, 1.0 - cm.pod);
      },
      bracket.lo, bracket.hi, ms);
  idx.corner_s_th = cr.argmin;
  idx.corner_distance = cr.min;
  return idx;
}

void write_roc_trace_csv(const std::filesystem::path& path,
                         const std::vector<TracePoint>& trace) {
  csv::Table t;
  t.header = {"s_th", "pfa", "pod"};
  t.rows.reserve(trace.size());
  for (const TracePoint& p : trace) {
    t.rows.push_back({csv::format_sig12(p.s_th), csv::format_sig12(p.pfa),
                      csv::format_sig12(p.pod)});
  }
  csv::write_atomic(path, csv::render(t));
}

void write_pod_curve_csv(const std::filesystem::path& path, const PodCurve& curve,
                         const std::vector<double>& x_grid) {
  csv::Table t;
  t.header = {"x", "pod"};
  t.rows.reserve(x_grid.size());
  for (double x : x_grid) {
    t.rows.push_back({csv::format_sig12(x), csv::format_sig12(curve.pod(x))});
  }
  csv::write_atomic(path, csv::render(t));
}

}  // namespace ndevoi::model
