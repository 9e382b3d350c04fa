#pragma once

#include <functional>
#include <vector>

#include "ndevoi/interval.hpp"

namespace ndevoi::quad {

using Fn = std::function<double(double)>;

struct QuadSettings {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;
  // The domain is pre-split into this many equal pieces before adaptation
  // starts, so narrow features inside wide domains are not stepped over.
  int initial_subdivisions = 8;
};

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int subdivisions = 0;
};

// Adaptive Gauss-Kronrod integration of f over `domain`. Infinite endpoints
// are mapped onto a finite parameter range before subdivision. Throws
// NonFiniteIntegrand if f evaluates to NaN/inf, NonConvergence if the
// subdivision budget runs out with the error estimate above
// max(abs_tol, rel_tol * |value|).
QuadResult integrate(const Fn& f, Interval domain, const QuadSettings& settings = {});

// Convenience: integral split at the given interior breakpoints, summed.
QuadResult integrate_segmented(const Fn& f, Interval domain,
                               const std::vector<double>& breakpoints,
                               const QuadSettings& settings = {});

enum class GridScale { Linear, Log };

// Integral over a finite window, optionally in log coordinates (u = ln x,
// window.lo > 0 required), split at the given interior breakpoints. Log
// coordinates keep narrow peaks resolvable inside windows spanning many
// orders of magnitude.
QuadResult integrate_window(const Fn& f, Interval window, GridScale scale,
                            const std::vector<double>& breakpoints = {},
                            const QuadSettings& settings = {});

struct MinimizeSettings {
  int grid_points = 129;
  GridScale scale = GridScale::Linear;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
};

struct MinimizeResult {
  double argmin = 0.0;
  double min = 0.0;
};

// Scans f on a grid over [lo, hi] (linear or log spacing), then refines
// around the best grid point by golden-section search until the bracket
// width falls below rel_tol * |argmin| + abs_tol. The returned minimum
// never exceeds the best value seen on the grid. Throws NonFiniteObjective
// on NaN/inf evaluations.
MinimizeResult minimize_scalar(const Fn& f, double lo, double hi,
                               const MinimizeSettings& settings = {});

struct RootSettings {
  int grid_points = 1024;
  GridScale scale = GridScale::Linear;
  double rel_tol = 1e-12;
  double abs_tol = 1e-12;
};

// All sign changes of f on [lo, hi]: grid scan followed by bisection of each
// bracketing pair. Returns roots in ascending order. Throws
// NonFiniteObjective on NaN/inf evaluations.
std::vector<double> find_roots(const Fn& f, double lo, double hi,
                               const RootSettings& settings = {});

}  // namespace ndevoi::quad
