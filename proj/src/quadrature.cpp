#include "ndevoi/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>

#include "ndevoi/errors.hpp"

namespace ndevoi::quad {

namespace {

std::string short_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

// 15-point Kronrod extension of the 7-point Gauss rule (positive abscissae).
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Segment {
  double a, b;
  double value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

[[noreturn]] void throw_non_finite(double x) {
  throw NonFiniteIntegrand("integrand is not finite at x = " + short_num(x));
}

Segment gauss_kronrod_15(const Fn& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);

  double fv[15];
  const double fc = f(c);
  if (!std::isfinite(fc)) throw_non_finite(c);
  fv[7] = fc;
  for (int j = 0; j < 7; ++j) {
    const double x1 = c - h * kXgk[j];
    const double x2 = c + h * kXgk[j];
    fv[j] = f(x1);
    fv[14 - j] = f(x2);
    if (!std::isfinite(fv[j])) throw_non_finite(x1);
    if (!std::isfinite(fv[14 - j])) throw_non_finite(x2);
  }

  double resk = kWgk[7] * fc;
  double resabs = kWgk[7] * std::fabs(fc);
  double resg = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double sum = fv[j] + fv[14 - j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::fabs(fv[j]) + std::fabs(fv[14 - j]));
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }

  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::fabs(fc - reskh);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::fabs(fv[j] - reskh) + std::fabs(fv[14 - j] - reskh));
  }

  const double value = resk * h;
  double err = std::fabs((resk - resg) * h);
  resasc *= std::fabs(h);
  resabs *= std::fabs(h);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(err, 50.0 * eps * resabs);
  }
  return {a, b, value, err};
}

// Maps an arbitrary (possibly infinite) domain onto a finite parameter range.
struct MappedIntegrand {
  Fn g;
  double t_lo, t_hi;
};

MappedIntegrand map_domain(const Fn& f, Interval domain) {
  const bool lo_inf = std::isinf(domain.lo);
  const bool hi_inf = std::isinf(domain.hi);
  if (!lo_inf && !hi_inf) {
    return {f, domain.lo, domain.hi};
  }
  if (lo_inf && hi_inf) {
    // x = t / (1 - t^2), t in (-1, 1)
    Fn g = [f](double t) {
      const double d = 1.0 - t * t;
      const double x = t / d;
      if (!std::isfinite(x)) return 0.0;
      const double jac = (1.0 + t * t) / (d * d);
      const double v = f(x);
      if (v == 0.0) return 0.0;
      return v * jac;
    };
    return {std::move(g), -1.0, 1.0};
  }
  if (!lo_inf) {
    // x = a + t / (1 - t), t in [0, 1)
    const double a = domain.lo;
    Fn g = [f, a](double t) {
      const double d = 1.0 - t;
      const double x = a + t / d;
      if (!std::isfinite(x)) return 0.0;
      const double v = f(x);
      if (v == 0.0) return 0.0;
      return v / (d * d);
    };
    return {std::move(g), 0.0, 1.0};
  }
  // x = b - t / (1 - t), t in [0, 1)
  const double b = domain.hi;
  Fn g = [f, b](double t) {
    const double d = 1.0 - t;
    const double x = b - t / d;
    if (!std::isfinite(x)) return 0.0;
    const double v = f(x);
    if (v == 0.0) return 0.0;
    return v / (d * d);
  };
  return {std::move(g), 0.0, 1.0};
}

}  // namespace

QuadResult integrate(const Fn& f, Interval domain, const QuadSettings& settings) {
  if (domain.lo == domain.hi) return {0.0, 0.0, 0};
  if (domain.lo > domain.hi) {
    QuadResult r = integrate(f, {domain.hi, domain.lo}, settings);
    r.value = -r.value;
    return r;
  }

  MappedIntegrand m = map_domain(f, domain);
  const int init = std::max(1, settings.initial_subdivisions);

  std::priority_queue<Segment> segments;
  double total = 0.0;
  double total_err = 0.0;
  for (int i = 0; i < init; ++i) {
    const double a = m.t_lo + (m.t_hi - m.t_lo) * i / init;
    const double b = m.t_lo + (m.t_hi - m.t_lo) * (i + 1) / init;
    Segment s = gauss_kronrod_15(m.g, a, b);
    total += s.value;
    total_err += s.error;
    segments.push(s);
  }

  int subdivisions = init;
  const double eps = std::numeric_limits<double>::epsilon();
  auto tolerance = [&] { return std::max(settings.abs_tol, settings.rel_tol * std::fabs(total)); };

  while (total_err > tolerance() && subdivisions < settings.max_subdivisions) {
    Segment worst = segments.top();
    const double mid = 0.5 * (worst.a + worst.b);
    // A segment narrower than a few ulps can no longer be split meaningfully.
    if (mid <= worst.a || mid >= worst.b ||
        worst.b - worst.a < 64.0 * eps * std::max(std::fabs(worst.a), std::fabs(worst.b))) {
      break;
    }
    segments.pop();
    Segment left = gauss_kronrod_15(m.g, worst.a, mid);
    Segment right = gauss_kronrod_15(m.g, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    segments.push(left);
    segments.push(right);
    ++subdivisions;
  }

  if (total_err > tolerance()) {
    throw NonConvergence("integration error estimate " + short_num(total_err) +
                         " above tolerance " + short_num(tolerance()) + " after " +
                         std::to_string(subdivisions) + " subdivisions");
  }
  return {total, total_err, subdivisions};
}

QuadResult integrate_segmented(const Fn& f, Interval domain,
                               const std::vector<double>& breakpoints,
                               const QuadSettings& settings) {
  std::vector<double> cuts;
  for (double b : breakpoints) {
    if (b > domain.lo && b < domain.hi) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  QuadResult out;
  double prev = domain.lo;
  for (double c : cuts) {
    QuadResult r = integrate(f, {prev, c}, settings);
    out.value += r.value;
    out.error_estimate += r.error_estimate;
    out.subdivisions += r.subdivisions;
    prev = c;
  }
  QuadResult r = integrate(f, {prev, domain.hi}, settings);
  out.value += r.value;
  out.error_estimate += r.error_estimate;
  out.subdivisions += r.subdivisions;
  return out;
}

QuadResult integrate_window(const Fn& f, Interval window, GridScale scale,
                            const std::vector<double>& breakpoints,
                            const QuadSettings& settings) {
  if (scale == GridScale::Linear) {
    return integrate_segmented(f, window, breakpoints, settings);
  }
  if (!(window.lo > 0.0)) {
    throw NonFiniteObjective("log-scale integration requires a positive lower bound");
  }
  Fn g = [&f](double u) {
    const double x = std::exp(u);
    if (!std::isfinite(x)) return 0.0;
    const double v = f(x);
    if (v == 0.0) return 0.0;
    return v * x;
  };
  std::vector<double> log_breaks;
  log_breaks.reserve(breakpoints.size());
  for (double b : breakpoints) {
    if (b > 0.0) log_breaks.push_back(std::log(b));
  }
  return integrate_segmented(g, {std::log(window.lo), std::log(window.hi)}, log_breaks,
                             settings);
}

namespace {

double check_finite_objective(const Fn& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    throw NonFiniteObjective("objective is not finite at x = " + std::to_string(x));
  }
  return v;
}

std::vector<double> make_grid(double lo, double hi, int n, GridScale scale) {
  if (n < 2) throw NonFiniteObjective("grid needs at least 2 points");
  if (scale == GridScale::Log && lo <= 0.0) {
    throw NonFiniteObjective("log-scale grid requires a positive lower bound");
  }
  std::vector<double> g(static_cast<std::size_t>(n));
  if (scale == GridScale::Linear) {
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  } else {
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i) g[i] = std::exp(llo + (lhi - llo) * i / (n - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

}  // namespace

MinimizeResult minimize_scalar(const Fn& f, double lo, double hi,
                               const MinimizeSettings& settings) {
  if (!(lo < hi)) throw NonFiniteObjective("minimize_scalar requires lo < hi");
  const std::vector<double> grid = make_grid(lo, hi, settings.grid_points, settings.scale);

  std::size_t best = 0;
  std::vector<double> fv(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    fv[i] = check_finite_objective(f, grid[i]);
    if (fv[i] < fv[best]) best = i;
  }

  double a = grid[best == 0 ? 0 : best - 1];
  double b = grid[best + 1 >= grid.size() ? grid.size() - 1 : best + 1];
  double best_x = grid[best];
  double best_f = fv[best];

  // Golden-section on the bracket around the best grid point.
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = check_finite_objective(f, x1);
  double f2 = check_finite_objective(f, x2);
  for (int iter = 0; iter < 200; ++iter) {
    if (f1 < best_f) { best_f = f1; best_x = x1; }
    if (f2 < best_f) { best_f = f2; best_x = x2; }
    if (b - a < settings.rel_tol * std::fabs(best_x) + settings.abs_tol) break;
    if (f1 < f2) {
      b = x2;
      x2 = x1; f2 = f1;
      x1 = b - phi * (b - a);
      f1 = check_finite_objective(f, x1);
    } else {
      a = x1;
      x1 = x2; f1 = f2;
      x2 = a + phi * (b - a);
      f2 = check_finite_objective(f, x2);
    }
  }
  return {best_x, best_f};
}

std::vector<double> find_roots(const Fn& f, double lo, double hi,
                               const RootSettings& settings) {
  if (!(lo < hi)) throw NonFiniteObjective("find_roots requires lo < hi");
  const std::vector<double> grid = make_grid(lo, hi, settings.grid_points, settings.scale);

  std::vector<double> fv(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) fv[i] = check_finite_objective(f, grid[i]);

  auto width_tol = [&](double x) { return settings.rel_tol * std::fabs(x) + settings.abs_tol; };

  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (fv[i] == 0.0) {
      roots.push_back(grid[i]);
      continue;
    }
    if (fv[i] * fv[i + 1] < 0.0) {
      double a = grid[i], b = grid[i + 1];
      double fa = fv[i];
      for (int iter = 0; iter < 200 && b - a > width_tol(0.5 * (a + b)); ++iter) {
        const double m = 0.5 * (a + b);
        const double fm = check_finite_objective(f, m);
        if (fm == 0.0) { a = b = m; break; }
        if (fa * fm < 0.0) {
          b = m;
        } else {
          a = m;
          fa = fm;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
  }
  if (!fv.empty() && fv.back() == 0.0) roots.push_back(grid.back());

  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots) {
    if (out.empty() || r - out.back() > 4.0 * width_tol(r)) out.push_back(r);
  }
  return out;
}

}  // namespace ndevoi::quad
