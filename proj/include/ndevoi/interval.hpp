#pragma once

#include <cmath>
#include <limits>

namespace ndevoi {

// Interval on the extended real line. Endpoints may be +/-infinity.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static constexpr double inf = std::numeric_limits<double>::infinity();

  static Interval whole() { return {-inf, inf}; }
  static Interval at_least(double a) { return {a, inf}; }
  static Interval at_most(double b) { return {-inf, b}; }

  bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
  bool contains(double x) const { return x >= lo && x <= hi; }
  double width() const { return hi - lo; }

  Interval clipped_to(const Interval& other) const {
    return {lo > other.lo ? lo : other.lo, hi < other.hi ? hi : other.hi};
  }
};

}  // namespace ndevoi
