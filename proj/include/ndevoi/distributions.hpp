#pragma once

#include <string>

#include "ndevoi/interval.hpp"

namespace ndevoi::dist {

enum class Kind { Exponential, Lognormal, Normal, Uniform };

// Standard normal cdf and its inverse, accurate to ~1e-15.
double std_normal_cdf(double z);
double std_normal_quantile(double p);

// Immutable univariate continuous distribution. The two parameter slots hold:
//   Exponential: a = mean
//   Lognormal:   a = mu_log,  b = sigma_log   (of ln X)
//   Normal:      a = mu,      b = sigma
//   Uniform:     a = lo,      b = hi
class ContinuousDistribution {
 public:
  static ContinuousDistribution exponential(double mean);
  static ContinuousDistribution lognormal(double mu_log, double sigma_log);
  static ContinuousDistribution normal(double mu, double sigma);
  static ContinuousDistribution uniform(double lo, double hi);

  double pdf(double x) const;

  // ln pdf(x); -inf outside the support. Stays accurate where pdf underflows.
  double log_pdf(double x) const;

  double cdf(double x) const;

  // Inverse cdf. p = 0 and p = 1 return the support endpoints.
  double quantile(double p) const;

  // x with probability q above it. Equals quantile(1 - q) but is computed in
  // the tail domain, so it stays exact for q far below the 1 - q resolution
  // of double (quantile(1 - 1e-20) would collapse to quantile(1)).
  double upper_quantile(double q) const;

  Interval support() const;

  // [quantile(tail), quantile(1 - tail)]: finite window holding all but
  // 2*tail of the probability mass. Used to bound numeric integrals.
  Interval plausible_interval(double tail = 1e-12) const;

  double mean() const;

  Kind kind() const { return kind_; }
  double param_a() const { return a_; }
  double param_b() const { return b_; }

  bool operator==(const ContinuousDistribution& o) const = default;

 private:
  ContinuousDistribution(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  Kind kind_;
  double a_;
  double b_;
};

std::string kind_name(Kind k);
Kind kind_from_name(const std::string& name);

}  // namespace ndevoi::dist
