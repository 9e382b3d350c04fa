#include "ndevoi/distributions.hpp"

#include <cmath>

#include "ndevoi/errors.hpp"

namespace ndevoi::dist {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

// Acklam's rational approximation for the standard normal quantile,
// polished with one Halley step against the erfc-based cdf.
double acklam_quantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement.
  const double e = std_normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

}  // namespace

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double std_normal_quantile(double p) {
  if (p <= 0.0) return -Interval::inf;
  if (p >= 1.0) return Interval::inf;
  return acklam_quantile(p);
}

ContinuousDistribution ContinuousDistribution::exponential(double mean) {
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw ConfigError("exponential mean must be positive and finite");
  }
  return {Kind::Exponential, mean, 0.0};
}

ContinuousDistribution ContinuousDistribution::lognormal(double mu_log, double sigma_log) {
  if (!std::isfinite(mu_log) || !(sigma_log > 0.0) || !std::isfinite(sigma_log)) {
    throw ConfigError("lognormal requires finite mu_log and positive sigma_log");
  }
  return {Kind::Lognormal, mu_log, sigma_log};
}

ContinuousDistribution ContinuousDistribution::normal(double mu, double sigma) {
  if (!std::isfinite(mu) || !(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("normal requires finite mu and positive sigma");
  }
  return {Kind::Normal, mu, sigma};
}

ContinuousDistribution ContinuousDistribution::uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw ConfigError("uniform requires finite bounds with lo < hi");
  }
  return {Kind::Uniform, lo, hi};
}

double ContinuousDistribution::pdf(double x) const {
  switch (kind_) {
    case Kind::Exponential:
      if (x < 0.0) return 0.0;
      return std::exp(-x / a_) / a_;
    case Kind::Lognormal: {
      if (x <= 0.0) return 0.0;
      const double lx = std::log(x);
      const double z = (lx - a_) / b_;
      const double e = -0.5 * z * z - lx;
      if (e < -745.0) return 0.0;
      return kInvSqrt2Pi / b_ * std::exp(e);
    }
    case Kind::Normal: {
      const double z = (x - a_) / b_;
      const double e = -0.5 * z * z;
      if (e < -745.0) return 0.0;
      return kInvSqrt2Pi / b_ * std::exp(e);
    }
    case Kind::Uniform:
      if (x < a_ || x > b_) return 0.0;
      return 1.0 / (b_ - a_);
  }
  return 0.0;
}

double ContinuousDistribution::log_pdf(double x) const {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  constexpr double kLogInvSqrt2Pi = -0.9189385332046727418;
  switch (kind_) {
    case Kind::Exponential:
      if (x < 0.0) return kNegInf;
      return -x / a_ - std::log(a_);
    case Kind::Lognormal: {
      if (x <= 0.0) return kNegInf;
      const double lx = std::log(x);
      const double z = (lx - a_) / b_;
      return kLogInvSqrt2Pi - std::log(b_) - 0.5 * z * z - lx;
    }
    case Kind::Normal: {
      const double z = (x - a_) / b_;
      return kLogInvSqrt2Pi - std::log(b_) - 0.5 * z * z;
    }
    case Kind::Uniform:
      if (x < a_ || x > b_) return kNegInf;
      return -std::log(b_ - a_);
  }
  return kNegInf;
}

double ContinuousDistribution::cdf(double x) const {
  switch (kind_) {
    case Kind::Exponential:
      if (x <= 0.0) return 0.0;
      return -std::expm1(-x / a_);
    case Kind::Lognormal:
      if (x <= 0.0) return 0.0;
      return std_normal_cdf((std::log(x) - a_) / b_);
    case Kind::Normal:
      return std_normal_cdf((x - a_) / b_);
    case Kind::Uniform:
      if (x <= a_) return 0.0;
      if (x >= b_) return 1.0;
      return (x - a_) / (b_ - a_);
  }
  return 0.0;
}

double ContinuousDistribution::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("quantile argument must lie in [0, 1]");
  if (p == 0.0) return support().lo;
  if (p == 1.0) return support().hi;
  switch (kind_) {
    case Kind::Exponential:
      return -a_ * std::log1p(-p);
    case Kind::Lognormal:
      return std::exp(a_ + b_ * std_normal_quantile(p));
    case Kind::Normal:
      return a_ + b_ * std_normal_quantile(p);
    case Kind::Uniform:
      return a_ + p * (b_ - a_);
  }
  return 0.0;
}

double ContinuousDistribution::upper_quantile(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("upper_quantile argument must lie in [0, 1]");
  if (q == 0.0) return support().hi;
  if (q == 1.0) return support().lo;
  switch (kind_) {
    case Kind::Exponential:
      return -a_ * std::log(q);
    case Kind::Lognormal:
      // std_normal_quantile(1 - q) == -std_normal_quantile(q) by symmetry,
      // and the left-tail branch keeps full precision for tiny q.
      return std::exp(a_ - b_ * std_normal_quantile(q));
    case Kind::Normal:
      return a_ - b_ * std_normal_quantile(q);
    case Kind::Uniform:
      return b_ - q * (b_ - a_);
  }
  return 0.0;
}

Interval ContinuousDistribution::support() const {
  switch (kind_) {
    case Kind::Exponential: return {0.0, Interval::inf};
    case Kind::Lognormal: return {0.0, Interval::inf};
    case Kind::Normal: return Interval::whole();
    case Kind::Uniform: return {a_, b_};
  }
  return Interval::whole();
}

Interval ContinuousDistribution::plausible_interval(double tail) const {
  if (kind_ == Kind::Uniform) return {a_, b_};
  return {quantile(tail), quantile(1.0 - tail)};
}

double ContinuousDistribution::mean() const {
  switch (kind_) {
    case Kind::Exponential: return a_;
    case Kind::Lognormal: return std::exp(a_ + 0.5 * b_ * b_);
    case Kind::Normal: return a_;
    case Kind::Uniform: return 0.5 * (a_ + b_);
  }
  return 0.0;
}

std::string kind_name(Kind k) {
  switch (k) {
    case Kind::Exponential: return "exponential";
    case Kind::Lognormal: return "lognormal";
    case Kind::Normal: return "normal";
    case Kind::Uniform: return "uniform";
  }
  return "unknown";
}

Kind kind_from_name(const std::string& name) {
  if (name == "exponential") return Kind::Exponential;
  if (name == "lognormal") return Kind::Lognormal;
  if (name == "normal") return Kind::Normal;
  if (name == "uniform") return Kind::Uniform;
  throw ConfigError("unknown distribution kind: " + name);
}

}  // namespace ndevoi::dist
