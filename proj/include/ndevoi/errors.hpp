#pragma once

#include <stdexcept>
#include <string>

namespace ndevoi {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Adaptive subdivision budget exhausted before reaching the requested tolerance.
struct NonConvergence : Error {
  explicit NonConvergence(const std::string& msg) : Error(msg) {}
};

// Integrand returned NaN or +/-inf at an interior evaluation point.
struct NonFiniteIntegrand : Error {
  explicit NonFiniteIntegrand(const std::string& msg) : Error(msg) {}
};

// Objective returned NaN or +/-inf during minimization or root finding.
struct NonFiniteObjective : Error {
  explicit NonFiniteObjective(const std::string& msg) : Error(msg) {}
};

// Inspection setup leaves (almost) no probability mass on one side of the
// condition threshold, so the conditional signal densities are undefined.
struct DegenerateDesign : Error {
  explicit DegenerateDesign(const std::string& msg) : Error(msg) {}
};

// Marginal likelihood of the observation underflowed; the posterior is
// numerically undefined.
struct ZeroEvidence : Error {
  explicit ZeroEvidence(const std::string& msg) : Error(msg) {}
};

// Invalid or inconsistent configuration value. The message names the field.
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Requested builtin scenario name does not exist.
struct UnknownScenario : Error {
  explicit UnknownScenario(const std::string& msg) : Error(msg) {}
};

}  // namespace ndevoi
