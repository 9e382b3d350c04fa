#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ndevoi/decision.hpp"
#include "ndevoi/two_step.hpp"

namespace ndevoi::scenario {

// ---- NDE model specifications (data, not closures, so configs round-trip) ----

// Conditional signal model: S | X = x is lognormal with a fixed log-scale
// sigma and a median given by a polynomial in x (coefficients low-to-high).
struct BaseLognormalPoly {
  std::vector<double> median_poly;
  double sigma_log = 1.0;
  Interval condition_support = Interval::at_least(0.0);
  Interval signal_support = Interval::at_least(0.0);
};

// Conditional signal densities for the two condition classes, given directly.
struct SignalClassDensities {
  dist::ContinuousDistribution lik_y0;
  dist::ContinuousDistribution lik_y1;
};

struct OperatingPointSpec {
  double pod = 0.0;
  double pfa = 0.0;
};

using NdeSpec = std::variant<BaseLognormalPoly, SignalClassDensities, OperatingPointSpec>;

// ---- failure model specifications ----

// Pr(fail | x, keep) = floor + (1 - floor) * Phi(ln x - shift); repairing
// leaves the constant probability p_repair.
struct FailureFloorNormCdfLog {
  double floor = 0.0;
  double shift = 0.0;
  double p_repair = 0.0;
};

struct FailureBinaryTable {
  double p[2][2] = {{0.0, 0.0}, {0.0, 0.0}};  // [state][action]
};

using FailureSpec = std::variant<FailureFloorNormCdfLog, FailureBinaryTable>;

struct TwoStepSpec {
  double prior_y1 = 0.0;
  double pr_bad_after_bad = 1.0;   // transition[1][1]
  double pr_bad_after_good = 0.0;  // transition[1][0]
  double c_repair[2] = {0.0, 0.0};
  double c_failure[2] = {0.0, 0.0};
  int belief_grid = 2049;
  double reference_pod = 0.0;  // operating point studied in the write-up
  double reference_pfa = 0.0;
  double memoryless_s_th = std::numeric_limits<double>::quiet_NaN();
};

struct ScenarioConfig {
  std::string name;
  std::string signal_unit = "au";     // token appended to signal-valued field names
  std::string condition_unit = "au";  // same for condition-valued fields
  std::string money_label;            // display label for costs, e.g. "MEUR"
  model::SignalOrientation orientation = model::SignalOrientation::SignalAbove;
  std::variant<dist::ContinuousDistribution, double> condition_prior{0.0};
  NdeSpec nde{OperatingPointSpec{}};
  FailureSpec failure{FailureBinaryTable{}};
  double c_repair = 0.0;
  double c_failure = 0.0;
  double nde_cost = 0.0;
  double x_th = std::numeric_limits<double>::quiet_NaN();
  double s_th_fixed = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::pair<std::string, dist::ContinuousDistribution>> designs;
  decide::NumericProfile num;
  std::optional<TwoStepSpec> two_step;
};

// Built-in scenario constants. Throws UnknownScenario.
ScenarioConfig builtin(const std::string& name);
std::vector<std::string> builtin_names();

// JSON round-trip. Dimensioned field names carry a unit suffix (c_R_money,
// s_th_fixed_volt, mean_au, ...) resolved through the units block.
ScenarioConfig parse(const std::string& json_text);
std::string serialize(const ScenarioConfig& cfg);
ScenarioConfig load(const std::filesystem::path& path);
void save(const ScenarioConfig& cfg, const std::filesystem::path& path);

// ---- assembly into solvable problems ----

enum class ModelFamily { FullSignal, DetectionCurve, SignalClasses, OperatingPoint };

const char* family_name(ModelFamily f);
ModelFamily family_from_name(const std::string& name);  // throws ConfigError
ModelFamily default_family(const ScenarioConfig& cfg);

// NaN means "use the scenario value".
struct Overrides {
  double x_th = std::numeric_limits<double>::quiet_NaN();
  double s_th = std::numeric_limits<double>::quiet_NaN();
};

model::BaseModel make_base(const ScenarioConfig& cfg);
decide::FailureModel make_failure(const ScenarioConfig& cfg);
model::RocModel make_roc(const ScenarioConfig& cfg, const Overrides& ov = {});

decide::OneStepProblem one_step_problem(const ScenarioConfig& cfg, ModelFamily family,
                                        const Overrides& ov = {});
seq::TwoStepProblem two_step_problem(const ScenarioConfig& cfg);

std::vector<decide::DesignEntry> design_entries(const ScenarioConfig& cfg);

}  // namespace ndevoi::scenario
