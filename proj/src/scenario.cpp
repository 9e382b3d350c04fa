#include "ndevoi/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ndevoi/errors.hpp"
#include "vendor/json.hpp"

namespace ndevoi::scenario {

namespace {

using json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double pick(double override_value, double config_value) {
  return std::isfinite(override_value) ? override_value : config_value;
}

std::string suffixed(const std::string& stem, const std::string& unit) {
  return stem + "_" + unit;
}

// ---- json helpers (errors name the offending field) ----

const json& require(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("missing config field '" + key + "'");
  return *it;
}

double require_num(const json& obj, const std::string& key) {
  const json& v = require(obj, key);
  if (!v.is_number()) throw ConfigError("config field '" + key + "' must be a number");
  return v.get<double>();
}

int require_int(const json& obj, const std::string& key) {
  const json& v = require(obj, key);
  if (!v.is_number_integer())
    throw ConfigError("config field '" + key + "' must be an integer");
  return v.get<int>();
}

std::string require_str(const json& obj, const std::string& key) {
  const json& v = require(obj, key);
  if (!v.is_string()) throw ConfigError("config field '" + key + "' must be a string");
  return v.get<std::string>();
}

double require_prob(const json& obj, const std::string& key) {
  double p = require_num(obj, key);
  if (!(p >= 0.0 && p <= 1.0))
    throw ConfigError("config field '" + key + "' must be a probability in [0, 1]");
  return p;
}

// Interval endpoints serialize as numbers, with the strings "inf" / "-inf"
// for unbounded ends (json has no literal for infinities).
json endpoint_to_json(double v) {
  if (v == Interval::inf) return json("inf");
  if (v == -Interval::inf) return json("-inf");
  return json(v);
}

double endpoint_from_json(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf") return Interval::inf;
    if (s == "-inf") return -Interval::inf;
  }
  throw ConfigError("config field '" + key + "' endpoints must be numbers or \"inf\"/\"-inf\"");
}

json interval_to_json(const Interval& iv) {
  return json::array({endpoint_to_json(iv.lo), endpoint_to_json(iv.hi)});
}

Interval interval_from_json(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2)
    throw ConfigError("config field '" + key + "' must be a [lo, hi] pair");
  Interval iv{endpoint_from_json(v[0], key), endpoint_from_json(v[1], key)};
  if (!(iv.lo < iv.hi))
    throw ConfigError("config field '" + key + "' must have lo < hi");
  return iv;
}

const char* scale_name(quad::GridScale s) {
  return s == quad::GridScale::Log ? "log" : "linear";
}

quad::GridScale scale_from_json(const json& obj, const std::string& key) {
  const std::string s = require_str(obj, key);
  if (s == "log") return quad::GridScale::Log;
  if (s == "linear") return quad::GridScale::Linear;
  throw ConfigError("config field '" + key + "' must be \"linear\" or \"log\"");
}

// ---- distributions (parameter names carry the dimension's unit) ----

json dist_to_json(const dist::ContinuousDistribution& d, const std::string& unit) {
  json out;
  out["kind"] = dist::kind_name(d.kind());
  switch (d.kind()) {
    case dist::Kind::Exponential:
      out[suffixed("mean", unit)] = d.param_a();
      break;
    case dist::Kind::Lognormal:
      out["mu_log"] = d.param_a();  // log-space parameters are dimensionless
      out["sigma_log"] = d.param_b();
      break;
    case dist::Kind::Normal:
      out[suffixed("mu", unit)] = d.param_a();
      out[suffixed("sigma", unit)] = d.param_b();
      break;
    case dist::Kind::Uniform:
      out[suffixed("lo", unit)] = d.param_a();
      out[suffixed("hi", unit)] = d.param_b();
      break;
  }
  return out;
}

dist::ContinuousDistribution dist_from_json(const json& obj, const std::string& unit,
                                            const std::string& ctx) {
  if (!obj.is_object()) throw ConfigError("config field '" + ctx + "' must be an object");
  const std::string kind = require_str(obj, "kind");
  if (kind == "exponential")
    return dist::ContinuousDistribution::exponential(require_num(obj, suffixed("mean", unit)));
  if (kind == "lognormal")
    return dist::ContinuousDistribution::lognormal(require_num(obj, "mu_log"),
                                                   require_num(obj, "sigma_log"));
  if (kind == "normal")
    return dist::ContinuousDistribution::normal(require_num(obj, suffixed("mu", unit)),
                                                require_num(obj, suffixed("sigma", unit)));
  if (kind == "uniform")
    return dist::ContinuousDistribution::uniform(require_num(obj, suffixed("lo", unit)),
                                                 require_num(obj, suffixed("hi", unit)));
  throw ConfigError("config field '" + ctx + ".kind': unknown distribution '" + kind + "'");
}

json quad_to_json(const quad::QuadSettings& q) {
  json out;
  out["rel_tol"] = q.rel_tol;
  out["abs_tol"] = q.abs_tol;
  out["max_subdivisions"] = q.max_subdivisions;
  out["initial_subdivisions"] = q.initial_subdivisions;
  return out;
}

quad::QuadSettings quad_from_json(const json& obj, const std::string& ctx) {
  if (!obj.is_object()) throw ConfigError("config field '" + ctx + "' must be an object");
  quad::QuadSettings q;
  q.rel_tol = require_num(obj, "rel_tol");
  q.abs_tol = require_num(obj, "abs_tol");
  q.max_subdivisions = require_int(obj, "max_subdivisions");
  q.initial_subdivisions = require_int(obj, "initial_subdivisions");
  return q;
}

double horner(const std::vector<double>& coeffs, double x) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

}  // namespace

// ---- builtins ----

std::vector<std::string> builtin_names() { return {"hypothetical", "halfcell"}; }

ScenarioConfig builtin(const std::string& name) {
  using D = dist::ContinuousDistribution;
  if (name == "hypothetical") {
    ScenarioConfig cfg;
    cfg.name = "hypothetical";
    cfg.signal_unit = "au";
    cfg.condition_unit = "au";
    cfg.money_label = "";
    cfg.orientation = model::SignalOrientation::SignalAbove;
    cfg.condition_prior = D::exponential(0.03);
    // Median signal 2x^3 + x^2 + 1e-2 * exp(-1/2); the constant keeps the
    // zero-size signal mean at 1e-2.
    cfg.nde = BaseLognormalPoly{
        {1e-2 * std::exp(-0.5), 0.0, 1.0, 2.0}, 1.0,
        Interval::at_least(0.0), Interval::at_least(0.0)};
    cfg.failure = FailureFloorNormCdfLog{1e-5, 0.1, 1e-4};
    cfg.c_repair = 1.0;
    cfg.c_failure = 800.0;
    cfg.nde_cost = 0.0;
    cfg.x_th = 0.1;
    cfg.s_th_fixed = 0.03;
    cfg.designs = {{"ED1", D::exponential(0.03)},
                   {"ED2", D::lognormal(-2.5, 0.5)},
                   {"ED3", D::uniform(0.0, 0.5)}};
    cfg.num.signal_window = Interval{1e-7, 1e4};
    cfg.num.signal_scale = quad::GridScale::Log;
    cfg.num.decision_bracket = Interval{1e-4, 2.0};
    cfg.num.decision_scale = quad::GridScale::Log;
    cfg.num.decision_grid = 2048;
    cfg.num.sweep_bracket = Interval{2e-3, 0.3};
    cfg.num.sweep_scale = quad::GridScale::Log;
    cfg.num.sweep_points = 61;
    cfg.num.quad = {1e-8, 1e-12, 4000, 8};
    cfg.num.inner_quad = {1e-10, 1e-12, 2000, 8};
    return cfg;
  }
  if (name == "halfcell") {
    ScenarioConfig cfg;
    cfg.name = "halfcell";
    cfg.signal_unit = "volt";
    cfg.condition_unit = "state";
    cfg.money_label = "MEUR";
    cfg.orientation = model::SignalOrientation::SignalBelow;
    cfg.condition_prior = 0.05;
    cfg.nde = SignalClassDensities{D::normal(-0.207, 0.0804), D::normal(-0.354, 0.08)};
    FailureBinaryTable fail;
    fail.p[0][0] = 0.0;
    fail.p[0][1] = 0.0;
    fail.p[1][0] = 1.0;  // a bad state left in place fails for certain
    fail.p[1][1] = 0.0;
    cfg.failure = fail;
    cfg.c_repair = 5.0;
    cfg.c_failure = 50.0;
    cfg.nde_cost = 0.0;
    cfg.s_th_fixed = -0.2515;
    cfg.num.signal_window = Interval{-1.2, 0.45};
    cfg.num.signal_scale = quad::GridScale::Linear;
    cfg.num.decision_bracket = Interval{-40.0, 0.5};
    cfg.num.decision_scale = quad::GridScale::Linear;
    cfg.num.decision_grid = 4096;
    cfg.num.sweep_bracket = Interval{-0.8, 0.1};
    cfg.num.sweep_scale = quad::GridScale::Linear;
    cfg.num.sweep_points = 91;
    cfg.num.quad = {1e-8, 1e-12, 20000, 8};
    cfg.num.inner_quad = {1e-10, 1e-12, 2000, 8};
    TwoStepSpec ts;
    ts.prior_y1 = 0.1;
    ts.pr_bad_after_bad = 1.0;
    ts.pr_bad_after_good = 0.05;
    ts.c_repair[0] = 5.0;
    ts.c_repair[1] = 5.0;
    ts.c_failure[0] = 50.0;
    ts.c_failure[1] = 50.0;
    ts.belief_grid = 2049;
    ts.reference_pod = 0.90;
    ts.reference_pfa = 0.29;
    ts.memoryless_s_th = -0.4;
    cfg.two_step = ts;
    return cfg;
  }
  throw UnknownScenario("unknown builtin scenario '" + name + "'");
}

// ---- serialization ----

std::string serialize(const ScenarioConfig& cfg) {
  const std::string& su = cfg.signal_unit;
  const std::string& cu = cfg.condition_unit;
  json out;
  out["name"] = cfg.name;
  out["units"] = {{"signal", su}, {"condition", cu}, {"money_label", cfg.money_label}};
  out["orientation"] = cfg.orientation == model::SignalOrientation::SignalAbove
                           ? "signal_above"
                           : "signal_below";

  json prior;
  if (const auto* d = std::get_if<dist::ContinuousDistribution>(&cfg.condition_prior))
    prior["dist"] = dist_to_json(*d, cu);
  else
    prior["pr_y1"] = std::get<double>(cfg.condition_prior);
  out["condition_prior"] = prior;

  json nde;
  if (const auto* base = std::get_if<BaseLognormalPoly>(&cfg.nde)) {
    nde["type"] = "base_lognormal_median_poly";
    nde["median_poly"] = base->median_poly;
    nde["sigma_log"] = base->sigma_log;
    nde[suffixed("condition_support", cu)] = interval_to_json(base->condition_support);
    nde[suffixed("signal_support", su)] = interval_to_json(base->signal_support);
  } else if (const auto* classes = std::get_if<SignalClassDensities>(&cfg.nde)) {
    nde["type"] = "signal_class_densities";
    nde["lik_y0"] = dist_to_json(classes->lik_y0, su);
    nde["lik_y1"] = dist_to_json(classes->lik_y1, su);
  } else {
    const auto& op = std::get<OperatingPointSpec>(cfg.nde);
    nde["type"] = "operating_point";
    nde["pod"] = op.pod;
    nde["pfa"] = op.pfa;
  }
  out["nde_model"] = nde;

  json failure;
  if (const auto* cont = std::get_if<FailureFloorNormCdfLog>(&cfg.failure)) {
    failure["type"] = "floor_normal_cdf_log";
    failure["floor"] = cont->floor;
    failure["shift"] = cont->shift;
    failure["p_repair"] = cont->p_repair;
  } else {
    const auto& table = std::get<FailureBinaryTable>(cfg.failure);
    failure["type"] = "binary_table";
    failure["p_fail"] = {{table.p[0][0], table.p[0][1]}, {table.p[1][0], table.p[1][1]}};
  }
  out["failure"] = failure;

  out["costs"] = {{"c_R_money", cfg.c_repair},
                  {"c_F_money", cfg.c_failure},
                  {"nde_cost_money", cfg.nde_cost}};

  if (std::isfinite(cfg.x_th) || std::isfinite(cfg.s_th_fixed)) {
    json th;
    if (std::isfinite(cfg.x_th)) th[suffixed("x_th", cu)] = cfg.x_th;
    if (std::isfinite(cfg.s_th_fixed)) th[suffixed("s_th_fixed", su)] = cfg.s_th_fixed;
    out["thresholds"] = th;
  }

  if (!cfg.designs.empty()) {
    json designs = json::array();
    for (const auto& [dname, d] : cfg.designs) {
      json entry;
      entry["name"] = dname;
      entry["dist"] = dist_to_json(d, cu);
      designs.push_back(entry);
    }
    out["experimental_designs"] = designs;
  }

  json num;
  num[suffixed("signal_window", su)] = interval_to_json(cfg.num.signal_window);
  num["signal_scale"] = scale_name(cfg.num.signal_scale);
  num[suffixed("decision_bracket", su)] = interval_to_json(cfg.num.decision_bracket);
  num["decision_scale"] = scale_name(cfg.num.decision_scale);
  num["decision_grid"] = cfg.num.decision_grid;
  num[suffixed("sweep_bracket", su)] = interval_to_json(cfg.num.sweep_bracket);
  num["sweep_scale"] = scale_name(cfg.num.sweep_scale);
  num["sweep_points"] = cfg.num.sweep_points;
  num["quad"] = quad_to_json(cfg.num.quad);
  num["inner_quad"] = quad_to_json(cfg.num.inner_quad);
  out["numeric"] = num;

  if (cfg.two_step) {
    const TwoStepSpec& ts = *cfg.two_step;
    json two;
    two["prior_y1"] = ts.prior_y1;
    two["pr_bad_after_bad"] = ts.pr_bad_after_bad;
    two["pr_bad_after_good"] = ts.pr_bad_after_good;
    two["c_R_money"] = {ts.c_repair[0], ts.c_repair[1]};
    two["c_F_money"] = {ts.c_failure[0], ts.c_failure[1]};
    two["belief_grid"] = ts.belief_grid;
    two["reference_pod"] = ts.reference_pod;
    two["reference_pfa"] = ts.reference_pfa;
    if (std::isfinite(ts.memoryless_s_th))
      two[suffixed("memoryless_s_th", su)] = ts.memoryless_s_th;
    out["two_step"] = two;
  }

  return out.dump(2) + "\n";
}

ScenarioConfig parse(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario config is not valid json: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("scenario config must be a json object");

  ScenarioConfig cfg;
  cfg.name = require_str(root, "name");

  const json& units = require(root, "units");
  cfg.signal_unit = require_str(units, "signal");
  cfg.condition_unit = require_str(units, "condition");
  cfg.money_label = require_str(units, "money_label");
  if (cfg.signal_unit.empty() || cfg.condition_unit.empty())
    throw ConfigError("config fields 'units.signal' and 'units.condition' must be non-empty");
  const std::string& su = cfg.signal_unit;
  const std::string& cu = cfg.condition_unit;

  const std::string orient = require_str(root, "orientation");
  if (orient == "signal_above")
    cfg.orientation = model::SignalOrientation::SignalAbove;
  else if (orient == "signal_below")
    cfg.orientation = model::SignalOrientation::SignalBelow;
  else
    throw ConfigError("config field 'orientation' must be \"signal_above\" or \"signal_below\"");

  const json& prior = require(root, "condition_prior");
  const bool has_dist = prior.contains("dist");
  const bool has_pr = prior.contains("pr_y1");
  if (has_dist == has_pr)
    throw ConfigError(
        "config field 'condition_prior' must hold exactly one of 'dist' and 'pr_y1'");
  if (has_dist)
    cfg.condition_prior = dist_from_json(prior["dist"], cu, "condition_prior.dist");
  else
    cfg.condition_prior = require_prob(prior, "pr_y1");

  const json& nde = require(root, "nde_model");
  const std::string nde_type = require_str(nde, "type");
  if (nde_type == "base_lognormal_median_poly") {
    BaseLognormalPoly base;
    const json& poly = require(nde, "median_poly");
    if (!poly.is_array() || poly.empty())
      throw ConfigError("config field 'nde_model.median_poly' must be a non-empty array");
    for (const json& c : poly) {
      if (!c.is_number())
        throw ConfigError("config field 'nde_model.median_poly' must hold numbers");
      base.median_poly.push_back(c.get<double>());
    }
    base.sigma_log = require_num(nde, "sigma_log");
    if (!(base.sigma_log > 0.0))
      throw ConfigError("config field 'nde_model.sigma_log' must be positive");
    const std::string cs_key = suffixed("condition_support", cu);
    const std::string ss_key = suffixed("signal_support", su);
    base.condition_support = interval_from_json(require(nde, cs_key), "nde_model." + cs_key);
    base.signal_support = interval_from_json(require(nde, ss_key), "nde_model." + ss_key);
    cfg.nde = base;
  } else if (nde_type == "signal_class_densities") {
    cfg.nde = SignalClassDensities{
        dist_from_json(require(nde, "lik_y0"), su, "nde_model.lik_y0"),
        dist_from_json(require(nde, "lik_y1"), su, "nde_model.lik_y1")};
  } else if (nde_type == "operating_point") {
    cfg.nde = OperatingPointSpec{require_prob(nde, "pod"), require_prob(nde, "pfa")};
  } else {
    throw ConfigError("config field 'nde_model.type': unknown model type '" + nde_type + "'");
  }

  const json& failure = require(root, "failure");
  const std::string fail_type = require_str(failure, "type");
  if (fail_type == "floor_normal_cdf_log") {
    cfg.failure = FailureFloorNormCdfLog{require_prob(failure, "floor"),
                                         require_num(failure, "shift"),
                                         require_prob(failure, "p_repair")};
  } else if (fail_type == "binary_table") {
    const json& table = require(failure, "p_fail");
    if (!table.is_array() || table.size() != 2 || !table[0].is_array() ||
        table[0].size() != 2 || !table[1].is_array() || table[1].size() != 2)
      throw ConfigError("config field 'failure.p_fail' must be a 2x2 array of probabilities");
    FailureBinaryTable bt;
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a) {
        if (!table[y][a].is_number())
          throw ConfigError("config field 'failure.p_fail' must hold numbers");
        const double p = table[y][a].get<double>();
        if (!(p >= 0.0 && p <= 1.0))
          throw ConfigError("config field 'failure.p_fail' entries must lie in [0, 1]");
        bt.p[y][a] = p;
      }
    cfg.failure = bt;
  } else {
    throw ConfigError("config field 'failure.type': unknown failure model '" + fail_type + "'");
  }

  const json& costs = require(root, "costs");
  cfg.c_repair = require_num(costs, "c_R_money");
  cfg.c_failure = require_num(costs, "c_F_money");
  cfg.nde_cost = require_num(costs, "nde_cost_money");
  if (cfg.c_repair < 0.0 || cfg.c_failure < 0.0 || cfg.nde_cost < 0.0)
    throw ConfigError("config field 'costs' entries must be non-negative");

  if (root.contains("thresholds")) {
    const json& th = root["thresholds"];
    const std::string x_key = suffixed("x_th", cu);
    const std::string s_key = suffixed("s_th_fixed", su);
    if (th.contains(x_key)) cfg.x_th = require_num(th, x_key);
    if (th.contains(s_key)) cfg.s_th_fixed = require_num(th, s_key);
  }

  if (root.contains("experimental_designs")) {
    const json& designs = root["experimental_designs"];
    if (!designs.is_array())
      throw ConfigError("config field 'experimental_designs' must be an array");
    for (const json& entry : designs) {
      std::string dname = require_str(entry, "name");
      auto d = dist_from_json(require(entry, "dist"), cu,
                              "experimental_designs[" + dname + "].dist");
      cfg.designs.emplace_back(std::move(dname), d);
    }
  }

  const json& num = require(root, "numeric");
  const std::string win_key = suffixed("signal_window", su);
  const std::string dec_key = suffixed("decision_bracket", su);
  const std::string swp_key = suffixed("sweep_bracket", su);
  cfg.num.signal_window = interval_from_json(require(num, win_key), "numeric." + win_key);
  cfg.num.signal_scale = scale_from_json(num, "signal_scale");
  cfg.num.decision_bracket = interval_from_json(require(num, dec_key), "numeric." + dec_key);
  cfg.num.decision_scale = scale_from_json(num, "decision_scale");
  cfg.num.decision_grid = require_int(num, "decision_grid");
  cfg.num.sweep_bracket = interval_from_json(require(num, swp_key), "numeric." + swp_key);
  cfg.num.sweep_scale = scale_from_json(num, "sweep_scale");
  cfg.num.sweep_points = require_int(num, "sweep_points");
  if (cfg.num.decision_grid < 2 || cfg.num.sweep_points < 2)
    throw ConfigError("config fields 'numeric.decision_grid' and 'numeric.sweep_points' must be >= 2");
  cfg.num.quad = quad_from_json(require(num, "quad"), "numeric.quad");
  cfg.num.inner_quad = quad_from_json(require(num, "inner_quad"), "numeric.inner_quad");

  if (root.contains("two_step")) {
    const json& two = root["two_step"];
    TwoStepSpec ts;
    ts.prior_y1 = require_prob(two, "prior_y1");
    ts.pr_bad_after_bad = require_prob(two, "pr_bad_after_bad");
    ts.pr_bad_after_good = require_prob(two, "pr_bad_after_good");
    const json& cr = require(two, "c_R_money");
    const json& cf = require(two, "c_F_money");
    if (!cr.is_array() || cr.size() != 2 || !cf.is_array() || cf.size() != 2)
      throw ConfigError(
          "config fields 'two_step.c_R_money' and 'two_step.c_F_money' must be per-step pairs");
    for (int i = 0; i < 2; ++i) {
      ts.c_repair[i] = cr[i].get<double>();
      ts.c_failure[i] = cf[i].get<double>();
      if (ts.c_repair[i] < 0.0 || ts.c_failure[i] < 0.0)
        throw ConfigError("config field 'two_step' costs must be non-negative");
    }
    ts.belief_grid = require_int(two, "belief_grid");
    ts.reference_pod = require_prob(two, "reference_pod");
    ts.reference_pfa = require_prob(two, "reference_pfa");
    const std::string mem_key = suffixed("memoryless_s_th", su);
    if (two.contains(mem_key)) ts.memoryless_s_th = require_num(two, mem_key);
    cfg.two_step = ts;
  }

  return cfg;
}

ScenarioConfig load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scenario config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void save(const ScenarioConfig& cfg, const std::filesystem::path& path) {
  const std::string text = serialize(cfg);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write scenario config '" + path.string() + "'");
    out << text;
    if (!out.flush()) throw ConfigError("cannot write scenario config '" + path.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

// ---- assembly ----

const char* family_name(ModelFamily f) {
  switch (f) {
    case ModelFamily::FullSignal: return "full_signal";
    case ModelFamily::DetectionCurve: return "detection_curve";
    case ModelFamily::SignalClasses: return "signal_classes";
    case ModelFamily::OperatingPoint: return "operating_point";
  }
  return "full_signal";
}

ModelFamily family_from_name(const std::string& name) {
  if (name == "full_signal") return ModelFamily::FullSignal;
  if (name == "detection_curve") return ModelFamily::DetectionCurve;
  if (name == "signal_classes") return ModelFamily::SignalClasses;
  if (name == "operating_point") return ModelFamily::OperatingPoint;
  throw ConfigError("unknown model family '" + name +
                    "' (expected full_signal, detection_curve, signal_classes or operating_point)");
}

ModelFamily default_family(const ScenarioConfig& cfg) {
  if (std::holds_alternative<BaseLognormalPoly>(cfg.nde)) return ModelFamily::FullSignal;
  if (std::holds_alternative<SignalClassDensities>(cfg.nde)) return ModelFamily::SignalClasses;
  return ModelFamily::OperatingPoint;
}

model::BaseModel make_base(const ScenarioConfig& cfg) {
  const auto* spec = std::get_if<BaseLognormalPoly>(&cfg.nde);
  if (!spec)
    throw ConfigError("scenario '" + cfg.name + "' has no full conditional signal model");
  model::BaseModel base;
  const std::vector<double> coeffs = spec->median_poly;
  const double sigma = spec->sigma_log;
  base.signal_given_condition = [coeffs, sigma](double x) {
    const double median = horner(coeffs, x);
    if (!(median > 0.0))
      throw ConfigError("median polynomial is not positive on the condition support");
    return dist::ContinuousDistribution::lognormal(std::log(median), sigma);
  };
  base.condition_support = spec->condition_support;
  base.signal_support = spec->signal_support;
  return base;
}

decide::FailureModel make_failure(const ScenarioConfig& cfg) {
  if (const auto* cont = std::get_if<FailureFloorNormCdfLog>(&cfg.failure)) {
    const double floor = cont->floor;
    const double shift = cont->shift;
    const double p_repair = cont->p_repair;
    bayes::ContinuousFailureModel out;
    out.p_fail_keep = [floor, shift](double x) {
      if (!(x > 0.0)) return floor;
      return floor + (1.0 - floor) * dist::std_normal_cdf(std::log(x) - shift);
    };
    out.p_fail_repair = [p_repair](double) { return p_repair; };
    return out;
  }
  const auto& table = std::get<FailureBinaryTable>(cfg.failure);
  bayes::BinaryFailureModel out;
  for (int y = 0; y < 2; ++y)
    for (int a = 0; a < 2; ++a) out.p[y][a] = table.p[y][a];
  return out;
}

model::RocModel make_roc(const ScenarioConfig& cfg, const Overrides& ov) {
  if (const auto* classes = std::get_if<SignalClassDensities>(&cfg.nde)) {
    double prior_y1 = kNaN;
    if (const auto* p = std::get_if<double>(&cfg.condition_prior)) {
      prior_y1 = *p;
    } else {
      const auto& d = std::get<dist::ContinuousDistribution>(cfg.condition_prior);
      const double x_th = pick(ov.x_th, cfg.x_th);
      if (!std::isfinite(x_th))
        throw ConfigError("a condition threshold x_th is required to split the prior into classes");
      prior_y1 = 1.0 - d.cdf(x_th);
    }
    return model::roc_from_distributions(classes->lik_y0, classes->lik_y1, prior_y1,
                                         cfg.orientation);
  }
  if (std::holds_alternative<BaseLognormalPoly>(cfg.nde)) {
    const auto* prior = std::get_if<dist::ContinuousDistribution>(&cfg.condition_prior);
    if (!prior)
      throw ConfigError(
          "deriving signal classes from the full model needs a continuous condition prior");
    const double x_th = pick(ov.x_th, cfg.x_th);
    if (!std::isfinite(x_th))
      throw ConfigError("a condition threshold x_th is required to derive signal classes");
    return model::roc_from_base(make_base(cfg), x_th, *prior, *prior, cfg.orientation,
                                quad::GridScale::Linear, cfg.num.inner_quad,
                                "application prior");
  }
  throw ConfigError("scenario '" + cfg.name +
                    "' gives only an operating point; signal-class densities are unavailable");
}

decide::OneStepProblem one_step_problem(const ScenarioConfig& cfg, ModelFamily family,
                                        const Overrides& ov) {
  decide::OneStepProblem p;
  if (const auto* d = std::get_if<dist::ContinuousDistribution>(&cfg.condition_prior))
    p.condition_prior = *d;
  else
    p.condition_prior = std::get<double>(cfg.condition_prior);
  p.failure = make_failure(cfg);
  p.costs = decide::Costs{cfg.c_repair, cfg.c_failure, cfg.nde_cost, cfg.money_label};
  p.orientation = cfg.orientation;
  p.x_th = pick(ov.x_th, cfg.x_th);
  p.num = cfg.num;

  switch (family) {
    case ModelFamily::FullSignal:
      p.nde = make_base(cfg);
      break;
    case ModelFamily::DetectionCurve: {
      const double s_th = pick(ov.s_th, cfg.s_th_fixed);
      if (!std::isfinite(s_th))
        throw ConfigError("a signal threshold s_th is required for a detection-curve model");
      p.nde = model::pod_curve_from_base(make_base(cfg), s_th, cfg.orientation);
      break;
    }
    case ModelFamily::SignalClasses:
      p.nde = make_roc(cfg, ov);
      break;
    case ModelFamily::OperatingPoint: {
      if (const auto* op = std::get_if<OperatingPointSpec>(&cfg.nde)) {
        p.nde = model::ConfusionMatrix{op->pod, op->pfa, cfg.orientation};
      } else {
        const double s_th = pick(ov.s_th, cfg.s_th_fixed);
        if (!std::isfinite(s_th))
          throw ConfigError("a signal threshold s_th is required for an operating-point model");
        p.nde = model::operating_point(make_roc(cfg, ov), s_th);
      }
      break;
    }
  }
  return p;
}

seq::TwoStepProblem two_step_problem(const ScenarioConfig& cfg) {
  if (!cfg.two_step)
    throw ConfigError("scenario '" + cfg.name + "' has no two_step block");
  const TwoStepSpec& ts = *cfg.two_step;
  seq::TwoStepProblem t;
  t.prior_y1 = ts.prior_y1;
  t.transition[1][1] = ts.pr_bad_after_bad;
  t.transition[0][1] = 1.0 - ts.pr_bad_after_bad;
  t.transition[1][0] = ts.pr_bad_after_good;
  t.transition[0][0] = 1.0 - ts.pr_bad_after_good;
  if (!std::holds_alternative<OperatingPointSpec>(cfg.nde)) t.roc = make_roc(cfg);
  t.c_repair[0] = ts.c_repair[0];
  t.c_repair[1] = ts.c_repair[1];
  t.c_failure[0] = ts.c_failure[0];
  t.c_failure[1] = ts.c_failure[1];
  t.unit = cfg.money_label;
  t.nde_cost = cfg.nde_cost;
  t.belief_grid = ts.belief_grid;
  t.num = cfg.num;
  return t;
}

std::vector<decide::DesignEntry> design_entries(const ScenarioConfig& cfg) {
  std::vector<decide::DesignEntry> out;
  out.reserve(cfg.designs.size());
  for (const auto& [dname, d] : cfg.designs) out.push_back({dname, d});
  return out;
}

}  // namespace ndevoi::scenario
