#include "pcsf_app/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "pcsf/errors.hpp"

namespace pcsf::app {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) throw ConfigError(path + "." + key + ": unknown key");
  }
}

double get_number(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(path + "." + key + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path + "." + key + ": must be finite");
  return x;
}

long get_integer(const json& obj, const std::string& path, const char* key, long fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(path + "." + key + ": expected an integer");
  return v.get<long>();
}

std::string lambda_text(const Rational& r) {
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

Rational parse_ratio(const std::string& text, const std::string& path) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) throw std::invalid_argument("no slash");
    size_t used_n = 0, used_m = 0;
    const int n = std::stoi(text.substr(0, slash), &used_n);
    const std::string rest = text.substr(slash + 1);
    const int m = std::stoi(rest, &used_m);
    if (used_n != slash || used_m != rest.size()) throw std::invalid_argument("trailing text");
    return {n, m};
  } catch (const std::exception&) {
    throw ConfigError(path + ": expected a number or \"n/m\", got \"" + text + "\"");
  }
}

void read_params(const json& doc, RunConfig& c) {
  const std::string path = "params";
  check_keys(doc, path, {"p", "lambda", "n_max"});
  if (!doc.contains("p") || !doc.contains("lambda") || !doc.contains("n_max")) {
    throw ConfigError(path + ": p, lambda and n_max are required");
  }
  c.p = static_cast<int>(get_integer(doc, path, "p", 1));
  c.n_max = static_cast<int>(get_integer(doc, path, "n_max", 16));
  const auto& lam = doc.at("lambda");
  if (lam.is_string()) {
    c.ratio = parse_ratio(lam.get<std::string>(), path + ".lambda");
  } else if (lam.is_number()) {
    c.lambda = lam.get<double>();
    c.ratio.reset();
  } else {
    throw ConfigError(path + ".lambda: expected a number or \"n/m\"");
  }
  try {
    const auto fp = c.params();
    c.lambda = fp.lambda();
    if (fp.ratio()) c.ratio = fp.ratio();
  } catch (const Error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void read_init(const json& doc, RunConfig& c) {
  const std::string path = "init";
  check_keys(doc, path, {"mean", "harmonics", "perturbation"});
  c.init.mean = get_number(doc, path, "mean", 1.0);
  if (!(c.init.mean > 0.0)) throw ConfigError(path + ".mean: must be positive");
  if (doc.contains("harmonics")) {
    const auto& hs = doc.at("harmonics");
    if (!hs.is_array()) throw ConfigError(path + ".harmonics: expected an array");
    for (size_t i = 0; i < hs.size(); ++i) {
      const std::string hp = path + ".harmonics[" + std::to_string(i) + "]";
      check_keys(hs[i], hp, {"mode", "cos", "sin"});
      InitHarmonic h;
      h.mode = static_cast<int>(get_integer(hs[i], hp, "mode", 1));
      h.cos_amp = get_number(hs[i], hp, "cos", 0.0);
      h.sin_amp = get_number(hs[i], hp, "sin", 0.0);
      if (h.mode < 1 || h.mode > c.n_max) {
        throw ConfigError(hp + ".mode: must lie in 1..n_max");
      }
      c.init.harmonics.push_back(h);
    }
  }
  if (doc.contains("perturbation")) {
    const auto& pd = doc.at("perturbation");
    const std::string pp = path + ".perturbation";
    check_keys(pd, pp, {"m", "n", "delta", "harmonics", "samples"});
    PerturbationSpec spec;
    spec.m = static_cast<int>(get_integer(pd, pp, "m", 1));
    spec.n = static_cast<int>(get_integer(pd, pp, "n", 2));
    spec.delta = get_number(pd, pp, "delta", 0.0);
    c.init.perturbation_samples = static_cast<int>(get_integer(pd, pp, "samples", 1024));
    if (pd.contains("harmonics")) {
      const auto& hs = pd.at("harmonics");
      if (!hs.is_array()) throw ConfigError(pp + ".harmonics: expected an array");
      spec.harmonics.clear();
      for (size_t i = 0; i < hs.size(); ++i) {
        const std::string hp = pp + ".harmonics[" + std::to_string(i) + "]";
        check_keys(hs[i], hp, {"j", "amplitude", "phase"});
        spec.harmonics.push_back({static_cast<int>(get_integer(hs[i], hp, "j", 1)),
                                  get_number(hs[i], hp, "amplitude", 1.0),
                                  get_number(hs[i], hp, "phase", 0.0)});
      }
    }
    try {
      spec.validate();
    } catch (const Error& e) {
      throw ConfigError(pp + ": " + e.what());
    }
    const Rational want{spec.n / std::gcd(spec.n, spec.m), spec.m / std::gcd(spec.n, spec.m)};
    if (!c.ratio || c.ratio->num != want.num || c.ratio->den != want.den) {
      throw ConfigError(pp + ": params.lambda must be \"" + lambda_text(want) + "\"");
    }
    if (c.init.perturbation_samples < 2 * c.n_max + 1) {
      throw ConfigError(pp + ".samples: must be at least 2 n_max + 1");
    }
    if (doc.contains("harmonics") || doc.contains("mean")) {
      throw ConfigError(path + ": perturbation excludes mean and harmonics");
    }
    c.init.perturbation = spec;
  }
}

void read_control(const json& doc, RunConfig& c) {
  const std::string path = "control";
  check_keys(doc, path, {"rel_tol", "abs_tol", "safety", "max_step", "min_step", "k0_stop",
                         "snapshots_per_decade", "t_end", "max_steps"});
  auto& s = c.control.step;
  s.rel_tol = get_number(doc, path, "rel_tol", s.rel_tol);
  s.abs_tol = get_number(doc, path, "abs_tol", s.abs_tol);
  s.safety = get_number(doc, path, "safety", s.safety);
  s.max_step = get_number(doc, path, "max_step", s.max_step);
  s.min_step = get_number(doc, path, "min_step", s.min_step);
  s.k0_stop = get_number(doc, path, "k0_stop", s.k0_stop);
  c.control.snapshots_per_decade =
      static_cast<int>(get_integer(doc, path, "snapshots_per_decade", c.control.snapshots_per_decade));
  c.control.max_steps = get_integer(doc, path, "max_steps", c.control.max_steps);
  if (doc.contains("t_end")) c.control.t_end = get_number(doc, path, "t_end", 0.0);
  try {
    s.validate();
  } catch (const Error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (c.control.snapshots_per_decade < 1) throw ConfigError(path + ".snapshots_per_decade: must be >= 1");
  if (c.control.max_steps < 1) throw ConfigError(path + ".max_steps: must be >= 1");
  if (c.control.t_end && !(*c.control.t_end > 0.0)) throw ConfigError(path + ".t_end: must be positive");
}

void read_analysis(const json& doc, RunConfig& c) {
  const std::string path = "analysis";
  check_keys(doc, path, {"c_override", "power_window", "exp_window", "rate_modes", "rate_tolerance"});
  if (doc.contains("c_override")) {
    c.analysis.c_override = get_number(doc, path, "c_override", 0.0);
    if (!(*c.analysis.c_override > 0.0)) throw ConfigError(path + ".c_override: must be positive");
  }
  if (doc.contains("power_window")) {
    const auto& w = doc.at("power_window");
    check_keys(w, path + ".power_window", {"lo", "hi"});
    c.analysis.power_window.lo = get_number(w, path + ".power_window", "lo", c.analysis.power_window.lo);
    c.analysis.power_window.hi = get_number(w, path + ".power_window", "hi", c.analysis.power_window.hi);
  }
  if (!(c.analysis.power_window.lo > 0.0 && c.analysis.power_window.lo < c.analysis.power_window.hi)) {
    throw ConfigError(path + ".power_window: need 0 < lo < hi");
  }
  if (doc.contains("exp_window")) {
    const auto& w = doc.at("exp_window");
    const std::string wp = path + ".exp_window";
    check_keys(w, wp, {"lo", "hi", "floor"});
    c.analysis.exp_window.lo = get_number(w, wp, "lo", c.analysis.exp_window.lo);
    if (w.contains("hi")) c.analysis.exp_window.hi = get_number(w, wp, "hi", 0.0);
    c.analysis.exp_window.floor = get_number(w, wp, "floor", c.analysis.exp_window.floor);
  }
  if (!(c.analysis.exp_window.lo < c.analysis.exp_window.hi)) {
    throw ConfigError(path + ".exp_window: need lo < hi");
  }
  c.analysis.rate_modes = static_cast<int>(get_integer(doc, path, "rate_modes", c.analysis.rate_modes));
  if (c.analysis.rate_modes < 1) throw ConfigError(path + ".rate_modes: must be >= 1");
  c.analysis.rate_tolerance = get_number(doc, path, "rate_tolerance", c.analysis.rate_tolerance);
  if (!(c.analysis.rate_tolerance > 0.0)) throw ConfigError(path + ".rate_tolerance: must be positive");
}

void read_output(const json& doc, RunConfig& c) {
  const std::string path = "output";
  check_keys(doc, path, {"directory", "formats"});
  if (doc.contains("directory")) {
    if (!doc.at("directory").is_string()) throw ConfigError(path + ".directory: expected a string");
    c.output.directory = doc.at("directory").get<std::string>();
  }
  if (doc.contains("formats")) {
    const auto& f = doc.at("formats");
    if (!f.is_array()) throw ConfigError(path + ".formats: expected an array");
    c.output.formats.clear();
    for (const auto& x : f) {
      if (!x.is_string()) throw ConfigError(path + ".formats: expected strings");
      const auto name = x.get<std::string>();
      if (name != "jsonl" && name != "csv") {
        throw ConfigError(path + ".formats: unknown format \"" + name + "\"");
      }
      c.output.formats.push_back(name);
    }
  }
}

}  // namespace

FlowParams RunConfig::params() const {
  if (ratio) return FlowParams::rational(p, ratio->num, ratio->den, n_max);
  return FlowParams(p, lambda, n_max);
}

SpectralState RunConfig::initial_state() const {
  const auto fp = params();
  if (init.perturbation) {
    return radial_perturbation_curvature(*init.perturbation, fp, init.perturbation_samples);
  }
  auto s = SpectralState::constant(fp, init.mean);
  for (const auto& h : init.harmonics) {
    s.set_mode(h.mode, s.mode(h.mode) + Complex(h.cos_amp / 2.0, -h.sin_amp / 2.0));
  }
  return s;
}

TrapConstant RunConfig::trap_constant() const {
  if (analysis.c_override) return {*analysis.c_override, false};
  return select_c(params());
}

bool RunConfig::wants(const std::string& format) const {
  return std::find(output.formats.begin(), output.formats.end(), format) != output.formats.end();
}

RunConfig config_from_json(const json& doc) {
  check_keys(doc, "config", {"params", "init", "control", "analysis", "output", "seed"});
  if (!doc.contains("params")) throw ConfigError("config.params: required");
  RunConfig c;
  read_params(doc.at("params"), c);
  if (doc.contains("init")) read_init(doc.at("init"), c);
  if (doc.contains("control")) read_control(doc.at("control"), c);
  if (doc.contains("analysis")) read_analysis(doc.at("analysis"), c);
  if (doc.contains("output")) read_output(doc.at("output"), c);
  if (doc.contains("seed")) {
    const auto& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw ConfigError("config.seed: expected a non-negative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return config_from_json(doc);
}

json params_to_json(const FlowParams& params) {
  json j;
  j["p"] = params.p();
  if (params.ratio()) {
    j["lambda"] = lambda_text(*params.ratio());
  } else {
    j["lambda"] = params.lambda();
  }
  j["n_max"] = params.n_max();
  return j;
}

FlowParams params_from_json(const json& doc) {
  RunConfig c;
  read_params(doc, c);
  return c.params();
}

json config_to_json(const RunConfig& c) {
  json j;
  j["params"] = params_to_json(c.params());

  json init = json::object();
  if (c.init.perturbation) {
    const auto& sp = *c.init.perturbation;
    json hs = json::array();
    for (const auto& h : sp.harmonics) hs.push_back({{"j", h.j}, {"amplitude", h.amplitude}, {"phase", h.phase}});
    init["perturbation"] = {{"m", sp.m}, {"n", sp.n}, {"delta", sp.delta}, {"harmonics", hs},
                            {"samples", c.init.perturbation_samples}};
  } else {
    init["mean"] = c.init.mean;
    json hs = json::array();
    for (const auto& h : c.init.harmonics) hs.push_back({{"mode", h.mode}, {"cos", h.cos_amp}, {"sin", h.sin_amp}});
    init["harmonics"] = hs;
  }
  j["init"] = init;

  const auto& s = c.control.step;
  json control = {{"rel_tol", s.rel_tol},   {"abs_tol", s.abs_tol},   {"safety", s.safety},
                  {"max_step", s.max_step}, {"min_step", s.min_step}, {"k0_stop", s.k0_stop},
                  {"snapshots_per_decade", c.control.snapshots_per_decade},
                  {"max_steps", c.control.max_steps}};
  if (c.control.t_end) control["t_end"] = *c.control.t_end;
  j["control"] = control;

  json analysis = {{"power_window", {{"lo", c.analysis.power_window.lo}, {"hi", c.analysis.power_window.hi}}},
                   {"rate_modes", c.analysis.rate_modes},
                   {"rate_tolerance", c.analysis.rate_tolerance}};
  json ew = {{"lo", c.analysis.exp_window.lo}, {"floor", c.analysis.exp_window.floor}};
  if (std::isfinite(c.analysis.exp_window.hi)) ew["hi"] = c.analysis.exp_window.hi;
  analysis["exp_window"] = ew;
  if (c.analysis.c_override) analysis["c_override"] = *c.analysis.c_override;
  j["analysis"] = analysis;

  j["output"] = {{"directory", c.output.directory}, {"formats", c.output.formats}};
  j["seed"] = c.seed;
  return j;
}

}  // namespace pcsf::app
