#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "pcsf/blowup.hpp"
#include "pcsf/errors.hpp"
#include "pcsf/normalization.hpp"
#include "pcsf_app/commands.hpp"

namespace pcsf::app {

using nlohmann::json;

namespace {

RunConfig config_of(const TrajectoryFile& file) {
  if (file.config.is_object()) return config_from_json(file.config);
  RunConfig c;
  const auto& fp = file.trajectory.params;
  c.p = fp.p();
  c.lambda = fp.lambda();
  c.ratio = fp.ratio();
  c.n_max = fp.n_max();
  return c;
}

bool is_constant(const SpectralState& s) {
  for (int n = 1; n <= s.n_max(); ++n) {
    if (s.mode(n) != Complex(0.0, 0.0)) return false;
  }
  return true;
}

json fit_json(const RateFit& f) {
  return {{"exponent", f.exponent},
          {"stderr", f.std_error},
          {"window", {f.window_lo, f.window_hi}},
          {"n_points", f.n_points}};
}

json estimate_json(const BlowupEstimate& e) {
  return {{"T_est", e.T}, {"uncertainty", e.uncertainty}, {"tail", e.tail}, {"n_points", e.n_points}};
}

json rates_report(const TrajectoryFile& file, const RunConfig& cfg) {
  const auto& traj = file.trajectory;
  const auto est = estimate_T(traj);
  const int p = traj.params.p();
  const double lambda = traj.params.lambda();
  json modes = json::array();
  bool all = true;
  for (int n = 1; n <= std::min(cfg.analysis.rate_modes, traj.params.n_max()); ++n) {
    const double alpha = decay_exponent(lambda, n, p);
    const double expected = forced_decay_exponent(lambda, n, p);
    json m = {{"n", n}, {"alpha", alpha}, {"expected", expected}};
    try {
      const auto f = fit_power(traj, est, n, cfg.analysis.power_window);
      m["fit"] = fit_json(f);
      m["pass"] = std::abs(f.exponent - expected) <= cfg.analysis.rate_tolerance * expected;
    } catch (const AnalysisError& e) {
      m["error"] = e.what();
      m["pass"] = false;
    }
    all = all && m["pass"].get<bool>();
    modes.push_back(m);
  }
  return {{"what", "rates"},
          {"blowup", estimate_json(est)},
          {"window", {cfg.analysis.power_window.lo, cfg.analysis.power_window.hi}},
          {"tolerance", cfg.analysis.rate_tolerance},
          {"modes", modes},
          {"pass", all}};
}

json trap_report(const TrajectoryFile& file, const RunConfig& cfg) {
  const auto c = cfg.trap_constant();
  const auto cert = certify(file.trajectory, c.value);
  const auto hyp = check_hypothesis(file.trajectory.snapshots.front(), c.value);
  json r = {{"what", "trap"},
            {"c", c.value},
            {"heuristic", c.heuristic},
            {"initial", {{"holds", hyp.holds}, {"mean", hyp.mean}, {"seminorm2", hyp.seminorm2},
                         {"margin", hyp.margin}, {"positive", hyp.positive}}},
            {"snapshots", cert.margins.size()},
            {"min_margin", cert.min_margin()},
            {"holds", cert.holds()},
            {"pass", cert.holds()}};
  r["gamma_fit"] = cert.gamma_fit ? json(*cert.gamma_fit) : json(nullptr);
  r["mu_fit"] = cert.mu_fit ? json(*cert.mu_fit) : json(nullptr);
  return r;
}

json blowup_report(const TrajectoryFile& file) {
  const auto& traj = file.trajectory;
  const auto est = estimate_T(traj);
  const auto env = check_envelopes(traj, est);
  json r = {{"what", "blowup"},
            {"blowup", estimate_json(est)},
            {"envelopes", {{"holds", env.holds}, {"checked", env.checked},
                           {"min_position", env.min_position}, {"max_position", env.max_position}}}};
  bool pass = env.holds;
  const auto& first = traj.snapshots.front();
  if (first.t() == 0.0 && is_constant(first)) {
    const int p = traj.params.p();
    const double exact = p / ((p + 1.0) * std::pow(first.mean(), p + 1));
    const double rel = std::abs(est.T - exact) / exact;
    r["T_exact"] = exact;
    r["relative_error"] = rel;
    pass = pass && rel <= 1e-6;
  }
  r["pass"] = pass;
  return r;
}

json normalized_report(const TrajectoryFile& file, const RunConfig& cfg) {
  const auto& traj = file.trajectory;
  const int p = traj.params.p();
  const double beta = stabilization_rate(p, traj.params.lambda());
  json r = {{"what", "normalized"}, {"beta", beta}, {"omega", beta}};
  NormalizedSeries series;
  std::optional<BlowupEstimate> est;
  if (traj.flow == Flow::normalized) {
    series = normalized_series(traj, std::vector<int>{0, 1, 2});
  } else {
    est = estimate_T(traj);
    r["blowup"] = estimate_json(*est);
    series = normalized_series(traj, *est, std::vector<int>{0, 1, 2});
  }
  const auto& w = cfg.analysis.exp_window;
  r["window"] = {{"lo", w.lo}, {"hi", std::isfinite(w.hi) ? json(w.hi) : json(nullptr)}, {"floor", w.floor}};
  r["last_tau"] = series.taus.empty() ? json(nullptr) : json(series.taus.back());
  auto try_fit = [&](const std::vector<double>& values) -> json {
    try {
      return fit_json(fit_exponential(series.taus, values, w));
    } catch (const AnalysisError& e) {
      return {{"error", e.what()}};
    }
  };
  json fits = {{"unit_dev", try_fit(series.unit_dev)},
               {"sup_dev", try_fit(series.sup_dev)},
               {"mean_dev", try_fit(series.mean_dev)}};
  for (size_t i = 0; i < series.cl_levels.size(); ++i) {
    fits["cl_" + std::to_string(series.cl_levels[i])] = try_fit(series.cl_dev[i]);
  }
  r["fits"] = fits;
  bool pass = false;
  if (fits["unit_dev"].contains("exponent")) {
    const double rate = -fits["unit_dev"]["exponent"].get<double>();
    r["rate"] = rate;
    pass = std::abs(rate - beta) <= cfg.analysis.rate_tolerance * beta;
  }
  if (est) {
    try {
      const auto sens = unit_rate_sensitivity(traj, *est, w);
      r["sensitivity"] = {{"low_T", -sens.low_T.exponent}, {"high_T", -sens.high_T.exponent},
                          {"spread", sens.spread()}};
    } catch (const AnalysisError& e) {
      r["sensitivity"] = {{"error", e.what()}};
    }
  }
  r["pass"] = pass;
  return r;
}

}  // namespace

json analyze_report(const TrajectoryFile& file, const std::string& what) {
  const auto cfg = config_of(file);
  if (what == "rates") return rates_report(file, cfg);
  if (what == "trap") return trap_report(file, cfg);
  if (what == "blowup") return blowup_report(file);
  if (what == "normalized") return normalized_report(file, cfg);
  throw AnalysisError("unknown analysis \"" + what + "\" (rates, trap, blowup, normalized)");
}

int cmd_analyze(const std::string& traj_path, const std::string& what,
                const std::optional<std::string>& out_dir, std::ostream& out, std::ostream& err) {
  std::optional<TrajectoryFile> file;
  try {
    file.emplace(read_trajectory_file(traj_path));
  } catch (const VersionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitVersion;
  }
  const auto report = analyze_report(*file, what);
  const auto text = report.dump(2);
  out << text << '\n';
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    const auto path = (std::filesystem::path(*out_dir) / ("report_" + what + ".json")).string();
    std::ofstream f(path);
    f << text << '\n';
    if (!f) throw std::runtime_error(path + ": write failed");
  }
  return kExitOk;
}

}  // namespace pcsf::app
