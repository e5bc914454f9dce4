#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "pcsf/blowup.hpp"
#include "pcsf/errors.hpp"
#include "pcsf/normalization.hpp"
#include "pcsf_app/commands.hpp"

namespace pcsf::app {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int exit_code_for(const Trajectory& traj) {
  if (traj.has_event(EventKind::positivity_loss)) return kExitPositivity;
  if (traj.has_event(EventKind::trap_violation)) return kExitTrap;
  if (traj.has_event(EventKind::step_floor)) return kExitStepFloor;
  return kExitOk;
}

std::string metrics_csv(const Trajectory& traj, double c) {
  const int p = traj.params.p();
  std::ostringstream csv;
  csv << "t,k0,T_est_running,trap_margin,seminorm2,sup_dev\n";
  for (const auto& s : traj.snapshots) {
    const double k0 = s.mean();
    const double gap = p / (p + 1.0) * std::pow(k0, -(p + 1));
    const auto grid = synthesize(s, default_grid_size(s.n_max()));
    double dev = 0.0;
    for (double v : grid.values) dev = std::max(dev, std::abs(v - k0));
    csv << num(s.t()) << ',' << num(k0) << ',' << num(s.t() + gap) << ',' << num(trap_margin(s, c))
        << ',' << num(seminorm(s, 2.0)) << ',' << num(rescale_factor(p, gap) * dev) << '\n';
  }
  return csv.str();
}

int cmd_simulate(const RunConfig& config, const std::string& out_dir, std::ostream& log) {
  const auto init = config.initial_state();
  const auto c = config.trap_constant();
  IntegrateOptions opts;
  opts.control = config.control.step;
  opts.snapshots_per_decade = config.control.snapshots_per_decade;
  opts.trap_constant = c.value;
  opts.t_end = config.control.t_end;
  opts.max_steps = config.control.max_steps;
  const auto traj = integrate(init, opts);

  std::filesystem::create_directories(out_dir);
  const auto echo = config_to_json(config);
  if (config.wants("jsonl")) {
    write_trajectory_file((std::filesystem::path(out_dir) / "trajectory.jsonl").string(), traj, echo);
  }
  if (config.wants("csv")) {
    const auto path = (std::filesystem::path(out_dir) / "metrics.csv").string();
    std::ofstream out(path);
    out << metrics_csv(traj, c.value);
    if (!out) throw std::runtime_error(path + ": write failed");
  }

  const auto& last = traj.snapshots.back();
  log << "snapshots " << traj.snapshots.size() << ", last t " << num(last.t()) << ", k0 "
      << num(last.mean()) << '\n';
  if (traj.T_est) log << "T_est " << num(*traj.T_est) << '\n';
  log << "trap constant " << num(c.value) << (c.heuristic ? " (heuristic)" : "")
      << ", initial margin " << num(trap_margin(init, c.value)) << '\n';
  for (const auto& e : traj.events) {
    log << "event " << to_string(e.kind) << " at t " << num(e.time);
    if (!e.detail.empty()) log << ": " << e.detail;
    log << '\n';
  }
  return exit_code_for(traj);
}

SpectralState random_trapped_state(const FlowParams& params, double c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto s = SpectralState::constant(params, 1.0);
  for (int n = 1; n <= params.n_max(); ++n) {
    const double bound = 0.999 / (c * n * n);
    s.set_mode(n, Complex(bound * unit(rng), bound * unit(rng)));
  }
  return s;
}

}  // namespace pcsf::app
