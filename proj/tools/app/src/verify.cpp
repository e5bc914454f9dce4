#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <ostream>
#include <sstream>

#include "pcsf/blowup.hpp"
#include "pcsf/errors.hpp"
#include "pcsf/flow_rhs.hpp"
#include "pcsf/normalization.hpp"
#include "pcsf_app/commands.hpp"

namespace pcsf::app {

namespace {

using Check = std::function<CheckResult()>;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

double max_rel_diff(const SpectralState& a, const SpectralState& b) {
  double diff = 0.0, scale = 0.0;
  for (int n = 0; n <= a.n_max(); ++n) {
    diff = std::max(diff, std::abs(a.mode(n) - b.mode(n)));
    scale = std::max(scale, std::abs(b.mode(n)));
  }
  return diff / scale;
}

CheckResult oracle_equivalence(const VerifyOptions& o) {
  const TupleKernel kernel = o.mutate_kernel
                                 ? TupleKernel([](int p, double l, long a, long b) { return -h_kernel(p, l, a, b); })
                                 : TupleKernel(h_kernel);
  double worst = 0.0;
  std::uint64_t seed = o.seed;
  for (int p : {1, 2, 3}) {
    for (int n : {2, 4, 8}) {
      FlowParams fp(p, 2.0, n);
      const double c = select_c(fp).value;
      for (int i = 0; i < o.states_per_case; ++i) {
        const auto s = random_trapped_state(fp, c, ++seed);
        worst = std::max(worst, max_rel_diff(rhs_fast(s), rhs_direct(s, kernel)));
      }
    }
  }
  return {"oracle equivalence (fast vs tuple sum)", worst <= 1e-10, "max rel diff " + sci(worst)};
}

CheckResult diagonal_split(const VerifyOptions& o) {
  double worst = 0.0;
  for (int p : {1, 2, 3}) {
    FlowParams fp(p, 2.0, 8);
    const auto s = random_trapped_state(fp, select_c(fp).value, o.seed + static_cast<unsigned>(p));
    for (int n = 1; n <= fp.n_max(); ++n) {
      const Complex want = linear_coefficient(fp, n, s.mean()) * s.mode(n);
      worst = std::max(worst, std::abs(single_tuple_sum(s, n) - want) / std::abs(want));
    }
  }
  return {"diagonal split identity", worst <= 1e-12, "max rel diff " + sci(worst)};
}

CheckResult constant_exactness(const VerifyOptions&) {
  double worst_T = 0.0, worst_u = 0.0;
  for (int p : {1, 2, 3}) {
    for (double a : {0.5, 1.0, 2.0}) {
      FlowParams fp(p, 2.0, 4);
      const auto traj = integrate(SpectralState::constant(fp, a));
      const auto est = estimate_T(traj);
      const double exact = p / ((p + 1.0) * std::pow(a, p + 1));
      worst_T = std::max(worst_T, std::abs(est.T - exact) / exact);
      const auto gaps = time_to_blowup(traj, est);
      for (size_t i = 0; i < traj.snapshots.size(); ++i) {
        const auto u = rescale_by_gap(traj.snapshots[i], gaps[i], est.T);
        worst_u = std::max(worst_u, std::abs(u.mean() - 1.0));
      }
    }
  }
  return {"constant-data blow-up time and rescaling", worst_T <= 1e-6 && worst_u <= 1e-10,
          "T rel err " + sci(worst_T) + ", |u-1| " + sci(worst_u)};
}

CheckResult round_trips(const VerifyOptions& o) {
  FlowParams fp(2, 2.0, 8);
  const auto s = random_trapped_state(fp, select_c(fp).value, o.seed);
  const double grid = max_rel_diff(analyze_grid(synthesize(s, 64)), s);

  SpectralState at = s;
  at.set_t(0.3);
  const double T = 0.7;
  const double rescale = max_rel_diff(unrescale_state(rescale_state(at, T), T), at);

  RunConfig cfg;
  cfg.init.harmonics.push_back({2, 0.005, 0.0});
  const auto j1 = config_to_json(cfg);
  const auto j2 = config_to_json(config_from_json(j1));
  const bool config_ok = j1 == j2;

  IntegrateOptions io;
  io.control.k0_stop = 10.0;
  const auto traj = integrate(s, io);
  std::stringstream buf;
  write_trajectory(buf, traj, j1);
  const auto back = read_trajectory(buf);
  bool traj_ok = back.trajectory.snapshots.size() == traj.snapshots.size();
  for (size_t i = 0; traj_ok && i < traj.snapshots.size(); ++i) {
    traj_ok = back.trajectory.snapshots[i].t() == traj.snapshots[i].t() &&
              back.trajectory.intervals[i] == traj.intervals[i] &&
              max_rel_diff(back.trajectory.snapshots[i], traj.snapshots[i]) == 0.0;
  }
  const bool pass = grid <= 1e-13 && rescale <= 1e-12 && config_ok && traj_ok;
  return {"round trips (grid, rescaling, config, trajectory file)", pass,
          "grid " + sci(grid) + ", rescale " + sci(rescale) + ", config " + (config_ok ? "ok" : "differs") +
              ", trajectory " + (traj_ok ? "ok" : "differs")};
}

CheckResult trapping_regression(const VerifyOptions&) {
  FlowParams fp(1, 2.0, 12);
  const double c = select_c(fp).value;
  bool pass = true;
  double min_margin = INFINITY;
  for (double delta : {0.001, 0.005}) {
    auto s = SpectralState::constant(fp, 1.0);
    s.set_mode(1, delta / 2.0);
    IntegrateOptions io;
    io.trap_constant = c;
    const auto traj = integrate(s, io);
    const auto cert = certify(traj, c);
    pass = pass && cert.holds() && !traj.has_event(EventKind::trap_violation) &&
           traj.snapshots.back().mean() >= io.control.k0_stop;
    min_margin = std::min(min_margin, cert.min_margin());
  }
  return {"trapping regression (p=1, lambda=2, c=256)", pass, "min margin " + sci(min_margin)};
}

}  // namespace

unsigned thread_count_from_env() {
  const char* env = std::getenv("PCSF_THREADS");
  if (!env) return 1;
  const long n = std::strtol(env, nullptr, 10);
  return n >= 1 ? static_cast<unsigned>(n) : 1;
}

std::vector<CheckResult> run_verify(const VerifyOptions& options) {
  const std::vector<std::function<CheckResult(const VerifyOptions&)>> checks{
      oracle_equivalence, diagonal_split, constant_exactness, round_trips, trapping_regression};
  auto timed = [&](size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = checks[i](options);
    } catch (const std::exception& e) {
      r = {"check " + std::to_string(i), false, std::string("threw: ") + e.what()};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  };
  std::vector<CheckResult> results(checks.size());
  const size_t width = std::max(1u, options.threads);
  for (size_t start = 0; start < checks.size(); start += width) {
    std::vector<std::future<CheckResult>> batch;
    for (size_t i = start; i < std::min(checks.size(), start + width); ++i) {
      batch.push_back(std::async(width == 1 ? std::launch::deferred : std::launch::async, timed, i));
    }
    for (size_t i = 0; i < batch.size(); ++i) results[start + i] = batch[i].get();
  }
  return results;
}

int cmd_verify(const VerifyOptions& options, std::ostream& out) {
  const auto results = run_verify(options);
  bool all = true;
  for (const auto& r : results) {
    char head[96];
    std::snprintf(head, sizeof head, "%-4s %-56s %7.2fs  ", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.seconds);
    out << head << r.detail << '\n';
    all = all && r.pass;
  }
  out << (all ? "all checks passed" : "some checks failed") << '\n';
  return all ? 0 : 1;
}

}  // namespace pcsf::app
