#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pcsf_app/config.hpp"
#include "pcsf_app/trajectory_io.hpp"

namespace pcsf::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitPositivity = 2,
  kExitTrap = 3,
  kExitVersion = 4,
  kExitNotRational = 5,
  kExitStepFloor = 6,
};

/// Exit code for the stop reason of a run.
int exit_code_for(const Trajectory& traj);

/// Integrate the configured run, then write trajectory.jsonl and metrics.csv
/// (as selected by output.formats) into out_dir.
int cmd_simulate(const RunConfig& config, const std::string& out_dir, std::ostream& log);

/// Rows of the metrics table: t, k0, T_est_running, trap_margin, seminorm2, sup_dev.
std::string metrics_csv(const Trajectory& traj, double c);

/// Structured report for what in {rates, trap, blowup, normalized}.
/// Throws AnalysisError when the trajectory cannot support the analysis.
nlohmann::json analyze_report(const TrajectoryFile& file, const std::string& what);

int cmd_analyze(const std::string& traj_path, const std::string& what,
                const std::optional<std::string>& out_dir, std::ostream& out, std::ostream& err);

struct RenderOptions {
  int frames = 6;
  bool normalized = false;
  /// Reconstruction samples per frame; 0 picks 1024 m.
  int samples = 0;
};

/// Frames picked from a trajectory and reconstructed as curves.
std::vector<RenderFrame> render_frames(const TrajectoryFile& file, const RenderOptions& options);

int cmd_render(const std::string& traj_path, const RenderOptions& options,
               const std::string& out_dir, std::ostream& out, std::ostream& err);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 20240601;
  int states_per_case = 200;
  /// Replace the tuple weight by its negative (the oracle check must then fail).
  bool mutate_kernel = false;
  unsigned threads = 1;
};

std::vector<CheckResult> run_verify(const VerifyOptions& options);
int cmd_verify(const VerifyOptions& options, std::ostream& out);

/// Wall-clock nanoseconds per call, repeating until min_seconds have elapsed.
double time_per_eval(const std::function<void()>& fn, double min_seconds);

struct ScalingPoint {
  int n_max = 0;
  double ns_per_eval = 0.0;
};

struct ScalingSeries {
  std::string kind;
  int p = 1;
  std::vector<ScalingPoint> points;
  /// Log-log slope of cost against n_max.
  double exponent = 0.0;
};

/// kind in {fast, convolution, direct}.
ScalingSeries measure_scaling(const std::string& kind, int p, const std::vector<int>& n_values,
                              double min_seconds, std::uint64_t seed);

struct BenchOptions {
  double min_seconds = 0.05;
  std::uint64_t seed = 20240601;
};

int cmd_bench(const BenchOptions& options, std::ostream& out);

/// PCSF_THREADS, defaulting to 1.
unsigned thread_count_from_env();

/// Hermitian state with mean 1 inside the trap region of constant c.
SpectralState random_trapped_state(const FlowParams& params, double c, std::uint64_t seed);

}  // namespace pcsf::app
