#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "pcsf/blowup.hpp"
#include "pcsf/errors.hpp"
#include "pcsf/normalization.hpp"
#include "pcsf_app/commands.hpp"

namespace pcsf::app {

namespace {

std::string label(const char* name, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s = %.6g", name, value);
  return buf;
}

// Indices whose key is nearest to evenly spaced targets between the first and
// last key (keys increasing); repeated picks are dropped.
std::vector<size_t> pick_frames(const std::vector<double>& keys, int count) {
  std::vector<size_t> picks;
  const double lo = keys.front(), hi = keys.back();
  for (int i = 0; i < count; ++i) {
    const double target = count == 1 ? hi : lo + (hi - lo) * i / (count - 1);
    size_t best = 0;
    for (size_t j = 1; j < keys.size(); ++j) {
      if (std::abs(keys[j] - target) < std::abs(keys[best] - target)) best = j;
    }
    if (picks.empty() || picks.back() != best) picks.push_back(best);
  }
  return picks;
}

}  // namespace

std::vector<RenderFrame> render_frames(const TrajectoryFile& file, const RenderOptions& options) {
  const auto& traj = file.trajectory;
  const auto& ratio = traj.params.ratio();
  if (!ratio) throw DomainError("rendering needs a rational lambda = n/m");
  const int m = ratio->den;
  const int count = std::max(1, options.frames);

  std::vector<double> keys;
  std::vector<SpectralState> states;
  std::vector<std::string> labels;
  if (traj.flow == Flow::normalized) {
    for (const auto& s : traj.snapshots) {
      keys.push_back(s.t());
      states.push_back(s);
      labels.push_back(label("tau", s.t()));
    }
  } else if (options.normalized) {
    const auto est = estimate_T(traj);
    const auto gaps = time_to_blowup(traj, est);
    for (size_t i = 0; i < traj.snapshots.size(); ++i) {
      const auto u = rescale_by_gap(traj.snapshots[i], gaps[i], est.T);
      keys.push_back(u.t());
      labels.push_back(label("tau", u.t()));
      states.push_back(u);
    }
  } else {
    std::optional<BlowupEstimate> est;
    try {
      est = estimate_T(traj);
    } catch (const AnalysisError&) {
    }
    const auto gaps = est ? time_to_blowup(traj, *est) : std::vector<double>{};
    for (size_t i = 0; i < traj.snapshots.size(); ++i) {
      const auto& s = traj.snapshots[i];
      keys.push_back(est ? -std::log(gaps[i]) : s.t());
      labels.push_back(label("t", s.t()) + (est ? ", " + label("T-t", gaps[i]) : std::string()));
      states.push_back(s);
    }
  }

  std::vector<RenderFrame> frames;
  for (size_t i : pick_frames(keys, count)) {
    frames.push_back({reconstruct_curve(states[i], m, options.samples), labels[i]});
  }
  return frames;
}

int cmd_render(const std::string& traj_path, const RenderOptions& options, const std::string& out_dir,
               std::ostream& out, std::ostream& err) {
  std::optional<TrajectoryFile> file;
  try {
    file.emplace(read_trajectory_file(traj_path));
  } catch (const VersionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitVersion;
  }
  if (!file->trajectory.params.ratio()) {
    err << "error: lambda = " << file->trajectory.params.lambda()
        << " is not a ratio n/m; curves need the winding number m\n";
    return kExitNotRational;
  }
  const auto frames = render_frames(*file, options);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw std::runtime_error(path.string() + ": write failed");
  };
  write(dir / "frames.svg", render_svg(frames));
  nlohmann::json summary = nlohmann::json::array();
  for (size_t i = 0; i < frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03zu.csv", i);
    write(dir / name, render_csv(frames[i].curve));
    const auto& c = frames[i].curve;
    summary.push_back({{"file", name},
                       {"label", frames[i].label},
                       {"closure_residual", c.closure_residual},
                       {"relative_closure", c.closure_residual / c.diameter()},
                       {"hausdorff_to_circle", hausdorff_to_circle(c)}});
  }
  out << nlohmann::json{{"frames", summary}}.dump(2) << '\n';
  return kExitOk;
}

}  // namespace pcsf::app
