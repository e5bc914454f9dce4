#include "pcsf_app/trajectory_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "pcsf/errors.hpp"
#include "pcsf_app/config.hpp"

namespace pcsf::app {

using nlohmann::json;

namespace {

std::string flow_name(Flow f) { return f == Flow::normalized ? "normalized" : "unnormalized"; }

json snapshot_record(const SpectralState& s, double interval) {
  json coeffs = json::array();
  for (const auto& c : s.coeffs()) coeffs.push_back({c.real(), c.imag()});
  return {{"t", s.t()}, {"dt", interval}, {"k0", s.mean()}, {"coeffs", coeffs}};
}

}  // namespace

void write_trajectory(std::ostream& out, const Trajectory& traj, const json& config) {
  json header = {{"format", kTrajectoryFormat},
                 {"version", kTrajectoryVersion},
                 {"flow", flow_name(traj.flow)},
                 {"params", params_to_json(traj.params)},
                 {"config", config}};
  out << header.dump() << '\n';
  for (size_t i = 0; i < traj.snapshots.size(); ++i) {
    out << snapshot_record(traj.snapshots[i], traj.intervals[i]).dump() << '\n';
  }
  json events = json::array();
  for (const auto& e : traj.events) {
    events.push_back({{"time", e.time}, {"kind", to_string(e.kind)}, {"detail", e.detail}});
  }
  json trailer = {{"events", events}};
  trailer["T_est"] = traj.T_est ? json(*traj.T_est) : json(nullptr);
  trailer["T_tail"] = traj.T_tail ? json(*traj.T_tail) : json(nullptr);
  out << trailer.dump() << '\n';
}

void write_trajectory_file(const std::string& path, const Trajectory& traj, const json& config) {
  std::ofstream out(path);
  if (!out) throw TrajectoryFileError(path + ": cannot open for writing");
  write_trajectory(out, traj, config);
  if (!out) throw TrajectoryFileError(path + ": write failed");
}

TrajectoryFile read_trajectory(std::istream& in) {
  std::string line;
  size_t line_no = 0;
  auto parse = [&](const std::string& text) {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw TrajectoryFileError("line " + std::to_string(line_no) + ": " + e.what());
    }
  };
  if (!std::getline(in, line)) throw TrajectoryFileError("empty trajectory file");
  ++line_no;
  const json header = parse(line);
  if (!header.is_object() || header.value("format", "") != kTrajectoryFormat) {
    throw VersionError("not a pcsf trajectory (missing format tag)");
  }
  if (!header.contains("version") || !header.at("version").is_number_integer()) {
    throw VersionError("trajectory header lacks a version");
  }
  const int version = header.at("version").get<int>();
  if (version != kTrajectoryVersion) {
    throw VersionError("trajectory version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(kTrajectoryVersion) + ")");
  }

  TrajectoryFile file{Trajectory{params_from_json(header.at("params")), Flow::unnormalized, {}, {}, {}, {}, {}},
                      header.value("config", json(nullptr))};
  auto& traj = file.trajectory;
  const std::string flow = header.value("flow", "unnormalized");
  if (flow == "normalized") {
    traj.flow = Flow::normalized;
  } else if (flow != "unnormalized") {
    throw TrajectoryFileError("unknown flow \"" + flow + "\"");
  }

  bool trailer_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (trailer_seen) throw TrajectoryFileError("line " + std::to_string(line_no) + ": record after trailer");
    const json rec = parse(line);
    try {
      if (rec.contains("coeffs")) {
        const auto& cs = rec.at("coeffs");
        std::vector<Complex> coeffs;
        coeffs.reserve(cs.size());
        for (const auto& c : cs) coeffs.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
        const double t = rec.at("t").get<double>();
        if (!traj.snapshots.empty() && t < traj.snapshots.back().t()) {
          throw TrajectoryFileError("line " + std::to_string(line_no) + ": snapshots out of time order");
        }
        traj.append(SpectralState(traj.params, std::move(coeffs), t), rec.at("dt").get<double>());
      } else if (rec.contains("events")) {
        for (const auto& e : rec.at("events")) {
          const auto kind = event_kind_from_string(e.at("kind").get<std::string>());
          if (!kind) throw TrajectoryFileError("line " + std::to_string(line_no) + ": unknown event kind");
          traj.events.push_back({e.at("time").get<double>(), *kind, e.value("detail", "")});
        }
        if (rec.contains("T_est") && !rec.at("T_est").is_null()) traj.T_est = rec.at("T_est").get<double>();
        if (rec.contains("T_tail") && !rec.at("T_tail").is_null()) traj.T_tail = rec.at("T_tail").get<double>();
        trailer_seen = true;
      } else {
        throw TrajectoryFileError("line " + std::to_string(line_no) + ": unrecognised record");
      }
    } catch (const json::exception& e) {
      throw TrajectoryFileError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw TrajectoryFileError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (traj.snapshots.empty()) throw TrajectoryFileError("trajectory has no snapshots");
  return file;
}

TrajectoryFile read_trajectory_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TrajectoryFileError(path + ": cannot open");
  return read_trajectory(in);
}

}  // namespace pcsf::app
