#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "pcsf/integrator.hpp"

namespace pcsf::app {

inline constexpr const char* kTrajectoryFormat = "pcsf-trajectory";
inline constexpr int kTrajectoryVersion = 1;

/// The file declares a format or version this build does not read.
class VersionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unreadable trajectory file.
class TrajectoryFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrajectoryFile {
  Trajectory trajectory;
  /// Config echo from the header (null when absent).
  nlohmann::json config;
};

/// JSON-lines: header, one record per snapshot, trailing summary record.
void write_trajectory(std::ostream& out, const Trajectory& traj, const nlohmann::json& config);
void write_trajectory_file(const std::string& path, const Trajectory& traj,
                           const nlohmann::json& config);

TrajectoryFile read_trajectory(std::istream& in);
TrajectoryFile read_trajectory_file(const std::string& path);

}  // namespace pcsf::app
