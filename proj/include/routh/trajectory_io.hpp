#pragma once

#include "routh/integrate.hpp"

#include <string>
#include <vector>

namespace routh {

/// CSV trajectory: '#' metadata lines, a header row, then t and the state
/// components with 17 significant digits.
struct TrajectoryFile {
  Trajectory traj;
  std::vector<std::string> columns;  // state columns, without "t"
};

/// Writes through a temporary file and renames it into place.
void write_trajectory(const std::string& path, const Trajectory& traj,
                      const std::vector<std::string>& columns);

/// Throws Config on unreadable or malformed files.
TrajectoryFile read_trajectory(const std::string& path);

}  // namespace routh
