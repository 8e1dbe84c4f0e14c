#ifndef VPMM_TRAJECTORY_IO_HPP
#define VPMM_TRAJECTORY_IO_HPP

#include <string>

#include "vpmm/diagnostics.hpp"
#include "vpmm/minimizing_movements.hpp"

namespace vpmm {

// CSV trajectory schema "vpmm-csv-1". Every numeric cell is a C hex-float,
// so a load reconstructs each double bit-exactly. Row 0 carries the initial
// state with zeroed increments.
void serialize_trajectory(const Trajectory& traj, const std::string& mode,
                          const std::string& path);
std::string trajectory_csv_text(const Trajectory& traj, const std::string& mode);

struct LoadedTrajectory {
  Trajectory traj;
  std::string mode;
};
LoadedTrajectory load_trajectory(const std::string& path);

// Run summary, schema "vpmm-json-1".
std::string summary_json_text(const Trajectory& traj, const std::string& mode);
void write_summary_json(const Trajectory& traj, const std::string& mode,
                        const std::string& path);

std::string diagnostics_json_text(const DiagnosticsReport& report);
void write_diagnostics_json(const DiagnosticsReport& report, const std::string& path);
std::string diagnostics_table_text(const DiagnosticsReport& report);

}  // namespace vpmm

#endif
