#pragma once

#include "kinvar/linear.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace kinvar {

/// 17 significant digits with a dot decimal separator, independent of locale.
std::string format_double(double x);

/// Header `t,<species...>`, one row per grid point.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

/// Column-major table with a header row.
void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& columns);

} // namespace kinvar
