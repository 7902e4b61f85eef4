#pragma once

#include <string>

#include "apstab/analysis.hpp"
#include "apstab/integrator.hpp"

namespace apstab {

/// Trajectory CSV: header "t,u_1,...,u_n,du_1,...,du_n", one row per sample,
/// values printed with %.17g so a round-trip is bit-exact.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory_csv(const std::string& path);

/// Distance-series CSV: header "t,distance".
void write_distance_csv(const DistanceSeries& series, const std::string& path);

}  // namespace apstab
