#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tsl/core.hpp"

namespace tsl::harness {

/// Cold-start report (origin = checkpoint 0) and, when a warm-start index is
/// given, the warm report (origin = that checkpoint). Both use the final
/// checkpoint as the endpoint; W2 is the Dirac (L2) cost, entropy the loss
/// drop, path_length the polygonal chord sum (a lower bound on the continuous
/// arc length).
struct TrajectoryAnalysis {
  SpeedLimitReport cold;
  std::optional<SpeedLimitReport> warm;
};

TrajectoryAnalysis analyze_trajectory(
    const Trajectory& traj, std::optional<std::size_t> warm_start_index = {});

/// Plot data for one weight triplet: rows (t, w_i, w_j, w_k).
struct TripletTrace {
  std::array<std::size_t, 3> indices{};
  std::vector<std::array<double, 4>> rows;
};

TripletTrace weight_triplet_trace(const Trajectory& traj,
                                  const std::array<std::size_t, 3>& indices);

/// Tab-separated plot table with a commented header naming columns and units.
struct PlotTable {
  std::vector<std::string> columns;  // "name[unit]"
  std::vector<std::vector<double>> rows;
};

/// Writes the table with deterministic 17-significant-digit formatting.
void emit_plot_data(const PlotTable& table, const std::string& path);

}  // namespace tsl::harness
