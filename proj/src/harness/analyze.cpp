#include "tsl/harness/analyze.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "tsl/harness/config.hpp"

namespace tsl::harness {

namespace {

SpeedLimitReport segment_report(const Trajectory& traj, std::size_t origin) {
  const std::size_t last = traj.checkpoints() - 1;
  SpeedLimitReport report;
  report.horizon_T = traj.times[last] - traj.times[origin];
  const Vector displacement = traj.weights[last] - traj.weights[origin];
  report.w2_sq = displacement.squaredNorm();
  report.entropy = traj.losses[origin] - traj.losses[last];

  double path = 0.0;
  for (std::size_t i = origin; i < last; ++i) {
    path += (traj.weights[i + 1] - traj.weights[i]).norm();
  }
  report.path_length = path;
  const double geo = std::sqrt(report.w2_sq);
  report.geo_length = geo;
  if (geo > 0.0) report.length_ratio = path / geo;

  if (report.entropy < 0.0 || (report.entropy == 0.0 && report.w2_sq > 0.0)) {
    // loss did not decrease over the segment: no admissible bound
    report.entropy_error = true;
    return report;
  }
  if (report.w2_sq == 0.0) {
    report.t_sl = 0.0;
    return report;
  }
  report.t_sl = report.w2_sq / report.entropy;
  report.inefficiency = report.horizon_T / *report.t_sl;
  report.sub_unity_inefficiency = *report.inefficiency < 1.0;
  return report;
}

}  // namespace

TrajectoryAnalysis analyze_trajectory(const Trajectory& traj,
                                      std::optional<std::size_t> warm_start_index) {
  traj.validate();
  if (traj.checkpoints() < 2) {
    throw ValidationError("analyze_trajectory: need at least 2 checkpoints");
  }
  if (warm_start_index && *warm_start_index >= traj.checkpoints()) {
    std::ostringstream msg;
    msg << "analyze_trajectory: warm start index " << *warm_start_index
        << " out of range (checkpoints: " << traj.checkpoints() << ")";
    throw ValidationError(msg.str());
  }
  TrajectoryAnalysis analysis;
  analysis.cold = segment_report(traj, 0);
  if (warm_start_index) {
    analysis.warm = segment_report(traj, *warm_start_index);
  }
  return analysis;
}

TripletTrace weight_triplet_trace(const Trajectory& traj,
                                  const std::array<std::size_t, 3>& indices) {
  traj.validate();
  const auto d = static_cast<std::size_t>(traj.dim());
  for (std::size_t idx : indices) {
    if (idx >= d) {
      std::ostringstream msg;
      msg << "weight_triplet_trace: index " << idx << " out of range (d = " << d
          << ")";
      throw ValidationError(msg.str());
    }
  }
  TripletTrace trace;
  trace.indices = indices;
  trace.rows.reserve(traj.checkpoints());
  for (std::size_t i = 0; i < traj.checkpoints(); ++i) {
    const auto& w = traj.weights[i];
    trace.rows.push_back({traj.times[i],
                          w[static_cast<Eigen::Index>(indices[0])],
                          w[static_cast<Eigen::Index>(indices[1])],
                          w[static_cast<Eigen::Index>(indices[2])]});
  }
  return trace;
}

void emit_plot_data(const PlotTable& table, const std::string& path) {
  if (table.rows.empty()) {
    throw ValidationError("emit_plot_data: empty series");
  }
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw ValidationError("emit_plot_data: row width does not match columns");
    }
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("emit_plot_data: cannot write " + path);
  }
  out << "#";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c == 0 ? " " : "\t") << table.columns[c];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << "\t";
      out << format_double(row[c]);
    }
    out << "\n";
  }
  if (!out) {
    throw IoError("emit_plot_data: write failure on " + path);
  }
}

}  // namespace tsl::harness
