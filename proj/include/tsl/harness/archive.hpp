#pragma once

#include <optional>
#include <string>

#include "tsl/core.hpp"

namespace tsl::harness {

/// On-disk trajectory archive: a directory holding
///   manifest.txt  key/value document (dimension, checkpoints, time_unit,
///                 optional warm_start_index)
///   metrics.csv   header `time,loss` plus one row per checkpoint
///   weights.bin   magic bytes `TSLW0001` then checkpoints x dimension
///                 little-endian IEEE-754 doubles, row-major.
struct ArchiveInfo {
  std::string time_unit = "continuum";
  std::optional<std::size_t> warm_start_index;
};

/// Writes the three-file archive; weights/losses are bit-exact round-trips.
void write_trajectory_archive(const Trajectory& traj, const std::string& dir,
                              const ArchiveInfo& info = {});

/// Reads an archive back into a Trajectory (grad_sq absent: external runs
/// provide losses and weights only). Optionally reports the manifest info.
Trajectory ingest_trajectory(const std::string& dir,
                             ArchiveInfo* info_out = nullptr);

}  // namespace tsl::harness
