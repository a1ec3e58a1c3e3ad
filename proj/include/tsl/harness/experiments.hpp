#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsl/harness/config.hpp"

namespace tsl::harness {

enum class ExperimentKind {
  ntk_scaling,
  ntk_inefficiency,
  linreg_finite,
  linreg_asymptotic,
  langevin_sim,
  analyze_trajectory,
};

const char* kind_name(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::ntk_scaling;
  KeyValueDoc parameters;
  std::string output_dir;
  std::uint64_t seed = 0;
  // analyze-only extras, fed from the CLI flags
  std::optional<std::size_t> warm_start_index;
  std::vector<std::array<std::size_t, 3>> triplets;

  /// Kind-specific required keys present and in range; throws ConfigError
  /// before any computation otherwise.
  void validate() const;
};

/// Dispatches to the owning module and writes the plot-data files plus one
/// summary.txt echoing config, version, and every report field. Re-running
/// with identical config and seed produces byte-identical outputs.
void run_experiment(const ExperimentConfig& cfg);

}  // namespace tsl::harness
