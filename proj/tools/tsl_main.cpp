// Command-line entry point: thermodynamic speed limits of learning dynamics.
//
// Subcommands run one experiment each and write TSV plot data plus a
// summary.txt into --out. Exit codes: 0 success, 2 config validation,
// 3 numerical failure, 4 I/O.

#include <CLI11.hpp>
#include <array>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "tsl/errors.hpp"
#include "tsl/harness/experiments.hpp"

namespace {

std::vector<std::array<std::size_t, 3>> parse_triplets(const std::string& raw) {
  std::vector<std::array<std::size_t, 3>> out;
  if (raw.empty()) return out;
  std::size_t start = 0;
  while (start <= raw.size()) {
    const std::size_t end = raw.find(';', start);
    const std::string group =
        raw.substr(start, end == std::string::npos ? std::string::npos : end - start);
    if (!group.empty()) {
      std::vector<std::size_t> indices;
      std::size_t pos = 0;
      while (pos <= group.size()) {
        const std::size_t comma = group.find(',', pos);
        const std::string tok = group.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
          std::size_t used = 0;
          const long long v = std::stoll(tok, &used);
          if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
          indices.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
          throw tsl::ConfigError("--triplets: `" + tok + "` is not a valid index");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      if (indices.size() != 3) {
        throw tsl::ConfigError(
            "--triplets: each group must name exactly 3 indices, got `" + group +
            "`");
      }
      out.push_back({indices[0], indices[1], indices[2]});
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thermodynamic speed limits of learning dynamics"};
  app.require_subcommand(1);

  struct SubSpec {
    const char* name;
    const char* description;
    tsl::harness::ExperimentKind kind;
  };
  const SubSpec specs[] = {
      {"ntk-scaling", "power-law NTK sweep: W2, entropy, T_SL, lengths, slopes",
       tsl::harness::ExperimentKind::ntk_scaling},
      {"ntk-inefficiency", "T_SL(t)/t ratio sweep for an NTK spectrum",
       tsl::harness::ExperimentKind::ntk_inefficiency},
      {"linreg-finite", "finite-dimensional ridge-regression speed limit",
       tsl::harness::ExperimentKind::linreg_finite},
      {"linreg-asymptotic", "Marchenko-Pastur asymptotic speed limit sweep",
       tsl::harness::ExperimentKind::linreg_asymptotic},
      {"langevin-sim", "Langevin ensemble on a quadratic potential vs exact law",
       tsl::harness::ExperimentKind::langevin_sim},
      {"analyze", "speed-limit analysis of an ingested trajectory archive",
       tsl::harness::ExperimentKind::analyze_trajectory},
  };

  std::string config_path, out_dir, triplets_raw;
  long long seed = 0;
  long long warm_start = -1;
  tsl::harness::ExperimentKind selected{};

  for (const auto& spec : specs) {
    auto* sub = app.add_subcommand(spec.name, spec.description);
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--seed", seed, "base random seed");
    if (spec.kind == tsl::harness::ExperimentKind::analyze_trajectory) {
      sub->add_option("--warm-start", warm_start, "warm-start checkpoint index");
      sub->add_option("--triplets", triplets_raw,
                      "weight triplets to trace, e.g. \"0,1,2;3,4,5\"");
    }
    sub->callback([&selected, kind = spec.kind]() { selected = kind; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    tsl::harness::ExperimentConfig cfg;
    cfg.kind = selected;
    cfg.parameters = tsl::harness::KeyValueDoc::parse_file(config_path);
    cfg.output_dir = out_dir;
    cfg.seed = static_cast<std::uint64_t>(seed);
    if (warm_start >= 0) {
      cfg.warm_start_index = static_cast<std::size_t>(warm_start);
    }
    cfg.triplets = parse_triplets(triplets_raw);
    tsl::harness::run_experiment(cfg);
    return 0;
  } catch (const tsl::ConfigError& e) {
    std::fprintf(stderr, "tsl: config error: %s\n", e.what());
    return 2;
  } catch (const tsl::IoError& e) {
    std::fprintf(stderr, "tsl: i/o error: %s\n", e.what());
    return 4;
  } catch (const tsl::Error& e) {
    std::fprintf(stderr, "tsl: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "tsl: %s\n", e.what());
    return 3;
  }
}
