#pragma once

#include "cstl/run_config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace cstl {

struct CommandOutcome {
  std::vector<std::filesystem::path> artifacts;  //!< files written, manifest first
  std::vector<std::string> messages;             //!< human-readable summary and warnings
};

/**
 * Executes one configured command and writes its artifacts under `cfg.out`.
 *
 * - simulate: results.csv, summary.csv
 * - fit: coefficients.csv, pairwise_diff.csv, fit_summary.csv, and with
 *   split-fraction > 0 also split_results.csv and split_summary.csv
 * - oracle: oracle_coefficients.csv, shared_values.csv, oracle_summary.csv
 * - tune: bic_surface.csv, one row per (lambda0, lambda1)
 *
 * Every command also writes manifest.txt, which replays the run via `--config`.
 * Configuration problems throw ConfigError before anything is written.
 */
CommandOutcome run_command(const RunConfig& cfg);

}  // namespace cstl
