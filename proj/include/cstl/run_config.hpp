#pragma once

#include "cstl/simulation.hpp"
#include "cstl/tuning.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cstl {

enum class Command { simulate, fit, oracle, tune };
std::string to_string(Command c);
Command parse_command(const std::string& name);

//! A configuration problem; the message names the offending key.
class ConfigError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/**
 * Everything a CLI run needs.
 *
 * Keys mirror the command-line flags without the leading dashes, so a config
 * file line `lambda0-grid = 0.1, 0.2` and the flag `--lambda0-grid 0.1,0.2`
 * mean the same thing. Underscores are accepted in place of dashes.
 */
struct RunConfig {
  Command command = Command::simulate;

  std::optional<Setting> setting;  //!< turns `scenario` on
  ScenarioSpec scenario;           //!< n_t, n_s, d_t, d_s, m, h, replicates

  std::optional<std::filesystem::path> target_csv;
  std::optional<std::filesystem::path> source_csv;
  std::optional<std::filesystem::path> test_csv;
  std::optional<std::filesystem::path> beta_true;
  std::optional<std::filesystem::path> theta_true;
  std::optional<std::string> response;

  std::vector<double> lambda0_grid;  //!< empty: scaled default
  std::vector<double> lambda1_grid;
  double rho0 = 1.0;
  double rho1 = 0.1;
  double scad_a = kDefaultScadA;
  double eps_fuse = kDefaultEpsFuse;
  double eps_abs = 1e-5;
  int max_iter = 5000;
  bool standardize = false;
  bool augment_noise = false;  //!< fit/tune: add a zero-coefficient noise column to the target

  std::filesystem::path out = "cstl_out";
  std::uint64_t seed = 20240601;
  std::vector<Method> methods{Method::lasso, Method::cstl, Method::oracle};
  double split_fraction = 0.0;  //!< fit: > 0 enables the repeated train/holdout protocol
  int repeats = 100;
  int threads = 0;

  //! Scenario with the configured setting and seed, if a setting was given.
  std::optional<ScenarioSpec> scenario_spec() const;
  //! CSTL options assembled from the flat fields.
  CstlOptions cstl_options() const;
  //! Explicit grid if both lists are set, otherwise the scaled default for (d_t, n_t).
  TuningGrid grid_for(int d_t, int n_t) const;

  //! Checks per-command requirements; throws ConfigError naming the field.
  void validate() const;

  //! Canonical key/value listing; feeding it back through `apply` reproduces this config.
  std::vector<std::pair<std::string, std::string>> to_key_values() const;
};

//! Sets one key. Unknown keys and unparsable values throw ConfigError.
void apply(RunConfig& cfg, std::string key, const std::string& value);

//! Reads `key = value` lines; blank lines and `#` comments are skipped.
std::vector<std::pair<std::string, std::string>> read_key_values(const std::filesystem::path& path);

//! Manifest text: a version comment followed by `to_key_values()`.
std::string manifest_text(const RunConfig& cfg);

}  // namespace cstl
