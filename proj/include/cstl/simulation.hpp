#pragma once

#include "cstl/dataset.hpp"
#include "cstl/transfer_structure.hpp"
#include "cstl/tuning.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace cstl {

enum class Setting { S1, S2, S3_noperm, S3_perm, S4, EX1, EX2 };

std::string to_string(Setting s);
Setting parse_setting(const std::string& name);

/**
 * One simulation design.
 *
 * `d_s == 0` means "same as d_t" (required for S1-S3). EX1/EX2 ignore the
 * dimensions and covariance and always use d = 3 with identity covariance.
 */
struct ScenarioSpec {
  Setting setting = Setting::S1;
  int n_t = 100;
  int n_s = 200;
  int d_t = 100;
  int d_s = 0;
  int m = 0;         //!< number of moved support entries (S1, S2)
  double h = 0.0;    //!< heterogeneity strength (S3)
  std::uint64_t seed = 20240601;
  int replicates = 20;
  double covariance_rho = 0.5;
  int n_test = 100;

  int source_dim() const;
  //! Throws InvalidInput on illegal parameters; returns warnings for legal but unusual ones.
  std::vector<std::string> validate() const;
};

struct ScenarioInstance {
  CoefficientVector beta_true;
  CoefficientVector theta_true;
  Dataset target;
  Dataset source;
  Dataset test;
  TransferStructure structure;
};

//! Stream seed for replicate `rep` of a study seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t rep);

/// n x d matrix whose rows are zero-mean Gaussian with covariance rho^{|j1 - j2|},
/// generated by x_1 = xi_1, x_j = rho x_{j-1} + sqrt(1 - rho^2) xi_j.
Matrix gen_ar1_gaussian(int n, int d, double rho, std::mt19937_64& rng);
Matrix gen_ar1_gaussian(int n, int d, double rho, std::uint64_t seed);

//! True coefficients, training data for both domains and a target test set for replicate `rep`.
ScenarioInstance make_scenario(const ScenarioSpec& spec, int rep);

enum class Method { lasso, cstl, oracle };
std::string to_string(Method m);
Method parse_method(const std::string& name);

struct ReplicateRecord {
  Method method = Method::lasso;
  int replicate = 0;
  double sse = 0.0;
  double mse = 0.0;
  double lambda0 = 0.0;  //!< NaN when not applicable
  double lambda1 = 0.0;  //!< NaN when not applicable
  int iterations = 0;
  bool converged = true;
  bool failed = false;
  std::string error;
  Vector beta_hat;
  Vector theta_hat;  //!< empty for lasso
};

struct MethodSummary {
  Method method = Method::lasso;
  int n = 0;
  int failures = 0;
  double sse_mean = 0.0;
  double sse_stderr = 0.0;
  double mse_mean = 0.0;
  double mse_stderr = 0.0;
};

struct ReplicationResults {
  std::vector<ReplicateRecord> rows;  //!< ordered by (replicate, method)
  std::vector<MethodSummary> summaries;
  std::vector<std::string> warnings;
};

struct HarnessOptions {
  CstlOptions cstl;
  std::optional<TuningGrid> grid;  //!< default: TuningGrid::scaled_default(d_t, n_t)
  int threads = 0;                 //!< 0 = hardware concurrency
  bool keep_estimates = true;
};

//! Grid used when none is configured.
TuningGrid default_grid_for(const ScenarioSpec& spec);

/// Runs every method on replicates 1..spec.replicates. Replicates run in
/// parallel; rows are merged in replicate order so output does not depend on
/// scheduling. A failing method is recorded and the run continues; if 20% or
/// more replicates have a failure the run throws.
ReplicationResults run_replications(const ScenarioSpec& spec, const std::vector<Method>& methods,
                                    const HarnessOptions& opts = {});

std::vector<MethodSummary> summarise(const std::vector<ReplicateRecord>& rows, const std::vector<Method>& methods);

struct PairwiseSummary {
  PairMatrix mean_abs_diff;  //!< replicate mean of |beta_hat_j - theta_hat_l|
  PairMatrix true_abs_diff;  //!< |beta*_j - theta*_l|
};

PairwiseSummary pairwise_difference_summary(const std::vector<FitResult>& fits, const ScenarioInstance& truth);

//! Runs `fn(i)` for i in [0, count) on up to `threads` workers.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace cstl
