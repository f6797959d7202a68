#pragma once

#include "cstl/admm.hpp"
#include "cstl/lasso.hpp"
#include "cstl/scad_weights.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cstl {

inline constexpr double kDefaultEpsFuse = 1e-4;

//! Candidate (lambda0, lambda1) values, both sorted descending.
struct TuningGrid {
  std::vector<double> lambda0;
  std::vector<double> lambda1;
  double eps_fuse = kDefaultEpsFuse;

  /// `count` log-spaced values in [lo, hi] * sqrt(log d_t / n_t) for both lambdas.
  static TuningGrid scaled_default(int d_t, int n_t, int count = 10, double lo = 0.5, double hi = 5.0);

  void validate() const;
};

//! Everything the CSTL pipeline needs besides data and grid.
struct CstlOptions {
  double rho0 = 1.0;
  double rho1 = 0.1;
  double scad_a = kDefaultScadA;
  int max_iter = 5000;
  double eps_abs = 1e-5;
  bool warm_start = true;  //!< chain ADMM states along the grid
  /// Append one standard normal column (true coefficient zero) to the target
  /// design before fitting and drop it from the reported estimate. When every
  /// target coefficient is active, nothing else penalises theta directly.
  bool augment_noise = false;
  std::uint64_t noise_seed = 7;
  LassoConfig lasso;
};

//! One evaluated grid point.
struct GridPoint {
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double bic = 0.0;
  int df = 0;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  bool ok = false;
  std::string error;
};

struct FitResult {
  CoefficientVector beta;
  CoefficientVector theta;
  double objective = 0.0;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double bic = 0.0;
  int df = 0;
  int iterations = 0;
  bool converged = false;
  CoefficientVector beta_init;
  CoefficientVector theta_init;
  std::vector<GridPoint> surface;  //!< row-major over (lambda0, lambda1)
};

/// Number of distinct nonzero values in eta. Entries are sorted and chained
/// into clusters whenever consecutive gaps are <= eps_fuse; a cluster holding
/// any value with magnitude <= eps_fuse is the zero cluster and counts 0.
int degrees_of_freedom(const Vector& eta, double eps_fuse = kDefaultEpsFuse);

/// (N/2)[log(RSS_t/n_t) + log(RSS_s/n_s)] + df log N with N = n_t + n_s.
/// Throws NumericalError when a residual sum is zero.
double bic(const PooledSystem& ps, const Vector& beta, const Vector& theta, double eps_fuse = kDefaultEpsFuse);

//! Separate Lasso fits on each domain (cross-validated).
std::pair<LassoCvResult, LassoCvResult> initial_estimates(const Dataset& target, const Dataset& source,
                                                          const LassoConfig& cfg);

/// Full CSTL pipeline: Lasso initial estimates, then for every (lambda0,
/// lambda1) rebuild the SCAD weights, solve by ADMM and score by BIC. Returns
/// the BIC minimiser; ties favour larger lambda0, then larger lambda1.
FitResult grid_search_cstl(const Dataset& target, const Dataset& source, const TuningGrid& grid,
                           const CstlOptions& opts = {});

//! `ds` with one extra standard normal design column drawn from `seed`.
Dataset with_noise_column(const Dataset& ds, std::uint64_t seed);

//! Same as grid_search_cstl but with caller-supplied initial estimates.
FitResult grid_search_cstl(const Dataset& target, const Dataset& source, const TuningGrid& grid,
                           const CstlOptions& opts, const CoefficientVector& beta_init,
                           const CoefficientVector& theta_init);

}  // namespace cstl
