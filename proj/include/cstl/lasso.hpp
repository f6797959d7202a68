#pragma once

#include "cstl/dataset.hpp"

#include <cstdint>
#include <vector>

namespace cstl {

/**
 * Free parameters of the coordinate-descent Lasso.
 *
 * The loss convention is (1/n)||y - Xb||^2 + lambda * ||b||_1. An empty
 * `lambda_grid` means "use the default grid": `n_lambda` log-spaced values from
 * lambda_max = (2/n)||X^T y||_inf down to `lambda_min_ratio * lambda_max`.
 */
struct LassoConfig {
  std::vector<double> lambda_grid;
  int n_folds = 5;
  int max_iter = 10000;  //!< maximum number of full coordinate sweeps
  double tol = 1e-7;     //!< convergence threshold on the largest coordinate change
  std::uint64_t seed = 1;
  bool standardize = false;
  int n_lambda = 50;
  double lambda_min_ratio = 1e-3;
};

struct LassoFit {
  CoefficientVector coef;
  double lambda = 0.0;
  bool converged = false;
  int sweeps = 0;
};

struct LassoCvResult {
  LassoFit fit;
  double chosen_lambda = 0.0;
  std::vector<double> lambda_grid;  //!< grid actually searched (descending)
  std::vector<double> cv_error;     //!< mean held-out squared error per grid value
};

//! (2/n)||X^T y||_inf, the smallest lambda with an all-zero solution.
double lasso_lambda_max(const Dataset& ds);

//! Descending log-spaced grid from lambda_max.
std::vector<double> lasso_default_grid(const Dataset& ds, int n_lambda, double min_ratio);

/// Cyclic coordinate descent for (1/n)||y - Xb||^2 + lambda ||b||_1.
///
/// Stops once the largest coordinate change in a sweep is at most `cfg.tol`.
/// When `cfg.max_iter` sweeps are exhausted the fit is returned with
/// `converged == false`. lambda = 0 is accepted and yields least squares when X
/// has full column rank.
LassoFit lasso_fit(const Dataset& ds, double lambda, const LassoConfig& cfg = {});

//! Same as lasso_fit but starts from `start` (length d, original scale).
LassoFit lasso_fit(const Dataset& ds, double lambda, const LassoConfig& cfg, const Vector& start);

/// k-fold cross-validation over the lambda grid. Fold membership is a
/// seed-determined shuffle. Returns the full-data fit at the lambda with the
/// smallest mean held-out error (ties go to the larger lambda).
LassoCvResult lasso_cv(const Dataset& ds, const LassoConfig& cfg = {});

}  // namespace cstl
