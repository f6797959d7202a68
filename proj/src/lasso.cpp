#include "cstl/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <random>

namespace cstl {

namespace {

double soft(double x, double tau) {
  if (x > tau) return x - tau;
  if (x < -tau) return x + tau;
  return 0.0;
}

Vector column_scales(const Matrix& x, bool standardize) {
  Vector s = Vector::Ones(x.cols());
  if (!standardize) return s;
  const double n = static_cast<double>(x.rows());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double rms = x.col(j).norm() / std::sqrt(n);
    s[j] = rms > 0.0 ? rms : 1.0;
  }
  return s;
}

// Coordinate descent on the (possibly rescaled) design; `b` is updated in place.
LassoFit run_cd(const Matrix& x, const Vector& y, double lambda, const LassoConfig& cfg, Vector b) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const double half_n_lambda = 0.5 * static_cast<double>(n) * lambda;
  Vector col_sq(d);
  for (Eigen::Index j = 0; j < d; ++j) col_sq[j] = x.col(j).squaredNorm();
  Vector resid = y - x * b;

  LassoFit fit;
  fit.lambda = lambda;
  for (int sweep = 1; sweep <= cfg.max_iter; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (col_sq[j] == 0.0) {
        b[j] = 0.0;
        continue;
      }
      const double old = b[j];
      const double rho = x.col(j).dot(resid) + col_sq[j] * old;
      const double updated = soft(rho, half_n_lambda) / col_sq[j];
      if (updated != old) {
        resid.noalias() -= (updated - old) * x.col(j);
        b[j] = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
    }
    fit.sweeps = sweep;
    if (max_change <= cfg.tol) {
      fit.converged = true;
      break;
    }
  }
  fit.coef = CoefficientVector(std::move(b), Domain::target);
  return fit;
}

}  // namespace

double lasso_lambda_max(const Dataset& ds) {
  if (ds.rows() == 0) return 0.0;
  return 2.0 / static_cast<double>(ds.rows()) * (ds.design.transpose() * ds.response).cwiseAbs().maxCoeff();
}

std::vector<double> lasso_default_grid(const Dataset& ds, int n_lambda, double min_ratio) {
  if (n_lambda < 1) throw InvalidInput("lasso grid needs at least one value");
  double top = lasso_lambda_max(ds);
  if (!(top > 0.0)) top = 1.0;
  std::vector<double> grid(static_cast<std::size_t>(n_lambda));
  if (n_lambda == 1) {
    grid[0] = top;
    return grid;
  }
  const double lo = std::log(top * min_ratio), hi = std::log(top);
  for (int k = 0; k < n_lambda; ++k) grid[k] = std::exp(hi + (lo - hi) * k / (n_lambda - 1));
  return grid;
}

LassoFit lasso_fit(const Dataset& ds, double lambda, const LassoConfig& cfg) {
  return lasso_fit(ds, lambda, cfg, Vector::Zero(ds.cols()));
}

LassoFit lasso_fit(const Dataset& ds, double lambda, const LassoConfig& cfg, const Vector& start) {
  require_valid(ds, "lasso_fit");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidInput("lasso lambda must be finite and >= 0");
  if (!(cfg.tol > 0.0)) throw InvalidInput("lasso tol must be > 0");
  if (start.size() != ds.cols()) throw InvalidInput("lasso warm start has wrong length");

  const Vector scale = column_scales(ds.design, cfg.standardize);
  LassoFit fit;
  if (cfg.standardize) {
    const Matrix xs = ds.design * scale.cwiseInverse().asDiagonal();
    fit = run_cd(xs, ds.response, lambda, cfg, start.cwiseProduct(scale));
    fit.coef.values = fit.coef.values.cwiseQuotient(scale);
  } else {
    fit = run_cd(ds.design, ds.response, lambda, cfg, start);
  }
  fit.coef.domain = ds.domain;
  return fit;
}

LassoCvResult lasso_cv(const Dataset& ds, const LassoConfig& cfg) {
  require_valid(ds, "lasso_cv");
  if (cfg.n_folds < 2) throw InvalidInput("lasso_cv needs n_folds >= 2");
  if (ds.rows() < cfg.n_folds)
    throw InvalidInput("lasso_cv: n_folds (" + std::to_string(cfg.n_folds) + ") exceeds sample size (" +
                       std::to_string(ds.rows()) + ")");

  LassoCvResult out;
  if (cfg.lambda_grid.empty()) {
    out.lambda_grid = lasso_default_grid(ds, cfg.n_lambda, cfg.lambda_min_ratio);
  } else {
    out.lambda_grid = cfg.lambda_grid;
    std::sort(out.lambda_grid.begin(), out.lambda_grid.end(), std::greater<>());
  }
  if (out.lambda_grid.empty()) throw InvalidInput("lasso_cv: lambda grid is empty");
  const std::size_t n_grid = out.lambda_grid.size();

  if (n_grid == 1) {
    out.chosen_lambda = out.lambda_grid[0];
    out.cv_error.assign(1, std::numeric_limits<double>::quiet_NaN());
    out.fit = lasso_fit(ds, out.chosen_lambda, cfg);
    return out;
  }

  const Eigen::Index n = ds.rows();
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  std::mt19937_64 rng(cfg.seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  out.cv_error.assign(n_grid, 0.0);
  for (int fold = 0; fold < cfg.n_folds; ++fold) {
    std::vector<Eigen::Index> train, held;
    for (Eigen::Index k = 0; k < n; ++k) (k % cfg.n_folds == fold ? held : train).push_back(perm[k]);
    const Dataset tr = select_rows(ds, train);
    const Dataset te = select_rows(ds, held);
    Vector warm = Vector::Zero(ds.cols());
    for (std::size_t g = 0; g < n_grid; ++g) {
      const LassoFit f = lasso_fit(tr, out.lambda_grid[g], cfg, warm);
      warm = f.coef.values;
      out.cv_error[g] += (te.response - te.design * warm).squaredNorm() / static_cast<double>(n);
    }
  }

  std::size_t best = 0;
  for (std::size_t g = 1; g < n_grid; ++g)
    if (out.cv_error[g] < out.cv_error[best]) best = g;
  out.chosen_lambda = out.lambda_grid[best];

  // Refit along the path so the chosen solution is reached by warm starts.
  Vector warm = Vector::Zero(ds.cols());
  for (std::size_t g = 0; g <= best; ++g) {
    out.fit = lasso_fit(ds, out.lambda_grid[g], cfg, warm);
    warm = out.fit.coef.values;
  }
  return out;
}

}  // namespace cstl
