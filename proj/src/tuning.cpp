#include "cstl/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace cstl {

TuningGrid TuningGrid::scaled_default(int d_t, int n_t, int count, double lo, double hi) {
  if (d_t < 1 || n_t < 1 || count < 1 || !(lo > 0.0) || !(hi >= lo)) throw InvalidInput("invalid default grid request");
  const double scale = std::sqrt(std::log(std::max(d_t, 2)) / n_t);
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double frac = count == 1 ? 0.0 : static_cast<double>(k) / (count - 1);
    g[static_cast<std::size_t>(k)] = scale * std::exp(std::log(hi) + frac * (std::log(lo) - std::log(hi)));
  }
  TuningGrid grid;
  grid.lambda0 = g;
  grid.lambda1 = g;
  return grid;
}

void TuningGrid::validate() const {
  if (lambda0.empty() || lambda1.empty()) throw InvalidInput("tuning grid: lambda grids must be nonempty");
  for (double v : lambda0)
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput("tuning grid: lambda0 values must be positive");
  for (double v : lambda1)
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput("tuning grid: lambda1 values must be positive");
  if (!(eps_fuse >= 0.0)) throw InvalidInput("tuning grid: eps_fuse must be >= 0");
}

int degrees_of_freedom(const Vector& eta, double eps_fuse) {
  if (!(eps_fuse >= 0.0)) throw InvalidInput("degrees_of_freedom: eps_fuse must be >= 0");
  std::vector<double> v(eta.data(), eta.data() + eta.size());
  std::sort(v.begin(), v.end());
  int df = 0;
  std::size_t start = 0;
  while (start < v.size()) {
    std::size_t end = start + 1;
    while (end < v.size() && v[end] - v[end - 1] <= eps_fuse) ++end;
    bool zero_cluster = false;
    for (std::size_t k = start; k < end && !zero_cluster; ++k) zero_cluster = std::abs(v[k]) <= eps_fuse;
    if (!zero_cluster) ++df;
    start = end;
  }
  return df;
}

double bic(const PooledSystem& ps, const Vector& beta, const Vector& theta, double eps_fuse) {
  const double mean_t = ps.target_loss(beta);
  const double mean_s = ps.source_loss(theta);
  if (!(mean_t > 0.0) || !(mean_s > 0.0))
    throw NumericalError("bic: zero residual sum of squares; the fit interpolates the data (consider a larger "
                         "eps_fuse or stronger penalties)");
  Vector eta(beta.size() + theta.size());
  eta << beta, theta;
  const double n = static_cast<double>(ps.n_t() + ps.n_s());
  return 0.5 * n * (std::log(mean_t) + std::log(mean_s)) + degrees_of_freedom(eta, eps_fuse) * std::log(n);
}

std::pair<LassoCvResult, LassoCvResult> initial_estimates(const Dataset& target, const Dataset& source,
                                                          const LassoConfig& cfg) {
  LassoCvResult t = lasso_cv(target, cfg);
  LassoCvResult s = lasso_cv(source, cfg);
  t.fit.coef.domain = Domain::target;
  s.fit.coef.domain = Domain::source;
  return {std::move(t), std::move(s)};
}

Dataset with_noise_column(const Dataset& ds, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset out = ds;
  out.design.conservativeResize(ds.rows(), ds.cols() + 1);
  for (Eigen::Index i = 0; i < ds.rows(); ++i) out.design(i, ds.cols()) = normal(rng);
  return out;
}

FitResult grid_search_cstl(const Dataset& target, const Dataset& source, const TuningGrid& grid,
                           const CstlOptions& opts) {
  const auto [t, s] = initial_estimates(target, source, opts.lasso);
  return grid_search_cstl(target, source, grid, opts, t.fit.coef, s.fit.coef);
}

FitResult grid_search_cstl(const Dataset& target, const Dataset& source, const TuningGrid& grid,
                           const CstlOptions& opts, const CoefficientVector& beta_init,
                           const CoefficientVector& theta_init) {
  if (opts.augment_noise) {
    CstlOptions inner = opts;
    inner.augment_noise = false;
    CoefficientVector b0{Vector::Zero(beta_init.size() + 1), Domain::target};
    b0.values.head(beta_init.size()) = beta_init.values;
    FitResult fit = grid_search_cstl(with_noise_column(target, opts.noise_seed), source, grid, inner, b0, theta_init);
    const Eigen::Index d = target.cols();
    fit.beta.values.conservativeResize(d);
    fit.beta_init.values.conservativeResize(d);
    return fit;
  }
  grid.validate();
  std::vector<double> g0 = grid.lambda0, g1 = grid.lambda1;
  std::sort(g0.begin(), g0.end(), std::greater<>());
  std::sort(g1.begin(), g1.end(), std::greater<>());

  const PooledSystem ps(target, source);
  if (beta_init.size() != ps.d_t() || theta_init.size() != ps.d_s())
    throw InvalidInput("grid_search_cstl: initial estimates have wrong length");
  const FactoredSystem fs = build_factored_system(ps, opts.rho0, opts.rho1);

  Vector eta0(ps.dim());
  eta0 << beta_init.values, theta_init.values;

  FitResult best;
  best.beta_init = beta_init;
  best.theta_init = theta_init;
  bool have_best = false;
  std::optional<AdmmState> chain;
  std::string last_error;

  for (double l0 : g0) {
    for (double l1 : g1) {
      GridPoint gp;
      gp.lambda0 = l0;
      gp.lambda1 = l1;
      try {
        const WeightScheme ws = scad_weight_scheme(beta_init, theta_init, l0, l1, opts.scad_a);
        AdmmOptions ao;
        ao.max_iter = opts.max_iter;
        ao.eps_abs = opts.eps_abs;
        if (opts.warm_start && chain) {
          ao.warm_start = std::move(chain);
        } else {
          ao.initial_eta = eta0;
        }
        SolveResult sr = admm_solve(ps, fs, ws, l0, l1, ao);
        gp.objective = sr.objective;
        gp.iterations = sr.iterations;
        gp.converged = sr.converged;
        Vector eta(ps.dim());
        eta << sr.beta.values, sr.theta.values;
        gp.df = degrees_of_freedom(eta, grid.eps_fuse);
        gp.bic = bic(ps, sr.beta.values, sr.theta.values, grid.eps_fuse);
        gp.ok = true;
        if (!have_best || gp.bic < best.bic) {
          best.beta = sr.beta;
          best.theta = sr.theta;
          best.objective = sr.objective;
          best.lambda0 = l0;
          best.lambda1 = l1;
          best.bic = gp.bic;
          best.df = gp.df;
          best.iterations = sr.iterations;
          best.converged = sr.converged;
          have_best = true;
        }
        if (opts.warm_start) chain = std::move(sr.state);
      } catch (const std::exception& e) {
        gp.ok = false;
        gp.error = e.what();
        last_error = e.what();
        chain.reset();
      }
      best.surface.push_back(gp);
    }
  }
  if (!have_best) throw NumericalError("grid_search_cstl: every grid point failed; last error: " + last_error);
  return best;
}

}  // namespace cstl
