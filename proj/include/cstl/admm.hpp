#pragma once

#include "cstl/dataset.hpp"
#include "cstl/scad_weights.hpp"

#include <array>
#include <optional>
#include <vector>

namespace cstl {

/**
 * Pooled, sample-size normalised system.
 *
 * Holds X^(t)/sqrt(n_t) and X^(s)/sqrt(n_s) (the diagonal blocks of the pooled
 * design) and the matching scaled responses, so that
 * ||Y - X eta||^2 = (1/n_t)||Y_t - X_t beta||^2 + (1/n_s)||Y_s - X_s theta||^2.
 */
class PooledSystem {
 public:
  PooledSystem(const Dataset& target, const Dataset& source);

  int d_t() const { return static_cast<int>(x_t_.cols()); }
  int d_s() const { return static_cast<int>(x_s_.cols()); }
  int n_t() const { return static_cast<int>(x_t_.rows()); }
  int n_s() const { return static_cast<int>(x_s_.rows()); }
  int dim() const { return d_t() + d_s(); }

  const Matrix& x_target() const { return x_t_; }  //!< X^(t)/sqrt(n_t)
  const Matrix& x_source() const { return x_s_; }  //!< X^(s)/sqrt(n_s)
  const Vector& y_target() const { return y_t_; }  //!< Y^(t)/sqrt(n_t)
  const Vector& y_source() const { return y_s_; }  //!< Y^(s)/sqrt(n_s)
  //! 2 X^T Y, stacked (target block over source block).
  const Vector& twice_xty() const { return xty2_; }

  //! (1/n_t)||Y_t - X_t beta||^2
  double target_loss(const Vector& beta) const { return (y_t_ - x_t_ * beta).squaredNorm(); }
  //! (1/n_s)||Y_s - X_s theta||^2
  double source_loss(const Vector& theta) const { return (y_s_ - x_s_ * theta).squaredNorm(); }

 private:
  Matrix x_t_, x_s_;
  Vector y_t_, y_s_, xty2_;
};

/// Cached factorisation of G = 2 X^T X + rho0 A^T A + rho1 D^T D.
///
/// D^T D is assembled from its closed form [[d_s I, -J], [-J^T, d_t I]]; D itself
/// is never formed. The factor depends only on (X, rho0, rho1), so a single
/// instance serves every iteration and every (lambda0, lambda1).
struct FactoredSystem {
  Matrix gram;
  Eigen::LLT<Matrix> factor;
  double rho0 = 1.0;
  double rho1 = 1.0;
  int d_t = 0;
  int d_s = 0;
};

FactoredSystem build_factored_system(const PooledSystem& ps, double rho0, double rho1);

//! Closed-form D^T D for the all-pairs difference operator.
Matrix structural_dtd(int d_t, int d_s);

//! ADMM iterates. `delta` and `v` are d_t x d_s row-major, i.e. lexicographic (j, l).
struct AdmmState {
  Vector eta;
  Vector z;
  PairMatrix delta;
  Vector u;
  PairMatrix v;
  int iter = 0;
  //! Per-iteration (||r0||, ||r1||, ||s0||, ||s1||).
  std::vector<std::array<double, 4>> residual_history;
};

struct AdmmOptions {
  double eps_pri = 0.0;   //!< <= 0 selects the default eps_abs * sqrt(d_t + d_t*d_s)
  double eps_dual = 0.0;  //!< same default as eps_pri
  double eps_abs = 1e-5;
  int max_iter = 5000;
  std::optional<AdmmState> warm_start;
  //! Starting eta when no warm state is given (e.g. Lasso initial estimates).
  std::optional<Vector> initial_eta;
};

struct SolveResult {
  CoefficientVector beta;
  CoefficientVector theta;
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
  AdmmState state;
};

//! sign(x) * max(|x| - tau, 0)
inline double soft_threshold(double x, double tau) {
  if (x > tau) return x - tau;
  if (x < -tau) return x + tau;
  return 0.0;
}

//! D eta: entry (j, l) is beta_j - theta_l. `eta` has length d_t + d_s.
PairMatrix d_apply(const Vector& eta, int d_t, int d_s);

//! D^T v: beta block j is sum_l v_{j,l}; theta block l is -sum_j v_{j,l}.
Vector dt_apply(const PairMatrix& v);
Vector dt_apply(const Vector& v, int d_t, int d_s);

/// Penalised objective
///   (1/n_t)||Y_t - X_t beta||^2 + (1/n_s)||Y_s - X_s theta||^2
///   + lambda0 sum_j w_j |beta_j| + lambda1 sum_{j,l} w_{j,l} |beta_j - theta_l|.
double objective_value(const PooledSystem& ps, const WeightScheme& ws, const Vector& beta, const Vector& theta,
                       double lambda0, double lambda1);

/// Solves the penalised problem by ADMM with a cached Cholesky factor.
///
/// Each iteration: eta from the cached factor, z by coordinatewise soft
/// thresholding at lambda0 w_j / rho0, delta by pairwise soft thresholding at
/// lambda1 w_{j,l} / rho1, then dual ascent on u and v. Stops once both primal
/// residual norms are <= eps_pri and both dual residual norms are <= eps_dual,
/// or after max_iter iterations (converged = false).
SolveResult admm_solve(const PooledSystem& ps, const FactoredSystem& fs, const WeightScheme& ws, double lambda0,
                       double lambda1, const AdmmOptions& opts = {});

//! Convenience overload that factors the system for (rho0, rho1) first.
SolveResult admm_solve(const PooledSystem& ps, const WeightScheme& ws, double lambda0, double lambda1, double rho0,
                       double rho1, const AdmmOptions& opts = {});

}  // namespace cstl
