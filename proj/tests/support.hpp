#pragma once
// Independent reference implementations and fixtures shared by the test binaries.

#include "cstl/admm.hpp"
#include "cstl/dataset.hpp"
#include "cstl/scad_weights.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

namespace cstl::testing {

inline Matrix gaussian_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  return Matrix::NullaryExpr(rows, cols, [&]() { return n01(rng); });
}

inline Vector gaussian_vector(int size, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  return Vector::NullaryExpr(size, [&]() { return n01(rng); });
}

//! y = X b + sigma * noise
inline Dataset linear_data(int n, const Vector& b, double sigma, std::mt19937_64& rng, Domain dom = Domain::target) {
  Dataset ds;
  ds.domain = dom;
  ds.design = gaussian_matrix(n, static_cast<int>(b.size()), rng);
  ds.response = ds.design * b + sigma * gaussian_vector(n, rng);
  return ds;
}

//! Dense D with rows beta_j - theta_l in lexicographic (j, l) order.
inline Matrix materialize_d(int d_t, int d_s) {
  Matrix d = Matrix::Zero(d_t * d_s, d_t + d_s);
  for (int j = 0; j < d_t; ++j)
    for (int l = 0; l < d_s; ++l) {
      d(j * d_s + l, j) = 1.0;
      d(j * d_s + l, d_t + l) = -1.0;
    }
  return d;
}

//! Flattens a row-major pair matrix into lexicographic order.
inline Vector flatten(const PairMatrix& m) {
  Vector v(m.size());
  for (Eigen::Index j = 0; j < m.rows(); ++j)
    for (Eigen::Index l = 0; l < m.cols(); ++l) v[j * m.cols() + l] = m(j, l);
  return v;
}

//! Objective accumulated term by term, without the library's helpers.
inline double brute_objective(const Dataset& t, const Dataset& s, const WeightScheme& ws, const Vector& beta,
                              const Vector& theta, double l0, double l1) {
  double lt = 0.0;
  for (Eigen::Index i = 0; i < t.design.rows(); ++i) {
    double fit = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) fit += t.design(i, j) * beta[j];
    lt += (t.response[i] - fit) * (t.response[i] - fit);
  }
  double ls = 0.0;
  for (Eigen::Index i = 0; i < s.design.rows(); ++i) {
    double fit = 0.0;
    for (Eigen::Index l = 0; l < theta.size(); ++l) fit += s.design(i, l) * theta[l];
    ls += (s.response[i] - fit) * (s.response[i] - fit);
  }
  double pen0 = 0.0, pen1 = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    pen0 += ws.feature_weights[j] * std::abs(beta[j]);
    for (Eigen::Index l = 0; l < theta.size(); ++l) pen1 += ws.pair_weights(j, l) * std::abs(beta[j] - theta[l]);
  }
  return lt / static_cast<double>(t.design.rows()) + ls / static_cast<double>(s.design.rows()) + l0 * pen0 + l1 * pen1;
}

/**
 * Long-run proximal-subgradient minimiser of the penalised objective.
 *
 * The l1 term on beta is handled by its exact prox; the pairwise term by a
 * subgradient (0 at ties). Step 1/(mu (k + k0)) with mu the strong-convexity
 * modulus of the loss. Returns the best objective among periodic iterates,
 * the last iterate and the average of the second half.
 */
inline double subgradient_reference(const Dataset& t, const Dataset& s, const WeightScheme& ws, double l0, double l1,
                                    long steps) {
  const int d_t = static_cast<int>(t.design.cols());
  const int d_s = static_cast<int>(s.design.cols());
  const double nt = static_cast<double>(t.design.rows());
  const double ns = static_cast<double>(s.design.rows());
  Matrix h = Matrix::Zero(d_t + d_s, d_t + d_s);
  h.topLeftCorner(d_t, d_t) = 2.0 * t.design.transpose() * t.design / nt;
  h.bottomRightCorner(d_s, d_s) = 2.0 * s.design.transpose() * s.design / ns;
  Vector c(d_t + d_s);
  c << 2.0 * t.design.transpose() * t.response / nt, 2.0 * s.design.transpose() * s.response / ns;
  const double mu = Eigen::SelfAdjointEigenSolver<Matrix>(h).eigenvalues().minCoeff();

  auto f = [&](const Vector& e) { return brute_objective(t, s, ws, e.head(d_t), e.tail(d_s), l0, l1); };
  Vector eta = Vector::Zero(d_t + d_s);
  Vector avg = Vector::Zero(d_t + d_s);
  long averaged = 0;
  double best = f(eta);
  const double k0 = 10.0;
  for (long k = 0; k < steps; ++k) {
    Vector g = h * eta - c;
    for (int j = 0; j < d_t; ++j)
      for (int l = 0; l < d_s; ++l) {
        const double diff = eta[j] - eta[d_t + l];
        const double sg = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
        g[j] += l1 * ws.pair_weights(j, l) * sg;
        g[d_t + l] -= l1 * ws.pair_weights(j, l) * sg;
      }
    const double step = 1.0 / (mu * (static_cast<double>(k) + k0));
    eta -= step * g;
    for (int j = 0; j < d_t; ++j) {
      const double tau = step * l0 * ws.feature_weights[j];
      eta[j] = eta[j] > tau ? eta[j] - tau : (eta[j] < -tau ? eta[j] + tau : 0.0);
    }
    if (k >= steps / 2) {
      avg += eta;
      ++averaged;
    }
    if ((k & 1023) == 0) best = std::min(best, f(eta));
  }
  best = std::min(best, f(eta));
  if (averaged > 0) best = std::min(best, f(avg / static_cast<double>(averaged)));
  return best;
}

//! Ordinary least squares through the normal equations.
inline Vector ols(const Matrix& x, const Vector& y) { return (x.transpose() * x).ldlt().solve(x.transpose() * y); }

}  // namespace cstl::testing
