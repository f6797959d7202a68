#pragma once

#include "cstl/transfer_structure.hpp"
#include "cstl/types.hpp"

namespace cstl {

inline constexpr double kDefaultScadA = 3.7;

//! Feature weights w_j (length d_t) and pair weights w_{j,l} (d_t x d_s), all in [0, 1].
struct WeightScheme {
  enum class Kind { ideal, scad };

  Vector feature_weights;
  PairMatrix pair_weights;
  Kind kind = Kind::scad;

  Eigen::Index d_t() const { return feature_weights.size(); }
  Eigen::Index d_s() const { return pair_weights.cols(); }
};

/// SCAD derivative p'_lambda(|t|), magnitude form:
///   lambda                      if |t| <= lambda
///   (a*lambda - |t|) / (a - 1)  if lambda < |t| <= a*lambda
///   0                           otherwise
double scad_derivative(double t, double lambda, double a = kDefaultScadA);

/// Data-driven weights from initial estimates:
/// w_j = p'_{lambda0}(|beta_j|)/lambda0 and w_{j,l} = p'_{lambda1}(|beta_j - theta_l|)/lambda1.
WeightScheme scad_weight_scheme(const CoefficientVector& beta_init, const CoefficientVector& theta_init,
                                double lambda0, double lambda1, double a = kDefaultScadA);

//! 0/1 weights penalising inactive target coefficients and transferable pairs only.
WeightScheme ideal_weight_scheme(const TransferStructure& ts, int d_t, int d_s);

}  // namespace cstl
