#include "cstl/scad_weights.hpp"

#include <algorithm>
#include <cmath>

namespace cstl {

namespace {

void check_scad_params(double lambda, double a) {
  if (!(lambda > 0.0)) throw InvalidInput("SCAD lambda must be > 0");
  if (!(a > 2.0)) throw InvalidInput("SCAD parameter a must be > 2");
}

}  // namespace

double scad_derivative(double t, double lambda, double a) {
  check_scad_params(lambda, a);
  const double mag = std::abs(t);
  if (mag <= lambda) return lambda;
  if (mag <= a * lambda) return (a * lambda - mag) / (a - 1.0);
  return 0.0;
}

WeightScheme scad_weight_scheme(const CoefficientVector& beta_init, const CoefficientVector& theta_init,
                                double lambda0, double lambda1, double a) {
  check_scad_params(lambda0, a);
  check_scad_params(lambda1, a);
  const Eigen::Index dt = beta_init.size(), ds = theta_init.size();
  WeightScheme ws;
  ws.kind = WeightScheme::Kind::scad;
  ws.feature_weights.resize(dt);
  for (Eigen::Index j = 0; j < dt; ++j)
    ws.feature_weights[j] = std::clamp(scad_derivative(beta_init[j], lambda0, a) / lambda0, 0.0, 1.0);
  ws.pair_weights.resize(dt, ds);
  for (Eigen::Index j = 0; j < dt; ++j)
    for (Eigen::Index l = 0; l < ds; ++l)
      ws.pair_weights(j, l) =
          std::clamp(scad_derivative(beta_init[j] - theta_init[l], lambda1, a) / lambda1, 0.0, 1.0);
  return ws;
}

WeightScheme ideal_weight_scheme(const TransferStructure& ts, int d_t, int d_s) {
  if (ts.d_t != d_t || ts.d_s != d_s)
    throw InvalidInput("ideal_weight_scheme: structure dimensions (" + std::to_string(ts.d_t) + ", " +
                       std::to_string(ts.d_s) + ") do not match (" + std::to_string(d_t) + ", " +
                       std::to_string(d_s) + ")");
  WeightScheme ws;
  ws.kind = WeightScheme::Kind::ideal;
  ws.feature_weights = Vector::Ones(d_t);
  for (int j : ts.target_support) ws.feature_weights[j] = 0.0;
  ws.pair_weights = PairMatrix::Zero(d_t, d_s);
  for (const auto& p : ts.pairs) ws.pair_weights(p.target, p.source) = 1.0;
  return ws;
}

}  // namespace cstl
