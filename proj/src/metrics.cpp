#include "cstl/metrics.hpp"

namespace cstl {

double sse(const Vector& beta_hat, const Vector& beta_true) {
  if (beta_hat.size() != beta_true.size())
    throw InvalidInput("sse: length mismatch (" + std::to_string(beta_hat.size()) + " vs " +
                       std::to_string(beta_true.size()) + ")");
  return (beta_hat - beta_true).squaredNorm();
}

double mse(const Vector& beta_hat, const Dataset& test) {
  if (test.rows() == 0) throw InvalidInput("mse: empty test set");
  if (test.cols() != beta_hat.size()) throw InvalidInput("mse: coefficient length does not match test design");
  return (test.response - test.design * beta_hat).squaredNorm() / static_cast<double>(test.rows());
}

}  // namespace cstl
