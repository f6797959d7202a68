#pragma once

#include "cstl/dataset.hpp"

#include <string>

namespace cstl {

//! Per-method, per-replicate evaluation numbers.
struct EvalReport {
  double sse = 0.0;
  double mse = 0.0;
  std::string method_tag;
  int replicate_id = 0;
};

//! ||beta_hat - beta_true||^2
double sse(const Vector& beta_hat, const Vector& beta_true);

//! (1/n_test) sum_i (y_i - x_i^T beta_hat)^2
double mse(const Vector& beta_hat, const Dataset& test);

}  // namespace cstl
