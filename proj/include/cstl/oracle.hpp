#pragma once

#include "cstl/dataset.hpp"
#include "cstl/transfer_structure.hpp"

namespace cstl {

//! Oracle estimates with the true sparsity and fusion constraints imposed.
struct OracleFit {
  CoefficientVector beta_ora;
  CoefficientVector theta_ora;
  Vector shared_values;  //!< one estimate per canonical shared value
};

/// Closed-form oracle estimator.
///
/// The shared values solve the pooled least-squares problem on the compressed
/// designs X_{T_k} M^(k) after projecting out the domain-specific columns
/// X_{I_k}; the specific coefficients are then regressions of the remaining
/// residuals on X_{I_k}. All inverses are Cholesky solves.
///
/// Requires m < n_t, |I_t| < n_t, |I_s| < n_s; throws NumericalError when one
/// of the Gram blocks is singular.
OracleFit oracle_fit(const Dataset& target, const Dataset& source, const TransferStructure& ts);

/// Reference solution of the same constrained least-squares problem: the full
/// pooled design in the free variables (shared values, beta_{I_t}, theta_{I_s})
/// is formed through the dense matching matrices and solved with one
/// normal-equations system. Intended for cross-checking oracle_fit.
OracleFit oracle_fit_reference(const Dataset& target, const Dataset& source, const TransferStructure& ts);

}  // namespace cstl
