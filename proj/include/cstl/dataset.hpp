#pragma once

#include "cstl/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cstl {

//! Design matrix and response for one domain.
struct Dataset {
  Matrix design;
  Vector response;
  Domain domain = Domain::target;

  Eigen::Index rows() const { return design.rows(); }
  Eigen::Index cols() const { return design.cols(); }
};

//! Outcome of validate_dataset; `ok()` when every invariant holds.
struct ValidationStatus {
  enum class Code { ok, dimension_mismatch, non_finite };
  Code code = Code::ok;
  std::string message;

  bool ok() const { return code == Code::ok; }
};

/// Checks that the design and response agree in row count and that every entry
/// is finite. Error messages name the offending row and column (1-based).
ValidationStatus validate_dataset(const Dataset& ds);

//! Throwing form of validate_dataset.
void require_valid(const Dataset& ds, const std::string& what);

//! Rows `idx` of a dataset.
Dataset select_rows(const Dataset& ds, const std::vector<Eigen::Index>& idx);

}  // namespace cstl
