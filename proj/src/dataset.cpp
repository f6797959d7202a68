#include "cstl/dataset.hpp"

#include <cmath>

namespace cstl {

ValidationStatus validate_dataset(const Dataset& ds) {
  ValidationStatus st;
  if (ds.design.rows() != ds.response.size()) {
    st.code = ValidationStatus::Code::dimension_mismatch;
    st.message = "design has " + std::to_string(ds.design.rows()) + " rows but response has " +
                 std::to_string(ds.response.size()) + " entries";
    return st;
  }
  for (Eigen::Index i = 0; i < ds.design.rows(); ++i) {
    for (Eigen::Index j = 0; j < ds.design.cols(); ++j) {
      if (!std::isfinite(ds.design(i, j))) {
        st.code = ValidationStatus::Code::non_finite;
        st.message = "non-finite design entry at row " + std::to_string(i + 1) + ", column " +
                     std::to_string(j + 1);
        return st;
      }
    }
    if (!std::isfinite(ds.response[i])) {
      st.code = ValidationStatus::Code::non_finite;
      st.message = "non-finite response at row " + std::to_string(i + 1);
      return st;
    }
  }
  return st;
}

void require_valid(const Dataset& ds, const std::string& what) {
  const auto st = validate_dataset(ds);
  if (!st.ok()) throw InvalidInput(what + ": " + st.message);
}

Dataset select_rows(const Dataset& ds, const std::vector<Eigen::Index>& idx) {
  Dataset out;
  out.domain = ds.domain;
  out.design.resize(static_cast<Eigen::Index>(idx.size()), ds.cols());
  out.response.resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t r = 0; r < idx.size(); ++r) {
    out.design.row(static_cast<Eigen::Index>(r)) = ds.design.row(idx[r]);
    out.response[static_cast<Eigen::Index>(r)] = ds.response[idx[r]];
  }
  return out;
}

}  // namespace cstl
