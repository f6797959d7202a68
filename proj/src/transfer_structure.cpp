#include "cstl/transfer_structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cstl {

bool TransferStructure::contains(IndexPair p) const {
  return std::binary_search(pairs.begin(), pairs.end(), p);
}

Matrix TransferStructure::match_target_matrix() const {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(target_shared.size()), num_shared_values());
  for (std::size_t i = 0; i < target_match.size(); ++i) m(static_cast<Eigen::Index>(i), target_match[i]) = 1.0;
  return m;
}

Matrix TransferStructure::match_source_matrix() const {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(source_shared.size()), num_shared_values());
  for (std::size_t i = 0; i < source_match.size(); ++i) m(static_cast<Eigen::Index>(i), source_match[i]) = 1.0;
  return m;
}

namespace {

void check_finite(const Vector& v, const char* name) {
  if (!v.allFinite()) throw InvalidInput(std::string(name) + " contains a non-finite entry");
}

}  // namespace

TransferStructure build_transfer_structure(const CoefficientVector& beta_true,
                                           const CoefficientVector& theta_true, double tol) {
  if (!(tol >= 0.0)) throw InvalidInput("transfer structure tolerance must be >= 0");
  check_finite(beta_true.values, "beta_true");
  check_finite(theta_true.values, "theta_true");

  const Vector& beta = beta_true.values;
  const Vector& theta = theta_true.values;
  TransferStructure ts;
  ts.d_t = static_cast<int>(beta.size());
  ts.d_s = static_cast<int>(theta.size());

  for (int j = 0; j < ts.d_t; ++j)
    if (std::abs(beta[j]) > tol) ts.target_support.push_back(j);
  for (int l = 0; l < ts.d_s; ++l)
    if (std::abs(theta[l]) > tol) ts.source_support.push_back(l);

  std::vector<char> t_shared(ts.d_t, 0), s_shared(ts.d_s, 0);
  for (int j : ts.target_support) {
    for (int l : ts.source_support) {
      if (std::abs(beta[j] - theta[l]) <= tol) {
        ts.pairs.push_back({j, l});
        t_shared[j] = 1;
        s_shared[l] = 1;
      }
    }
  }

  for (int j : ts.target_support) (t_shared[j] ? ts.target_shared : ts.target_specific).push_back(j);
  for (int l : ts.source_support) (s_shared[l] ? ts.source_shared : ts.source_specific).push_back(l);

  // Group shared target values: sort by value, split where consecutive gaps exceed tol.
  std::vector<int> by_value = ts.target_shared;
  std::stable_sort(by_value.begin(), by_value.end(), [&](int a, int b) { return beta[a] < beta[b]; });
  std::vector<int> group_of(ts.d_t, -1);
  std::vector<int> group_min;
  for (std::size_t k = 0; k < by_value.size(); ++k) {
    const int j = by_value[k];
    if (k == 0 || beta[j] - beta[by_value[k - 1]] > tol) group_min.push_back(j);
    group_of[j] = static_cast<int>(group_min.size()) - 1;
    group_min.back() = std::min(group_min.back(), j);
  }

  // Canonical columns ordered by representative index.
  std::vector<int> order(group_min.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return group_min[a] < group_min[b]; });
  std::vector<int> column_of_group(group_min.size());
  for (std::size_t c = 0; c < order.size(); ++c) {
    column_of_group[order[c]] = static_cast<int>(c);
    ts.canonical.push_back(group_min[order[c]]);
  }

  for (int j : ts.target_shared) ts.target_match.push_back(column_of_group[group_of[j]]);
  // A shared source index inherits the group of its lowest-index partner.
  for (int l : ts.source_shared) {
    const auto it = std::find_if(ts.pairs.begin(), ts.pairs.end(), [l](const IndexPair& p) { return p.source == l; });
    ts.source_match.push_back(column_of_group[group_of[it->target]]);
  }
  return ts;
}

}  // namespace cstl
