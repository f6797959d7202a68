#pragma once

#include "cstl/types.hpp"

#include <vector>

namespace cstl {

//! A (target index, source index) pair, 0-based.
struct IndexPair {
  int target = 0;
  int source = 0;

  friend bool operator==(const IndexPair&, const IndexPair&) = default;
  friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

/**
 * Cross-domain transfer structure derived from true coefficient vectors.
 *
 * All index lists are sorted ascending and 0-based. The matching matrices are
 * stored in compressed form: `target_match[i]` is the column holding the single
 * 1 in row i of M^(t) (row i corresponds to `target_shared[i]`), and likewise
 * for the source. Use `match_target_matrix()` for the dense binary form.
 */
struct TransferStructure {
  int d_t = 0;
  int d_s = 0;
  std::vector<IndexPair> pairs;  //!< lexicographic order
  std::vector<int> target_support;
  std::vector<int> source_support;
  std::vector<int> target_shared;
  std::vector<int> source_shared;
  std::vector<int> target_specific;
  std::vector<int> source_specific;
  std::vector<int> canonical;  //!< one target index per distinct shared value
  std::vector<int> target_match;
  std::vector<int> source_match;

  int num_shared_values() const { return static_cast<int>(canonical.size()); }
  bool contains(IndexPair p) const;

  Matrix match_target_matrix() const;
  Matrix match_source_matrix() const;
};

/// Builds the transfer structure of (beta_true, theta_true).
///
/// A coefficient is active when its magnitude exceeds `tol`; a pair (j, l) is
/// transferable when both coefficients are active and |beta_j - theta_l| <= tol.
/// Shared target values are grouped by single linkage with gap `tol` (exact
/// equality when tol = 0); each group is represented by its smallest index.
TransferStructure build_transfer_structure(const CoefficientVector& beta_true,
                                           const CoefficientVector& theta_true, double tol = 0.0);

}  // namespace cstl
