#include "cstl/dataset.hpp"
#include "cstl/transfer_structure.hpp"
#include "support.hpp"

#include <doctest.h>

#include <set>

using namespace cstl;

namespace {

CoefficientVector target(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) x[i++] = e;
  return {x, Domain::target};
}

CoefficientVector source(std::initializer_list<double> v) {
  auto c = target(v);
  c.domain = Domain::source;
  return c;
}

std::vector<int> ints(std::initializer_list<int> v) { return v; }

}  // namespace

TEST_CASE("toy structure: supports, canonical set and matching matrices") {
  const auto ts = build_transfer_structure(target({1, 1, 2, 3, 0, 0}), source({0, 0, 0, 1, 2, 3, 3, 4}));
  CHECK(ts.target_shared == ints({0, 1, 2, 3}));
  CHECK(ts.source_shared == ints({3, 4, 5, 6}));
  CHECK(ts.target_specific.empty());
  CHECK(ts.source_specific == ints({7}));
  CHECK(ts.canonical == ints({0, 2, 3}));
  CHECK(ts.num_shared_values() == 3);

  Matrix mt(4, 3), ms(4, 3);
  mt << 1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1;
  ms << 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 1;
  CHECK(ts.match_target_matrix() == mt);
  CHECK(ts.match_source_matrix() == ms);

  const std::vector<IndexPair> expected{{0, 3}, {1, 3}, {2, 4}, {3, 5}, {3, 6}};
  CHECK(ts.pairs == expected);
}

TEST_CASE("permutation example: three pairs") {
  const auto ts = build_transfer_structure(target({1, 2, 3}), source({2, 3, 1}));
  const std::vector<IndexPair> expected{{0, 2}, {1, 0}, {2, 1}};
  CHECK(ts.pairs == expected);
  CHECK(ts.canonical == ints({0, 1, 2}));
}

TEST_CASE("all-zero coefficients give empty sets") {
  const auto ts = build_transfer_structure(target({0, 0, 0}), source({0, 0}));
  CHECK(ts.pairs.empty());
  CHECK(ts.target_support.empty());
  CHECK(ts.source_support.empty());
  CHECK(ts.canonical.empty());
  CHECK(ts.num_shared_values() == 0);
  CHECK(ts.match_target_matrix().size() == 0);
}

TEST_CASE("tolerance groups nearly equal values") {
  const auto ts = build_transfer_structure(target({1.0, 1.05, 0.0}), source({1.02, 0.0}), 0.1);
  CHECK(ts.pairs.size() == 2);
  CHECK(ts.canonical == ints({0}));
  CHECK(ts.target_specific.empty());
  // a zero-valued pair is never transferable
  CHECK_FALSE(ts.contains({2, 1}));
}

TEST_CASE("validate_dataset") {
  Dataset ds;
  ds.design = Matrix::Ones(3, 2);
  ds.response = Vector::Ones(3);
  CHECK(validate_dataset(ds).ok());

  ds.response = Vector::Ones(2);
  const auto bad = validate_dataset(ds);
  CHECK(bad.code == ValidationStatus::Code::dimension_mismatch);
  CHECK_THROWS_AS(require_valid(ds, "target"), InvalidInput);

  ds.response = Vector::Ones(3);
  ds.design(1, 0) = std::numeric_limits<double>::quiet_NaN();
  const auto nf = validate_dataset(ds);
  CHECK(nf.code == ValidationStatus::Code::non_finite);
  CHECK(nf.message.find("row 2") != std::string::npos);
  CHECK(nf.message.find("column 1") != std::string::npos);

  ds.design(1, 0) = 0.0;
  ds.response[2] = std::numeric_limits<double>::infinity();
  CHECK(validate_dataset(ds).code == ValidationStatus::Code::non_finite);
}

TEST_CASE("select_rows keeps the requested rows in order") {
  Dataset ds;
  ds.design = Matrix::NullaryExpr(4, 2, [](Eigen::Index i, Eigen::Index j) { return static_cast<double>(2 * i + j); });
  ds.response = Vector::LinSpaced(4, 0, 3);
  const Dataset sub = select_rows(ds, {3, 1});
  CHECK(sub.rows() == 2);
  CHECK(sub.response[0] == 3.0);
  CHECK(sub.design.row(1) == ds.design.row(1));
}

TEST_CASE("property: structure agrees with brute force on random small vectors") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dim(1, 10);
  std::uniform_int_distribution<int> val(-3, 3);
  for (int trial = 0; trial < 300; ++trial) {
    const int d_t = dim(rng), d_s = dim(rng);
    CoefficientVector b{Vector(d_t), Domain::target}, th{Vector(d_s), Domain::source};
    for (int j = 0; j < d_t; ++j) b.values[j] = val(rng);
    for (int l = 0; l < d_s; ++l) th.values[l] = val(rng);
    const auto ts = build_transfer_structure(b, th);

    std::vector<IndexPair> brute;
    std::set<int> tt, tsrc;
    std::set<double> distinct;
    for (int j = 0; j < d_t; ++j)
      for (int l = 0; l < d_s; ++l)
        if (b.values[j] != 0.0 && b.values[j] == th.values[l]) {
          brute.push_back({j, l});
          tt.insert(j);
          tsrc.insert(l);
          distinct.insert(b.values[j]);
        }
    REQUIRE(ts.pairs == brute);
    CHECK(std::vector<int>(tt.begin(), tt.end()) == ts.target_shared);
    CHECK(std::vector<int>(tsrc.begin(), tsrc.end()) == ts.source_shared);
    CHECK(static_cast<std::size_t>(ts.num_shared_values()) == distinct.size());

    // T subset of A; I = A \ T
    for (int j : ts.target_specific) CHECK(tt.count(j) == 0);
    CHECK(ts.target_shared.size() + ts.target_specific.size() == ts.target_support.size());
    CHECK(ts.source_shared.size() + ts.source_specific.size() == ts.source_support.size());

    // each matching row has exactly one 1, and the reconstruction is exact
    const Matrix mt = ts.match_target_matrix(), ms = ts.match_source_matrix();
    for (Eigen::Index r = 0; r < mt.rows(); ++r) CHECK(mt.row(r).sum() == 1.0);
    for (Eigen::Index r = 0; r < ms.rows(); ++r) CHECK(ms.row(r).sum() == 1.0);
    Vector canon(ts.num_shared_values());
    for (int k = 0; k < ts.num_shared_values(); ++k) canon[k] = b.values[ts.canonical[static_cast<std::size_t>(k)]];
    for (std::size_t i = 0; i < ts.target_shared.size(); ++i)
      CHECK((mt * canon)[static_cast<Eigen::Index>(i)] == b.values[ts.target_shared[i]]);
    for (std::size_t i = 0; i < ts.source_shared.size(); ++i)
      CHECK((ms * canon)[static_cast<Eigen::Index>(i)] == th.values[ts.source_shared[i]]);
    // canonical representative is the smallest index carrying its value
    for (int c : ts.canonical)
      for (int j : ts.target_shared)
        if (b.values[j] == b.values[c]) CHECK(c <= j);
  }
}

TEST_CASE("property: tolerance pairs agree with brute force") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  const double tol = 0.3;
  for (int trial = 0; trial < 200; ++trial) {
    CoefficientVector b{Vector(6), Domain::target}, th{Vector(7), Domain::source};
    for (int j = 0; j < 6; ++j) b.values[j] = val(rng);
    for (int l = 0; l < 7; ++l) th.values[l] = val(rng);
    const auto ts = build_transfer_structure(b, th, tol);
    std::vector<IndexPair> brute;
    for (int j = 0; j < 6; ++j)
      for (int l = 0; l < 7; ++l)
        if (std::abs(b.values[j]) > tol && std::abs(th.values[l]) > tol && std::abs(b.values[j] - th.values[l]) <= tol)
          brute.push_back({j, l});
    CHECK(ts.pairs == brute);
  }
}
