#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace cstl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
//! Row-major matrix; its storage order is the lexicographic (j, l) pair order.
using PairMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Domain { target, source };

inline const char* to_string(Domain d) { return d == Domain::target ? "target" : "source"; }

//! Coefficient vector tagged with the domain whose design it multiplies.
struct CoefficientVector {
  Vector values;
  Domain domain = Domain::target;

  CoefficientVector() = default;
  CoefficientVector(Vector v, Domain d) : values(std::move(v)), domain(d) {}

  Eigen::Index size() const { return values.size(); }
  double operator[](Eigen::Index i) const { return values[i]; }
};

//! Raised when an input violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

//! Raised when a numerical routine cannot produce a result (singular system, log of zero, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cstl
