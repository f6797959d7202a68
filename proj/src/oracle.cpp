#include "cstl/oracle.hpp"

#include <cmath>
#include <string>

namespace cstl {

namespace {

Matrix columns(const Matrix& x, const std::vector<int>& idx) {
  Matrix out(x.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = x.col(idx[k]);
  return out;
}

// X_{T_k} M^(k) built by summing the columns that share a canonical value.
Matrix compressed_design(const Matrix& x, const std::vector<int>& shared, const std::vector<int>& match, int m) {
  Matrix out = Matrix::Zero(x.rows(), m);
  for (std::size_t i = 0; i < shared.size(); ++i) out.col(match[i]) += x.col(shared[i]);
  return out;
}

// Projects out span(xi) from the columns of z (identity when xi has no columns).
class ResidualMaker {
 public:
  ResidualMaker(const Matrix& xi, const std::string& block) : xi_(xi) {
    if (xi_.cols() == 0) return;
    llt_.compute(xi_.transpose() * xi_);
    if (llt_.info() != Eigen::Success) throw NumericalError("oracle: singular Gram matrix for block " + block);
  }

  Matrix annihilate(const Matrix& z) const {
    if (xi_.cols() == 0) return z;
    return z - xi_ * llt_.solve(xi_.transpose() * z);
  }

  Vector regress(const Vector& y) const {
    if (xi_.cols() == 0) return Vector(0);
    return llt_.solve(xi_.transpose() * y);
  }

 private:
  const Matrix& xi_;
  Eigen::LLT<Matrix> llt_;
};

void check_inputs(const Dataset& target, const Dataset& source, const TransferStructure& ts) {
  require_valid(target, "oracle target");
  require_valid(source, "oracle source");
  if (target.cols() != ts.d_t || source.cols() != ts.d_s)
    throw InvalidInput("oracle: transfer structure dimensions do not match the data");
  const auto m = static_cast<Eigen::Index>(ts.canonical.size());
  if (!(m < target.rows()))
    throw InvalidInput("oracle: rank condition violated, |canonical set| = " + std::to_string(m) + " >= n_t");
  if (!(static_cast<Eigen::Index>(ts.target_specific.size()) < target.rows()))
    throw InvalidInput("oracle: rank condition violated, |I_t| >= n_t");
  if (!(static_cast<Eigen::Index>(ts.source_specific.size()) < source.rows()))
    throw InvalidInput("oracle: rank condition violated, |I_s| >= n_s");
}

OracleFit assemble(const TransferStructure& ts, const Vector& alpha, const Vector& beta_it, const Vector& theta_is) {
  OracleFit fit;
  fit.shared_values = alpha;
  Vector beta = Vector::Zero(ts.d_t), theta = Vector::Zero(ts.d_s);
  for (std::size_t i = 0; i < ts.target_shared.size(); ++i) beta[ts.target_shared[i]] = alpha[ts.target_match[i]];
  for (std::size_t i = 0; i < ts.source_shared.size(); ++i) theta[ts.source_shared[i]] = alpha[ts.source_match[i]];
  for (std::size_t i = 0; i < ts.target_specific.size(); ++i) beta[ts.target_specific[i]] = beta_it[static_cast<Eigen::Index>(i)];
  for (std::size_t i = 0; i < ts.source_specific.size(); ++i) theta[ts.source_specific[i]] = theta_is[static_cast<Eigen::Index>(i)];
  fit.beta_ora = CoefficientVector(std::move(beta), Domain::target);
  fit.theta_ora = CoefficientVector(std::move(theta), Domain::source);
  return fit;
}

}  // namespace

OracleFit oracle_fit(const Dataset& target, const Dataset& source, const TransferStructure& ts) {
  check_inputs(target, source, ts);
  const int m = ts.num_shared_values();
  const double nt = static_cast<double>(target.rows()), ns = static_cast<double>(source.rows());

  const Matrix xi_t = columns(target.design, ts.target_specific);
  const Matrix xi_s = columns(source.design, ts.source_specific);
  const ResidualMaker proj_t(xi_t, "X_t[I_t]");
  const ResidualMaker proj_s(xi_s, "X_s[I_s]");

  const Matrix xc_t = compressed_design(target.design, ts.target_shared, ts.target_match, m);
  const Matrix xc_s = compressed_design(source.design, ts.source_shared, ts.source_match, m);

  Vector alpha(m);
  if (m > 0) {
    const Matrix rt = proj_t.annihilate(xc_t);
    const Matrix rs = proj_s.annihilate(xc_s);
    // (I - P) is a symmetric idempotent, so Z^T (I - P) Z = ((I - P) Z)^T ((I - P) Z).
    const Matrix lhs = rt.transpose() * rt / nt + rs.transpose() * rs / ns;
    const Vector rhs = rt.transpose() * target.response / nt + rs.transpose() * source.response / ns;
    Eigen::LLT<Matrix> llt(lhs);
    if (llt.info() != Eigen::Success) throw NumericalError("oracle: singular Gram matrix for the shared-value block");
    alpha = llt.solve(rhs);
  }

  const Vector beta_it = proj_t.regress(target.response - xc_t * alpha);
  const Vector theta_is = proj_s.regress(source.response - xc_s * alpha);
  return assemble(ts, alpha, beta_it, theta_is);
}

OracleFit oracle_fit_reference(const Dataset& target, const Dataset& source, const TransferStructure& ts) {
  check_inputs(target, source, ts);
  const Eigen::Index m = ts.num_shared_values();
  const auto kt = static_cast<Eigen::Index>(ts.target_specific.size());
  const auto ks = static_cast<Eigen::Index>(ts.source_specific.size());
  const Eigen::Index nt = target.rows(), ns = source.rows();

  const Matrix mt = ts.match_target_matrix();
  const Matrix ms = ts.match_source_matrix();

  // Free variables: [alpha (m), beta_{I_t} (kt), theta_{I_s} (ks)].
  Matrix z = Matrix::Zero(nt + ns, m + kt + ks);
  Vector y(nt + ns);
  const double wt = 1.0 / std::sqrt(static_cast<double>(nt)), ws = 1.0 / std::sqrt(static_cast<double>(ns));
  if (m > 0) {
    z.block(0, 0, nt, m) = wt * columns(target.design, ts.target_shared) * mt;
    z.block(nt, 0, ns, m) = ws * columns(source.design, ts.source_shared) * ms;
  }
  if (kt > 0) z.block(0, m, nt, kt) = wt * columns(target.design, ts.target_specific);
  if (ks > 0) z.block(nt, m + kt, ns, ks) = ws * columns(source.design, ts.source_specific);
  y.head(nt) = wt * target.response;
  y.tail(ns) = ws * source.response;

  Vector sol(m + kt + ks);
  if (sol.size() > 0) {
    const Matrix normal = z.transpose() * z;
    Eigen::LDLT<Matrix> ldlt(normal);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().cwiseAbs().minCoeff() <= 1e-12 * std::max(1.0, normal.diagonal().cwiseAbs().maxCoeff()))
      throw NumericalError("oracle reference: singular normal equations");
    sol = ldlt.solve(z.transpose() * y);
  }
  return assemble(ts, sol.head(m), sol.segment(m, kt), sol.tail(ks));
}

}  // namespace cstl
