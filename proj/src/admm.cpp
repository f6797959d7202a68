#include "cstl/admm.hpp"

#include <cmath>

namespace cstl {

PooledSystem::PooledSystem(const Dataset& target, const Dataset& source) {
  require_valid(target, "target dataset");
  require_valid(source, "source dataset");
  if (target.rows() == 0 || source.rows() == 0) throw InvalidInput("pooled system needs nonempty datasets");
  const double st = 1.0 / std::sqrt(static_cast<double>(target.rows()));
  const double ss = 1.0 / std::sqrt(static_cast<double>(source.rows()));
  x_t_ = target.design * st;
  x_s_ = source.design * ss;
  y_t_ = target.response * st;
  y_s_ = source.response * ss;
  xty2_.resize(dim());
  xty2_.head(d_t()) = 2.0 * x_t_.transpose() * y_t_;
  xty2_.tail(d_s()) = 2.0 * x_s_.transpose() * y_s_;
}

Matrix structural_dtd(int d_t, int d_s) {
  Matrix g = Matrix::Zero(d_t + d_s, d_t + d_s);
  g.topLeftCorner(d_t, d_t).diagonal().setConstant(d_s);
  g.bottomRightCorner(d_s, d_s).diagonal().setConstant(d_t);
  g.topRightCorner(d_t, d_s).setConstant(-1.0);
  g.bottomLeftCorner(d_s, d_t).setConstant(-1.0);
  return g;
}

FactoredSystem build_factored_system(const PooledSystem& ps, double rho0, double rho1) {
  if (!(rho0 > 0.0) || !(rho1 > 0.0)) throw InvalidInput("ADMM penalties rho0 and rho1 must be > 0");
  FactoredSystem fs;
  fs.rho0 = rho0;
  fs.rho1 = rho1;
  fs.d_t = ps.d_t();
  fs.d_s = ps.d_s();
  fs.gram = rho1 * structural_dtd(fs.d_t, fs.d_s);
  fs.gram.topLeftCorner(fs.d_t, fs.d_t).noalias() += 2.0 * ps.x_target().transpose() * ps.x_target();
  fs.gram.bottomRightCorner(fs.d_s, fs.d_s).noalias() += 2.0 * ps.x_source().transpose() * ps.x_source();
  fs.gram.topLeftCorner(fs.d_t, fs.d_t).diagonal().array() += rho0;
  // Products above are symmetric only up to rounding; mirror the lower triangle.
  fs.gram.triangularView<Eigen::StrictlyUpper>() = fs.gram.transpose().triangularView<Eigen::StrictlyUpper>();
  fs.factor.compute(fs.gram);
  if (fs.factor.info() != Eigen::Success)
    throw NumericalError("Cholesky factorisation of the ADMM system failed (matrix not positive definite)");
  return fs;
}

PairMatrix d_apply(const Vector& eta, int d_t, int d_s) {
  if (eta.size() != d_t + d_s) throw InvalidInput("d_apply: eta has wrong length");
  PairMatrix out(d_t, d_s);
  out.colwise() = eta.head(d_t);
  out.rowwise() -= eta.tail(d_s).transpose();
  return out;
}

Vector dt_apply(const PairMatrix& v) {
  // Sequential sums in index order, so the result matches an explicit D^T v exactly.
  const Eigen::Index d_t = v.rows(), d_s = v.cols();
  Vector out = Vector::Zero(d_t + d_s);
  for (Eigen::Index j = 0; j < d_t; ++j)
    for (Eigen::Index l = 0; l < d_s; ++l) {
      out[j] += v(j, l);
      out[d_t + l] -= v(j, l);
    }
  return out;
}

Vector dt_apply(const Vector& v, int d_t, int d_s) {
  if (v.size() != static_cast<Eigen::Index>(d_t) * d_s) throw InvalidInput("dt_apply: v has wrong length");
  return dt_apply(PairMatrix(Eigen::Map<const PairMatrix>(v.data(), d_t, d_s)));
}

double objective_value(const PooledSystem& ps, const WeightScheme& ws, const Vector& beta, const Vector& theta,
                       double lambda0, double lambda1) {
  if (beta.size() != ps.d_t() || theta.size() != ps.d_s() || ws.d_t() != ps.d_t() || ws.d_s() != ps.d_s() ||
      ws.pair_weights.rows() != ps.d_t())
    throw InvalidInput("objective_value: dimension mismatch");
  double pen0 = 0.0;
  for (int j = 0; j < ps.d_t(); ++j) pen0 += ws.feature_weights[j] * std::abs(beta[j]);
  double pen1 = 0.0;
  for (int j = 0; j < ps.d_t(); ++j)
    for (int l = 0; l < ps.d_s(); ++l) pen1 += ws.pair_weights(j, l) * std::abs(beta[j] - theta[l]);
  return ps.target_loss(beta) + ps.source_loss(theta) + lambda0 * pen0 + lambda1 * pen1;
}

namespace {

void init_state(AdmmState& st, const Vector& eta, int d_t, int d_s) {
  st.eta = eta;
  st.z = eta.head(d_t);
  st.delta = d_apply(eta, d_t, d_s);
  st.u = Vector::Zero(d_t);
  st.v = PairMatrix::Zero(d_t, d_s);
  st.iter = 0;
  st.residual_history.clear();
}

bool state_matches(const AdmmState& st, int d_t, int d_s) {
  return st.eta.size() == d_t + d_s && st.z.size() == d_t && st.u.size() == d_t && st.delta.rows() == d_t &&
         st.delta.cols() == d_s && st.v.rows() == d_t && st.v.cols() == d_s;
}

}  // namespace

SolveResult admm_solve(const PooledSystem& ps, const FactoredSystem& fs, const WeightScheme& ws, double lambda0,
                       double lambda1, const AdmmOptions& opts) {
  const int dt = ps.d_t(), ds = ps.d_s();
  if (fs.d_t != dt || fs.d_s != ds) throw InvalidInput("admm_solve: factored system does not match data");
  if (ws.d_t() != dt || ws.d_s() != ds || ws.pair_weights.rows() != dt)
    throw InvalidInput("admm_solve: weight scheme does not match data");
  if (!(lambda0 >= 0.0) || !(lambda1 >= 0.0)) throw InvalidInput("admm_solve: lambdas must be >= 0");
  if (opts.max_iter < 1) throw InvalidInput("admm_solve: max_iter must be >= 1");

  const double rho0 = fs.rho0, rho1 = fs.rho1;
  const double default_eps = opts.eps_abs * std::sqrt(static_cast<double>(dt) + static_cast<double>(dt) * ds);
  const double eps_pri = opts.eps_pri > 0.0 ? opts.eps_pri : default_eps;
  const double eps_dual = opts.eps_dual > 0.0 ? opts.eps_dual : default_eps;

  AdmmState st;
  if (opts.warm_start) {
    if (!state_matches(*opts.warm_start, dt, ds)) throw InvalidInput("admm_solve: warm start has wrong shape");
    st = *opts.warm_start;
    st.iter = 0;
    st.residual_history.clear();
  } else if (opts.initial_eta) {
    if (opts.initial_eta->size() != dt + ds) throw InvalidInput("admm_solve: initial eta has wrong length");
    init_state(st, *opts.initial_eta, dt, ds);
  } else {
    init_state(st, Vector::Zero(dt + ds), dt, ds);
  }

  const Vector tau0 = (lambda0 / rho0) * ws.feature_weights;
  const PairMatrix tau1 = (lambda1 / rho1) * ws.pair_weights;

  Vector rhs(dt + ds), z_old(dt);
  PairMatrix diff(dt, ds), delta_old(dt, ds), work(dt, ds);
  SolveResult res;

  for (int it = 0; it < opts.max_iter; ++it) {
    // eta-update
    work = rho1 * st.delta - st.v;
    rhs = ps.twice_xty();
    rhs.head(dt) += rho0 * st.z - st.u;
    rhs.head(dt) += work.rowwise().sum();
    rhs.tail(ds) -= work.colwise().sum().transpose();
    st.eta = fs.factor.solve(rhs);
    const auto beta = st.eta.head(dt);
    const auto theta = st.eta.tail(ds);

    // z-update
    z_old = st.z;
    st.z = ((beta + st.u / rho0).array().abs() - tau0.array()).max(0.0) * (beta + st.u / rho0).array().sign();

    // delta-update
    diff.colwise() = beta;
    diff.rowwise() -= theta.transpose();
    delta_old = st.delta;
    work = diff + st.v / rho1;
    st.delta = (work.array().abs() - tau1.array()).max(0.0) * work.array().sign();

    // dual ascent
    st.u += rho0 * (beta - st.z);
    work = diff - st.delta;  // r1
    st.v += rho1 * work;

    const double r0 = (beta - st.z).norm();
    const double r1 = work.norm();
    const double s0 = rho0 * (st.z - z_old).norm();
    work = st.delta - delta_old;
    const double s1 = rho1 * std::sqrt(work.rowwise().sum().squaredNorm() + work.colwise().sum().squaredNorm());
    st.residual_history.push_back({r0, r1, s0, s1});
    st.iter = it + 1;
    if (std::max(r0, r1) <= eps_pri && std::max(s0, s1) <= eps_dual) {
      res.converged = true;
      break;
    }
  }

  res.iterations = st.iter;
  res.beta = CoefficientVector(st.eta.head(dt), Domain::target);
  res.theta = CoefficientVector(st.eta.tail(ds), Domain::source);
  res.objective = objective_value(ps, ws, res.beta.values, res.theta.values, lambda0, lambda1);
  res.state = std::move(st);
  return res;
}

SolveResult admm_solve(const PooledSystem& ps, const WeightScheme& ws, double lambda0, double lambda1, double rho0,
                       double rho1, const AdmmOptions& opts) {
  const FactoredSystem fs = build_factored_system(ps, rho0, rho1);
  return admm_solve(ps, fs, ws, lambda0, lambda1, opts);
}

}  // namespace cstl
