#include "cstl/simulation.hpp"

#include "cstl/lasso.hpp"
#include "cstl/metrics.hpp"
#include "cstl/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace cstl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// First `k` entries of a uniformly shuffled copy of `pool`.
std::vector<int> draw_without_replacement(std::vector<int> pool, int k, std::mt19937_64& rng) {
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> r(static_cast<std::size_t>(std::max(0, hi - lo)));
  std::iota(r.begin(), r.end(), lo);
  return r;
}

double draw_perturbation(double h, std::mt19937_64& rng) {
  if (h == 0.0) return 0.0;
  std::normal_distribution<double> nd(h, std::abs(h) / 3.0);
  return nd(rng);
}

Dataset simulate(const Matrix& x, const Vector& coef, Domain dom, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Dataset ds;
  ds.domain = dom;
  ds.design = x;
  ds.response = x * coef;
  for (Eigen::Index i = 0; i < ds.response.size(); ++i) ds.response[i] += nd(rng);
  return ds;
}

}  // namespace

std::string to_string(Setting s) {
  switch (s) {
    case Setting::S1: return "S1";
    case Setting::S2: return "S2";
    case Setting::S3_noperm: return "S3_noperm";
    case Setting::S3_perm: return "S3_perm";
    case Setting::S4: return "S4";
    case Setting::EX1: return "EX1";
    case Setting::EX2: return "EX2";
  }
  return "?";
}

Setting parse_setting(const std::string& name) {
  for (Setting s : {Setting::S1, Setting::S2, Setting::S3_noperm, Setting::S3_perm, Setting::S4, Setting::EX1,
                    Setting::EX2})
    if (to_string(s) == name) return s;
  throw InvalidInput("unknown setting '" + name + "' (expected S1, S2, S3_noperm, S3_perm, S4, EX1 or EX2)");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::lasso: return "lasso";
    case Method::cstl: return "cstl";
    case Method::oracle: return "oracle";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::lasso, Method::cstl, Method::oracle})
    if (to_string(m) == name) return m;
  throw InvalidInput("unknown method '" + name + "' (expected lasso, cstl or oracle)");
}

int ScenarioSpec::source_dim() const {
  if (setting == Setting::EX1 || setting == Setting::EX2) return 3;
  return d_s > 0 ? d_s : d_t;
}

std::vector<std::string> ScenarioSpec::validate() const {
  std::vector<std::string> warnings;
  auto fail = [&](const std::string& msg) { throw InvalidInput("scenario " + to_string(setting) + ": " + msg); };
  if (n_t < 2 || n_s < 2) fail("n_t and n_s must be >= 2");
  if (replicates < 1) fail("replicates must be >= 1");
  if (n_test < 1) fail("n_test must be >= 1");
  if (!(std::abs(covariance_rho) < 1.0)) fail("covariance rho must satisfy |rho| < 1");
  if (setting == Setting::EX1 || setting == Setting::EX2) return warnings;
  if (d_t < 1) fail("d_t must be >= 1");
  const int ds = source_dim();
  switch (setting) {
    case Setting::S1:
    case Setting::S2: {
      const int active = setting == Setting::S1 ? 30 : 8;
      if (ds != d_t) fail("d_s must equal d_t");
      if (m < 0) fail("m must be >= 0");
      if (m > active || d_t < active + m) fail("m = " + std::to_string(m) + " does not fit d_t = " + std::to_string(d_t));
      if (m > 4) warnings.push_back("m = " + std::to_string(m) + " is outside the studied range {0..4}");
      break;
    }
    case Setting::S3_noperm:
    case Setting::S3_perm:
      if (ds != d_t) fail("d_s must equal d_t");
      if (d_t < 8) fail("d_t must be >= 8");
      if (h < 0.0 || h > 0.5) warnings.push_back("h = " + std::to_string(h) + " is outside the studied range [0, 0.5]");
      break;
    case Setting::S4:
      if (d_t < 8 || ds < 8) fail("d_t and d_s must be >= 8");
      break;
    default: break;
  }
  return warnings;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t rep) {
  return splitmix64(splitmix64(seed) ^ (rep * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

Matrix gen_ar1_gaussian(int n, int d, double rho, std::mt19937_64& rng) {
  if (!(std::abs(rho) < 1.0)) throw InvalidInput("gen_ar1_gaussian: |rho| must be < 1");
  std::normal_distribution<double> nd(0.0, 1.0);
  const double innov = std::sqrt(1.0 - rho * rho);
  Matrix x(n, d);
  for (int i = 0; i < n; ++i) {
    double prev = 0.0;
    for (int j = 0; j < d; ++j) {
      const double xi = nd(rng);
      prev = j == 0 ? xi : rho * prev + innov * xi;
      x(i, j) = prev;
    }
  }
  return x;
}

Matrix gen_ar1_gaussian(int n, int d, double rho, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return gen_ar1_gaussian(n, d, rho, rng);
}

ScenarioInstance make_scenario(const ScenarioSpec& spec, int rep) {
  spec.validate();
  std::mt19937_64 rng(derive_seed(spec.seed, static_cast<std::uint64_t>(rep)));
  const bool low_dim = spec.setting == Setting::EX1 || spec.setting == Setting::EX2;
  const int dt = low_dim ? 3 : spec.d_t;
  const int ds = spec.source_dim();
  const double rho = low_dim ? 0.0 : spec.covariance_rho;

  Vector beta = Vector::Zero(dt), theta = Vector::Zero(ds);
  switch (spec.setting) {
    case Setting::S1: {
      beta.head(30).setOnes();
      theta = beta;
      const auto i0 = draw_without_replacement(range(0, 30), spec.m, rng);
      const auto i1 = draw_without_replacement(range(30, dt), spec.m, rng);
      for (int j : i0) theta[j] = 0.0;
      for (int j : i1) theta[j] = 1.0;
      break;
    }
    case Setting::S2: {
      beta.head(8) << -4, -3, -2, -1, 1, 2, 3, 4;
      theta = beta;
      const auto i0 = draw_without_replacement(range(0, 8), spec.m, rng);
      const auto i1 = draw_without_replacement(range(8, dt), spec.m, rng);
      for (std::size_t k = 0; k < i0.size(); ++k) {
        theta[i1[k]] = beta[i0[k]];
        theta[i0[k]] = 0.0;
      }
      break;
    }
    case Setting::S3_noperm:
    case Setting::S3_perm: {
      beta.head(8).setOnes();
      Vector shifted = beta;
      for (int j = 0; j < 4; ++j) shifted[j] += draw_perturbation(spec.h, rng);
      if (spec.setting == Setting::S3_perm) {
        std::vector<int> perm = range(0, dt);
        std::shuffle(perm.begin(), perm.end(), rng);
        for (int i = 0; i < dt; ++i) theta[i] = shifted[perm[static_cast<std::size_t>(i)]];
      } else {
        theta = shifted;
      }
      break;
    }
    case Setting::S4: {
      beta.head(8).setOnes();
      for (int j = 0; j < 4; ++j) theta[j] = 1.0 + draw_perturbation(0.5, rng);
      theta.segment(4, 4).setOnes();
      break;
    }
    case Setting::EX1:
      beta << 1, 2, 3;
      theta << 2, 3, 1;
      break;
    case Setting::EX2:
      beta << 1, 2, 3;
      theta << 1, 1, 2;
      break;
  }

  ScenarioInstance inst;
  inst.beta_true = CoefficientVector(beta, Domain::target);
  inst.theta_true = CoefficientVector(theta, Domain::source);
  const Matrix xt = gen_ar1_gaussian(spec.n_t, dt, rho, rng);
  inst.target = simulate(xt, beta, Domain::target, rng);
  const Matrix xs = gen_ar1_gaussian(spec.n_s, ds, rho, rng);
  inst.source = simulate(xs, theta, Domain::source, rng);
  const Matrix xtest = gen_ar1_gaussian(spec.n_test, dt, rho, rng);
  inst.test = simulate(xtest, beta, Domain::target, rng);
  inst.structure = build_transfer_structure(inst.beta_true, inst.theta_true, 0.0);
  return inst;
}

TuningGrid default_grid_for(const ScenarioSpec& spec) {
  const bool low_dim = spec.setting == Setting::EX1 || spec.setting == Setting::EX2;
  return TuningGrid::scaled_default(low_dim ? 3 : spec.d_t, spec.n_t);
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

std::vector<ReplicateRecord> run_one(const ScenarioSpec& spec, int rep, const std::vector<Method>& methods,
                                     const HarnessOptions& opts, const TuningGrid& grid) {
  std::vector<ReplicateRecord> out;
  const ScenarioInstance inst = make_scenario(spec, rep);

  // The target Lasso doubles as the CSTL initial estimate.
  std::optional<LassoCvResult> target_lasso;
  auto get_target_lasso = [&]() -> const LassoCvResult& {
    if (!target_lasso) target_lasso = lasso_cv(inst.target, opts.cstl.lasso);
    return *target_lasso;
  };

  for (Method m : methods) {
    ReplicateRecord rec;
    rec.method = m;
    rec.replicate = rep;
    rec.lambda0 = kNaN;
    rec.lambda1 = kNaN;
    try {
      switch (m) {
        case Method::lasso: {
          const LassoCvResult& lr = get_target_lasso();
          rec.beta_hat = lr.fit.coef.values;
          rec.lambda0 = lr.chosen_lambda;
          rec.iterations = lr.fit.sweeps;
          rec.converged = lr.fit.converged;
          break;
        }
        case Method::cstl: {
          const LassoCvResult& lr = get_target_lasso();
          LassoCvResult sr = lasso_cv(inst.source, opts.cstl.lasso);
          sr.fit.coef.domain = Domain::source;
          CoefficientVector binit = lr.fit.coef;
          binit.domain = Domain::target;
          const FitResult fr = grid_search_cstl(inst.target, inst.source, grid, opts.cstl, binit, sr.fit.coef);
          rec.beta_hat = fr.beta.values;
          rec.theta_hat = fr.theta.values;
          rec.lambda0 = fr.lambda0;
          rec.lambda1 = fr.lambda1;
          rec.iterations = fr.iterations;
          rec.converged = fr.converged;
          break;
        }
        case Method::oracle: {
          const OracleFit of = oracle_fit(inst.target, inst.source, inst.structure);
          rec.beta_hat = of.beta_ora.values;
          rec.theta_hat = of.theta_ora.values;
          rec.iterations = 0;
          rec.converged = true;
          break;
        }
      }
      rec.sse = sse(rec.beta_hat, inst.beta_true.values);
      rec.mse = mse(rec.beta_hat, inst.test);
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.converged = false;
      rec.error = e.what();
      rec.sse = kNaN;
      rec.mse = kNaN;
    }
    if (!opts.keep_estimates) {
      rec.beta_hat.resize(0);
      rec.theta_hat.resize(0);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

std::vector<MethodSummary> summarise(const std::vector<ReplicateRecord>& rows, const std::vector<Method>& methods) {
  std::vector<MethodSummary> out;
  for (Method m : methods) {
    MethodSummary s;
    s.method = m;
    std::vector<double> e, p;
    for (const auto& r : rows) {
      if (r.method != m) continue;
      if (r.failed) {
        ++s.failures;
        continue;
      }
      e.push_back(r.sse);
      p.push_back(r.mse);
    }
    s.n = static_cast<int>(e.size());
    auto mean_se = [](const std::vector<double>& v, double& mean, double& se) {
      mean = kNaN;
      se = kNaN;
      if (v.empty()) return;
      mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      if (v.size() < 2) return;
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      se = std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
    };
    mean_se(e, s.sse_mean, s.sse_stderr);
    mean_se(p, s.mse_mean, s.mse_stderr);
    out.push_back(s);
  }
  return out;
}

ReplicationResults run_replications(const ScenarioSpec& spec, const std::vector<Method>& methods,
                                    const HarnessOptions& opts) {
  if (methods.empty()) throw InvalidInput("run_replications: no methods requested");
  ReplicationResults res;
  res.warnings = spec.validate();
  const TuningGrid grid = opts.grid ? *opts.grid : default_grid_for(spec);
  grid.validate();

  std::vector<std::vector<ReplicateRecord>> per_rep(static_cast<std::size_t>(spec.replicates));
  parallel_for(spec.replicates, opts.threads, [&](int i) {
    per_rep[static_cast<std::size_t>(i)] = run_one(spec, i + 1, methods, opts, grid);
  });

  int failed_reps = 0;
  std::string first_error;
  for (auto& rows : per_rep) {
    bool failed = false;
    for (auto& r : rows) {
      if (r.failed) {
        failed = true;
        if (first_error.empty()) first_error = to_string(r.method) + " replicate " + std::to_string(r.replicate) + ": " + r.error;
      }
      res.rows.push_back(std::move(r));
    }
    failed_reps += failed ? 1 : 0;
  }
  if (failed_reps > 0 && 5 * failed_reps >= spec.replicates)
    throw NumericalError("run_replications: " + std::to_string(failed_reps) + " of " +
                         std::to_string(spec.replicates) + " replicates failed; first failure: " + first_error);
  res.summaries = summarise(res.rows, methods);
  return res;
}

PairwiseSummary pairwise_difference_summary(const std::vector<FitResult>& fits, const ScenarioInstance& truth) {
  if (fits.empty()) throw InvalidInput("pairwise_difference_summary: no fits");
  const Vector& b = truth.beta_true.values;
  const Vector& t = truth.theta_true.values;
  PairwiseSummary out;
  out.true_abs_diff = d_apply((Vector(b.size() + t.size()) << b, t).finished(), static_cast<int>(b.size()),
                              static_cast<int>(t.size()))
                          .cwiseAbs();
  out.mean_abs_diff = PairMatrix::Zero(b.size(), t.size());
  for (const auto& f : fits) {
    if (f.beta.size() != b.size() || f.theta.size() != t.size())
      throw InvalidInput("pairwise_difference_summary: fit dimensions do not match truth");
    Vector eta(b.size() + t.size());
    eta << f.beta.values, f.theta.values;
    out.mean_abs_diff += d_apply(eta, static_cast<int>(b.size()), static_cast<int>(t.size())).cwiseAbs();
  }
  out.mean_abs_diff /= static_cast<double>(fits.size());
  return out;
}

}  // namespace cstl
