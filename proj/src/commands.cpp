#include "cstl/commands.hpp"

#include "cstl/csv_io.hpp"
#include "cstl/metrics.hpp"
#include "cstl/oracle.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace cstl {

namespace {

namespace fs = std::filesystem;

struct Inputs {
  Dataset target;
  Dataset source;
  std::optional<Dataset> test;
};

Inputs load_inputs(const RunConfig& cfg) {
  Inputs in;
  in.target = load_csv(*cfg.target_csv, cfg.response, Domain::target);
  in.source = load_csv(*cfg.source_csv, cfg.response, Domain::source);
  require_valid(in.target, "target data");
  require_valid(in.source, "source data");
  if (cfg.test_csv) {
    in.test = load_csv(*cfg.test_csv, cfg.response, Domain::target);
    require_valid(*in.test, "test data");
    if (in.test->cols() != in.target.cols())
      throw InvalidInput("test data has " + std::to_string(in.test->cols()) + " covariates, target has " +
                         std::to_string(in.target.cols()));
  }
  return in;
}

//! Data from CSV files when given, otherwise replicate 1 of the configured scenario.
Inputs inputs_or_scenario(const RunConfig& cfg, std::optional<ScenarioInstance>& instance) {
  if (cfg.target_csv && cfg.source_csv) return load_inputs(cfg);
  instance = make_scenario(*cfg.scenario_spec(), 1);
  return Inputs{instance->target, instance->source, instance->test};
}

std::string coefficient_csv(const Vector& beta, const Vector& theta) {
  std::ostringstream os;
  os << "domain,index,value\n";
  for (Eigen::Index j = 0; j < beta.size(); ++j) os << "target," << j + 1 << ',' << format_double(beta[j]) << '\n';
  for (Eigen::Index l = 0; l < theta.size(); ++l) os << "source," << l + 1 << ',' << format_double(theta[l]) << '\n';
  return os.str();
}

fs::path emit(CommandOutcome& out, const fs::path& dir, const std::string& name, const std::string& content) {
  const fs::path p = dir / name;
  write_text(p, content);
  out.artifacts.push_back(p);
  return p;
}

void run_simulate(const RunConfig& cfg, CommandOutcome& out) {
  const ScenarioSpec spec = *cfg.scenario_spec();
  HarnessOptions ho;
  ho.cstl = cfg.cstl_options();
  ho.threads = cfg.threads;
  ho.keep_estimates = false;
  const bool low_dim = spec.setting == Setting::EX1 || spec.setting == Setting::EX2;
  ho.grid = cfg.grid_for(low_dim ? 3 : spec.d_t, spec.n_t);

  const ReplicationResults res = run_replications(spec, cfg.methods, ho);
  const ResultsTable table = to_results_table(res);
  write_results(table, cfg.out / "results.csv");
  out.artifacts.push_back(cfg.out / "results.csv");
  write_summary(table, cfg.out / "summary.csv");
  out.artifacts.push_back(cfg.out / "summary.csv");

  for (const auto& w : res.warnings) out.messages.push_back("warning: " + w);
  for (const auto& s : res.summaries) {
    std::ostringstream os;
    os << to_string(s.method) << ": SSE " << s.sse_mean << " (se " << s.sse_stderr << "), MSE " << s.mse_mean
       << " (se " << s.mse_stderr << "), failures " << s.failures << "/" << s.n;
    out.messages.push_back(os.str());
  }
}

//! Repeated random train/holdout splits of the target data; source data is always used in full.
void run_split_protocol(const RunConfig& cfg, const Inputs& in, CommandOutcome& out) {
  const auto n = static_cast<int>(in.target.rows());
  const int n_train = static_cast<int>(std::floor(cfg.split_fraction * n));
  if (n_train < 2 || n - n_train < 1)
    throw InvalidInput("split-fraction " + format_double(cfg.split_fraction) + " leaves too few rows in a split");

  struct SplitRow {
    double lasso_mse = NAN;
    double cstl_mse = NAN;
  };
  std::vector<SplitRow> rows(static_cast<std::size_t>(cfg.repeats));
  const CstlOptions opts = cfg.cstl_options();
  const TuningGrid grid = cfg.grid_for(static_cast<int>(in.target.cols()), n_train);

  parallel_for(cfg.repeats, cfg.threads, [&](int r) {
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(r + 1)));
    std::shuffle(perm.begin(), perm.end(), rng);
    const std::vector<Eigen::Index> train_idx(perm.begin(), perm.begin() + n_train);
    const std::vector<Eigen::Index> test_idx(perm.begin() + n_train, perm.end());
    const Dataset train = select_rows(in.target, train_idx);
    const Dataset test = select_rows(in.target, test_idx);

    auto [init_t, init_s] = initial_estimates(train, in.source, opts.lasso);
    const FitResult fit = grid_search_cstl(train, in.source, grid, opts, init_t.fit.coef, init_s.fit.coef);
    rows[static_cast<std::size_t>(r)] = {mse(init_t.fit.coef.values, test), mse(fit.beta.values, test)};
  });

  std::ostringstream os;
  os << "repeat,method,mse,log_mse\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    os << r + 1 << ",lasso," << format_double(rows[r].lasso_mse) << ',' << format_double(std::log(rows[r].lasso_mse))
       << '\n';
    os << r + 1 << ",cstl," << format_double(rows[r].cstl_mse) << ',' << format_double(std::log(rows[r].cstl_mse))
       << '\n';
  }
  emit(out, cfg.out, "split_results.csv", os.str());

  auto mean_se = [&](auto get) {
    double m = 0.0;
    for (const auto& r : rows) m += std::log(get(r));
    m /= static_cast<double>(rows.size());
    double ss = 0.0;
    for (const auto& r : rows) ss += std::pow(std::log(get(r)) - m, 2);
    const double se = rows.size() > 1 ? std::sqrt(ss / static_cast<double>(rows.size() - 1) / rows.size()) : NAN;
    return std::pair{m, se};
  };
  const auto [lm, lse] = mean_se([](const SplitRow& r) { return r.lasso_mse; });
  const auto [cm, cse] = mean_se([](const SplitRow& r) { return r.cstl_mse; });
  std::ostringstream ss;
  ss << "method,repeats,log_mse_mean,log_mse_stderr\n";
  ss << "lasso," << rows.size() << ',' << format_double(lm) << ',' << format_double(lse) << '\n';
  ss << "cstl," << rows.size() << ',' << format_double(cm) << ',' << format_double(cse) << '\n';
  emit(out, cfg.out, "split_summary.csv", ss.str());
  out.messages.push_back("holdout log MSE: lasso " + format_double(lm) + ", cstl " + format_double(cm));
}

void run_fit(const RunConfig& cfg, CommandOutcome& out) {
  const Inputs in = load_inputs(cfg);
  const TuningGrid grid = cfg.grid_for(static_cast<int>(in.target.cols()), static_cast<int>(in.target.rows()));
  const FitResult fit = grid_search_cstl(in.target, in.source, grid, cfg.cstl_options());

  emit(out, cfg.out, "coefficients.csv", coefficient_csv(fit.beta.values, fit.theta.values));

  std::ostringstream pd;
  pd << "target_index,source_index,abs_diff\n";
  for (Eigen::Index j = 0; j < fit.beta.values.size(); ++j)
    for (Eigen::Index l = 0; l < fit.theta.values.size(); ++l)
      pd << j + 1 << ',' << l + 1 << ',' << format_double(std::abs(fit.beta.values[j] - fit.theta.values[l])) << '\n';
  emit(out, cfg.out, "pairwise_diff.csv", pd.str());

  const double test_mse = in.test ? mse(fit.beta.values, *in.test) : NAN;
  std::ostringstream summary;
  summary << "lambda0,lambda1,bic,df,objective,iterations,converged,test_mse\n"
      << format_double(fit.lambda0) << ',' << format_double(fit.lambda1) << ',' << format_double(fit.bic) << ','
      << fit.df << ',' << format_double(fit.objective) << ',' << fit.iterations << ','
      << (fit.converged ? "true" : "false") << ',' << format_double(test_mse) << '\n';
  emit(out, cfg.out, "fit_summary.csv", summary.str());
  out.messages.push_back("selected lambda0 = " + format_double(fit.lambda0) + ", lambda1 = " +
                         format_double(fit.lambda1) + ", df = " + std::to_string(fit.df));
  if (!fit.converged) out.messages.push_back("warning: ADMM hit max-iter at the selected grid point");

  if (cfg.split_fraction > 0.0) run_split_protocol(cfg, in, out);
}

void run_oracle(const RunConfig& cfg, CommandOutcome& out) {
  std::optional<ScenarioInstance> instance;
  const Inputs in = inputs_or_scenario(cfg, instance);
  CoefficientVector beta_true, theta_true;
  if (instance) {
    beta_true = instance->beta_true;
    theta_true = instance->theta_true;
  } else {
    beta_true = {read_vector(*cfg.beta_true), Domain::target};
    theta_true = {read_vector(*cfg.theta_true), Domain::source};
    if (beta_true.size() != in.target.cols())
      throw InvalidInput("beta-true has " + std::to_string(beta_true.size()) + " entries, target data has " +
                         std::to_string(in.target.cols()) + " covariates");
    if (theta_true.size() != in.source.cols())
      throw InvalidInput("theta-true has " + std::to_string(theta_true.size()) + " entries, source data has " +
                         std::to_string(in.source.cols()) + " covariates");
  }
  const TransferStructure ts = build_transfer_structure(beta_true, theta_true);
  const OracleFit fit = oracle_fit(in.target, in.source, ts);

  emit(out, cfg.out, "oracle_coefficients.csv", coefficient_csv(fit.beta_ora.values, fit.theta_ora.values));
  std::ostringstream sv;
  sv << "representative,value\n";
  for (std::size_t k = 0; k < ts.canonical.size(); ++k)
    sv << ts.canonical[k] + 1 << ',' << format_double(fit.shared_values[static_cast<Eigen::Index>(k)]) << '\n';
  emit(out, cfg.out, "shared_values.csv", sv.str());

  const double err = sse(fit.beta_ora.values, beta_true.values);
  const double test_mse = in.test ? mse(fit.beta_ora.values, *in.test) : NAN;
  std::ostringstream os;
  os << "pairs,shared_values,sse,test_mse\n"
     << ts.pairs.size() << ',' << ts.canonical.size() << ',' << format_double(err) << ',' << format_double(test_mse)
     << '\n';
  emit(out, cfg.out, "oracle_summary.csv", os.str());
  out.messages.push_back("oracle SSE " + format_double(err) + " with " + std::to_string(ts.pairs.size()) +
                         " transferable pairs");
}

void run_tune(const RunConfig& cfg, CommandOutcome& out) {
  std::optional<ScenarioInstance> instance;
  const Inputs in = inputs_or_scenario(cfg, instance);
  const TuningGrid grid = cfg.grid_for(static_cast<int>(in.target.cols()), static_cast<int>(in.target.rows()));
  const FitResult fit = grid_search_cstl(in.target, in.source, grid, cfg.cstl_options());

  std::ostringstream os;
  os << "lambda0,lambda1,bic,df,objective,iterations,converged,ok\n";
  for (const auto& p : fit.surface) {
    os << format_double(p.lambda0) << ',' << format_double(p.lambda1) << ',' << format_double(p.ok ? p.bic : NAN)
       << ',' << p.df << ',' << format_double(p.ok ? p.objective : NAN) << ',' << p.iterations << ','
       << (p.converged ? "true" : "false") << ',' << (p.ok ? "true" : "false") << '\n';
  }
  emit(out, cfg.out, "bic_surface.csv", os.str());
  out.messages.push_back(std::to_string(fit.surface.size()) + " grid points; BIC minimum " + format_double(fit.bic) +
                         " at lambda0 = " + format_double(fit.lambda0) + ", lambda1 = " + format_double(fit.lambda1));
}

}  // namespace

CommandOutcome run_command(const RunConfig& cfg) {
  cfg.validate();
  CommandOutcome out;
  emit(out, cfg.out, "manifest.txt", manifest_text(cfg));
  switch (cfg.command) {
    case Command::simulate: run_simulate(cfg, out); break;
    case Command::fit: run_fit(cfg, out); break;
    case Command::oracle: run_oracle(cfg, out); break;
    case Command::tune: run_tune(cfg, out); break;
  }
  return out;
}

}  // namespace cstl
