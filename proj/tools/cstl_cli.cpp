// Command-line front end: config file plus flag overrides, then run_command.

#include "cstl/commands.hpp"
#include "cstl/version.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

namespace {

struct Flag {
  const char* name;
  const char* help;
};

// Flags that map one-to-one onto configuration keys.
constexpr Flag kFlags[] = {
    {"command", "simulate | fit | oracle | tune"},
    {"setting", "S1, S2, S3_noperm, S3_perm, S4, EX1 or EX2"},
    {"m", "moved support entries (S1, S2)"},
    {"h", "heterogeneity strength (S3)"},
    {"nt", "target sample size"},
    {"ns", "source sample size"},
    {"dt", "target dimension"},
    {"ds", "source dimension (S4; 0 = same as target)"},
    {"reps", "simulation replicates"},
    {"seed", "base seed"},
    {"lambda0-grid", "comma-separated lambda0 candidates"},
    {"lambda1-grid", "comma-separated lambda1 candidates"},
    {"rho0", "ADMM penalty for the sparsity split"},
    {"rho1", "ADMM penalty for the fusion split"},
    {"scad-a", "SCAD shape parameter (> 2)"},
    {"eps-fuse", "fusion tolerance for degrees of freedom"},
    {"eps-abs", "ADMM absolute tolerance"},
    {"max-iter", "ADMM iteration cap per grid point"},
    {"out", "output directory"},
    {"target", "target CSV (fit, oracle, tune)"},
    {"source", "source CSV (fit, oracle, tune)"},
    {"test", "optional target test CSV"},
    {"beta-true", "true target coefficients (oracle)"},
    {"theta-true", "true source coefficients (oracle)"},
    {"response", "response column name (default: last column)"},
    {"methods", "comma-separated subset of lasso,cstl,oracle (simulate)"},
    {"split-fraction", "fit: training fraction for repeated holdout splits (0 = off)"},
    {"repeats", "fit: number of holdout splits"},
    {"threads", "worker threads (0 = all cores)"},
    {"standardize", "standardize columns in the Lasso initial fits (true/false)"},
    {"augment-noise", "append a pure-noise target column before fitting (true/false)"},
    {"covariance-rho", "AR(1) covariate correlation"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-semantic transfer learning for high-dimensional linear regression"};
  app.set_help_flag("--help", "Print this help message and exit");  // --h is the heterogeneity flag
  app.set_version_flag("--version", std::string(cstl::kVersion));

  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file; flags override it");
  std::map<std::string, std::string> overrides;
  for (const auto& f : kFlags) app.add_option(std::string("--") + f.name, overrides[f.name], f.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  cstl::RunConfig cfg;
  try {
    if (!config_path.empty())
      for (const auto& [k, v] : cstl::read_key_values(config_path)) cstl::apply(cfg, k, v);
    for (const auto& f : kFlags)
      if (app.count(std::string("--") + f.name) > 0) cstl::apply(cfg, f.name, overrides[f.name]);
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "cstl: configuration error: " << e.what() << '\n';
    return 1;
  }

  try {
    const auto outcome = cstl::run_command(cfg);
    for (const auto& m : outcome.messages) std::cout << m << '\n';
    for (const auto& a : outcome.artifacts) std::cout << "wrote " << a.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "cstl: " << cstl::to_string(cfg.command) << " failed: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
