#include "cstl/run_config.hpp"

#include "cstl/csv_io.hpp"
#include "cstl/version.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <fstream>
#include <sstream>

namespace cstl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  const auto d = parse_double(v);
  if (!d || !std::isfinite(*d)) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return *d;
}

long long to_integer(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  long long x = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  const long long x = to_integer(key, v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ConfigError(key + ": value out of range");
  return static_cast<int>(x);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  std::uint64_t x = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<double> to_grid(const std::string& key, const std::string& v) {
  std::vector<double> g;
  for (const auto& item : split_list(v)) g.push_back(to_double(key, item));
  if (g.empty()) throw ConfigError(key + ": empty list");
  return g;
}

//! Shortest text that parses back to exactly `x`.
std::string shortest(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + shortest(v[i]);
  return s;
}

std::string absolute_string(const std::filesystem::path& p) {
  std::error_code ec;
  const auto abs = std::filesystem::absolute(p, ec);
  return (ec ? p : abs).lexically_normal().string();
}

bool has_csv_inputs(const RunConfig& c) { return c.target_csv && c.source_csv; }

void require_positive(const std::string& key, double v) {
  if (!(v > 0.0)) throw ConfigError(key + ": must be positive");
}

void require_exists(const std::string& key, const std::optional<std::filesystem::path>& p) {
  if (p && !std::filesystem::exists(*p)) throw ConfigError(key + ": file '" + p->string() + "' does not exist");
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::simulate: return "simulate";
    case Command::fit: return "fit";
    case Command::oracle: return "oracle";
    case Command::tune: return "tune";
  }
  return "?";
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::simulate, Command::fit, Command::oracle, Command::tune})
    if (to_string(c) == name) return c;
  throw ConfigError("command: unknown command '" + name + "' (expected simulate, fit, oracle or tune)");
}

std::optional<ScenarioSpec> RunConfig::scenario_spec() const {
  if (!setting) return std::nullopt;
  ScenarioSpec s = scenario;
  s.setting = *setting;
  s.seed = seed;
  return s;
}

CstlOptions RunConfig::cstl_options() const {
  CstlOptions o;
  o.rho0 = rho0;
  o.rho1 = rho1;
  o.scad_a = scad_a;
  o.max_iter = max_iter;
  o.eps_abs = eps_abs;
  o.lasso.seed = seed;
  o.lasso.standardize = standardize;
  o.augment_noise = augment_noise;
  o.noise_seed = derive_seed(seed, 0);
  return o;
}

TuningGrid RunConfig::grid_for(int d_t, int n_t) const {
  TuningGrid g = TuningGrid::scaled_default(d_t, n_t);
  if (!lambda0_grid.empty()) g.lambda0 = lambda0_grid;
  if (!lambda1_grid.empty()) g.lambda1 = lambda1_grid;
  g.eps_fuse = eps_fuse;
  std::sort(g.lambda0.begin(), g.lambda0.end(), std::greater<>());
  std::sort(g.lambda1.begin(), g.lambda1.end(), std::greater<>());
  return g;
}

void RunConfig::validate() const {
  require_positive("rho0", rho0);
  require_positive("rho1", rho1);
  if (!(scad_a > 2.0)) throw ConfigError("scad-a: must exceed 2");
  require_positive("eps-fuse", eps_fuse);
  require_positive("eps-abs", eps_abs);
  if (max_iter < 1) throw ConfigError("max-iter: must be at least 1");
  if (threads < 0) throw ConfigError("threads: must be non-negative");
  for (double l : lambda0_grid)
    if (!(l > 0.0)) throw ConfigError("lambda0-grid: values must be positive");
  for (double l : lambda1_grid)
    if (!(l > 0.0)) throw ConfigError("lambda1-grid: values must be positive");
  if (setting) {
    try {
      scenario_spec()->validate();
    } catch (const InvalidInput& e) {
      throw ConfigError(std::string("scenario: ") + e.what());
    }
  }
  require_exists("target", target_csv);
  require_exists("source", source_csv);
  require_exists("test", test_csv);
  require_exists("beta-true", beta_true);
  require_exists("theta-true", theta_true);

  switch (command) {
    case Command::simulate:
      if (!setting) throw ConfigError("setting: required for simulate");
      if (methods.empty()) throw ConfigError("methods: at least one method is required");
      break;
    case Command::fit:
      if (!target_csv) throw ConfigError("target: required for fit");
      if (!source_csv) throw ConfigError("source: required for fit");
      if (split_fraction < 0.0 || split_fraction >= 1.0) throw ConfigError("split-fraction: must lie in [0, 1)");
      if (split_fraction > 0.0 && repeats < 1) throw ConfigError("repeats: must be at least 1");
      break;
    case Command::oracle:
      if (!has_csv_inputs(*this) && !setting)
        throw ConfigError("target/source: oracle needs data files or a setting");
      if (has_csv_inputs(*this) && (!beta_true || !theta_true))
        throw ConfigError("beta-true/theta-true: oracle on data files requires the true coefficient files");
      break;
    case Command::tune:
      if (!has_csv_inputs(*this) && !setting) throw ConfigError("target/source: tune needs data files or a setting");
      break;
  }
}

void apply(RunConfig& c, std::string key, const std::string& raw) {
  std::replace(key.begin(), key.end(), '_', '-');
  const std::string v = trim(raw);
  auto path = [&]() {
    if (v.empty()) throw ConfigError(key + ": empty path");
    return std::filesystem::path(v);
  };
  if (key == "command") c.command = parse_command(v);
  else if (key == "setting") {
    try {
      c.setting = parse_setting(v);
    } catch (const InvalidInput& e) {
      throw ConfigError(std::string("setting: ") + e.what());
    }
  } else if (key == "m") c.scenario.m = to_int(key, v);
  else if (key == "h") c.scenario.h = to_double(key, v);
  else if (key == "nt") c.scenario.n_t = to_int(key, v);
  else if (key == "ns") c.scenario.n_s = to_int(key, v);
  else if (key == "dt") c.scenario.d_t = to_int(key, v);
  else if (key == "ds") c.scenario.d_s = to_int(key, v);
  else if (key == "reps") c.scenario.replicates = to_int(key, v);
  else if (key == "covariance-rho") c.scenario.covariance_rho = to_double(key, v);
  else if (key == "seed") c.seed = to_u64(key, v);
  else if (key == "lambda0-grid") c.lambda0_grid = to_grid(key, v);
  else if (key == "lambda1-grid") c.lambda1_grid = to_grid(key, v);
  else if (key == "rho0") c.rho0 = to_double(key, v);
  else if (key == "rho1") c.rho1 = to_double(key, v);
  else if (key == "scad-a") c.scad_a = to_double(key, v);
  else if (key == "eps-fuse") c.eps_fuse = to_double(key, v);
  else if (key == "eps-abs") c.eps_abs = to_double(key, v);
  else if (key == "max-iter") c.max_iter = to_int(key, v);
  else if (key == "standardize") c.standardize = to_bool(key, v);
  else if (key == "augment-noise") c.augment_noise = to_bool(key, v);
  else if (key == "out") c.out = path();
  else if (key == "target") c.target_csv = path();
  else if (key == "source") c.source_csv = path();
  else if (key == "test") c.test_csv = path();
  else if (key == "beta-true") c.beta_true = path();
  else if (key == "theta-true") c.theta_true = path();
  else if (key == "response") c.response = v;
  else if (key == "methods") {
    c.methods.clear();
    for (const auto& m : split_list(v)) {
      try {
        const Method parsed = parse_method(m);
        if (std::find(c.methods.begin(), c.methods.end(), parsed) == c.methods.end()) c.methods.push_back(parsed);
      } catch (const InvalidInput& e) {
        throw ConfigError(std::string("methods: ") + e.what());
      }
    }
  } else if (key == "split-fraction") c.split_fraction = to_double(key, v);
  else if (key == "repeats") c.repeats = to_int(key, v);
  else if (key == "threads") c.threads = to_int(key, v);
  else throw ConfigError("unknown configuration key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) + " of '" + path.string() + "' is not key = value");
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return kv;
}

std::vector<std::pair<std::string, std::string>> RunConfig::to_key_values() const {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("command", to_string(command));
  if (setting) {
    kv.emplace_back("setting", to_string(*setting));
    kv.emplace_back("nt", std::to_string(scenario.n_t));
    kv.emplace_back("ns", std::to_string(scenario.n_s));
    kv.emplace_back("dt", std::to_string(scenario.d_t));
    kv.emplace_back("ds", std::to_string(scenario.d_s));
    kv.emplace_back("m", std::to_string(scenario.m));
    kv.emplace_back("h", shortest(scenario.h));
    kv.emplace_back("reps", std::to_string(scenario.replicates));
    kv.emplace_back("covariance-rho", shortest(scenario.covariance_rho));
  }
  if (target_csv) kv.emplace_back("target", absolute_string(*target_csv));
  if (source_csv) kv.emplace_back("source", absolute_string(*source_csv));
  if (test_csv) kv.emplace_back("test", absolute_string(*test_csv));
  if (beta_true) kv.emplace_back("beta-true", absolute_string(*beta_true));
  if (theta_true) kv.emplace_back("theta-true", absolute_string(*theta_true));
  if (response) kv.emplace_back("response", *response);
  kv.emplace_back("seed", std::to_string(seed));
  if (!lambda0_grid.empty()) kv.emplace_back("lambda0-grid", join(lambda0_grid));
  if (!lambda1_grid.empty()) kv.emplace_back("lambda1-grid", join(lambda1_grid));
  kv.emplace_back("rho0", shortest(rho0));
  kv.emplace_back("rho1", shortest(rho1));
  kv.emplace_back("scad-a", shortest(scad_a));
  kv.emplace_back("eps-fuse", shortest(eps_fuse));
  kv.emplace_back("eps-abs", shortest(eps_abs));
  kv.emplace_back("max-iter", std::to_string(max_iter));
  kv.emplace_back("standardize", standardize ? "true" : "false");
  kv.emplace_back("augment-noise", augment_noise ? "true" : "false");
  std::string ms;
  for (std::size_t i = 0; i < methods.size(); ++i) ms += (i ? "," : "") + to_string(methods[i]);
  kv.emplace_back("methods", ms);
  kv.emplace_back("split-fraction", shortest(split_fraction));
  kv.emplace_back("repeats", std::to_string(repeats));
  kv.emplace_back("threads", std::to_string(threads));
  kv.emplace_back("out", out.string());
  return kv;
}

std::string manifest_text(const RunConfig& cfg) {
  std::ostringstream os;
  os << "# cstl " << kVersion << " run manifest; replay with: cstl --config <this file>\n";
  for (const auto& [k, v] : cfg.to_key_values()) os << k << " = " << v << '\n';
  return os.str();
}

}  // namespace cstl
