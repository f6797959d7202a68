#include "cstl/commands.hpp"
#include "cstl/csv_io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace cstl;
using namespace cstl::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cstl_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const fs::path& p) {
  const std::string s = slurp(p);
  return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CSTL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_dataset_pair(const fs::path& dir, int d_t, int d_s) {
  std::mt19937_64 rng(17);
  Vector b = Vector::Zero(d_t), th = Vector::Zero(d_s);
  b.head(3) << 1, 2, 3;
  th.head(3) << 2, 3, 1;
  write_csv(linear_data(60, b, 1.0, rng, Domain::target), dir / "target.csv");
  write_csv(linear_data(90, th, 1.0, rng, Domain::source), dir / "source.csv");
  write_csv(linear_data(30, b, 1.0, rng, Domain::target), dir / "test.csv");
  std::string bt = "value\n1\n2\n3\n", tt = "value\n2\n3\n1\n";
  for (int j = 3; j < d_t; ++j) bt += "0\n";
  for (int l = 3; l < d_s; ++l) tt += "0\n";
  write_text(dir / "beta.txt", bt);
  write_text(dir / "theta.txt", tt);
}

}  // namespace

TEST_CASE("numbers round-trip through text") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = gaussian_vector(1, rng)[0] * std::pow(10.0, (i % 40) - 20);
    CHECK(parse_double(format_double(x)).value() == x);
  }
  CHECK(format_double(std::nan("")) == "NA");
  CHECK(std::isnan(parse_double("NA", true).value()));
  CHECK_FALSE(parse_double("NA").has_value());
  CHECK_FALSE(parse_double("1.5x").has_value());
  CHECK_FALSE(parse_double("").has_value());
  CHECK(parse_double(" -2.5e3 ").value() == -2500.0);
}

TEST_CASE("load_csv picks the response column") {
  const fs::path dir = scratch("load");
  write_text(dir / "d.csv", "a,b,y\n1,2,3\n4,5,6\n7,8,9\n");
  const Dataset ds = load_csv(dir / "d.csv");
  CHECK(ds.rows() == 3);
  CHECK(ds.cols() == 2);
  CHECK(ds.response == Vector((Vector(3) << 3, 6, 9).finished()));
  CHECK(ds.design(2, 1) == 8.0);

  const Dataset by_name = load_csv(dir / "d.csv", std::string("a"));
  CHECK(by_name.response == Vector((Vector(3) << 1, 4, 7).finished()));
  CHECK(by_name.design.col(0) == Vector((Vector(3) << 2, 5, 8).finished()));
  CHECK(by_name.design.col(1) == Vector((Vector(3) << 3, 6, 9).finished()));
}

TEST_CASE("load_csv errors name the location") {
  const fs::path dir = scratch("errors");
  write_text(dir / "bad.csv", "a,b,y\n1,2,3\n4,oops,6\n");
  try {
    load_csv(dir / "bad.csv");
    FAIL("expected an error");
  } catch (const IoError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);
  }
  write_text(dir / "ragged.csv", "a,b,y\n1,2,3\n4,5\n");
  CHECK_THROWS_AS(load_csv(dir / "ragged.csv"), IoError);
  write_text(dir / "missing.csv", "a,b,y\n1,,3\n");
  CHECK_THROWS_AS(load_csv(dir / "missing.csv"), IoError);
  write_text(dir / "na.csv", "a,b,y\n1,NA,3\n");
  CHECK_THROWS_AS(load_csv(dir / "na.csv"), IoError);
  write_text(dir / "empty.csv", "");
  CHECK_THROWS_AS(load_csv(dir / "empty.csv"), IoError);
  CHECK_THROWS_AS(load_csv(dir / "bad.csv", std::string("z")), IoError);
  CHECK_THROWS_AS(load_csv(dir / "nope.csv"), IoError);
}

TEST_CASE("write_csv then load_csv is the identity") {
  const fs::path dir = scratch("roundtrip");
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    Dataset ds = linear_data(5 + trial, gaussian_vector(1 + trial % 4, rng), 1.0, rng);
    ds.design *= std::pow(10.0, trial - 5);
    write_csv(ds, dir / "rt.csv");
    const Dataset back = load_csv(dir / "rt.csv");
    CHECK(back.design == ds.design);
    CHECK(back.response == ds.response);
  }
}

TEST_CASE("results tables") {
  const fs::path dir = scratch("results");
  ResultsTable empty;
  write_results(empty, dir / "empty.csv");
  CHECK(slurp(dir / "empty.csv") == std::string(kResultsHeader) + "\n");

  ResultsTable one;
  ResultRow r;
  r.method = "cstl";
  r.replicate = 7;
  r.sse = 0.1 + 0.2;
  r.mse = 1.0 / 3.0;
  r.lambda0 = std::sqrt(2.0);
  r.lambda1 = std::nan("");
  r.iterations = 42;
  r.converged = true;
  one.rows.push_back(r);
  write_results(one, dir / "one.csv");
  CHECK(count_lines(dir / "one.csv") == 2);
  const ResultsTable back = read_results(dir / "one.csv");
  REQUIRE(back.rows.size() == 1);
  CHECK(back.rows[0].method == "cstl");
  CHECK(back.rows[0].replicate == 7);
  CHECK(back.rows[0].sse == r.sse);
  CHECK(back.rows[0].mse == r.mse);
  CHECK(back.rows[0].lambda0 == r.lambda0);
  CHECK(std::isnan(back.rows[0].lambda1));
  CHECK(back.rows[0].iterations == 42);
  CHECK(back.rows[0].converged);

  CHECK_THROWS_AS(write_results(one, fs::path("/proc/definitely/not/writable.csv")), IoError);
}

TEST_CASE("read_vector accepts plain and indexed layouts") {
  const fs::path dir = scratch("vectors");
  write_text(dir / "plain.txt", "1\n-2.5\n3\n");
  write_text(dir / "indexed.csv", "index,value\n1,4\n2,5\n");
  CHECK(read_vector(dir / "plain.txt") == Vector((Vector(3) << 1, -2.5, 3).finished()));
  CHECK(read_vector(dir / "indexed.csv") == Vector((Vector(2) << 4, 5).finished()));
  write_text(dir / "bad.txt", "1\nx\n");
  CHECK_THROWS_AS(read_vector(dir / "bad.txt"), IoError);
}

TEST_CASE("configuration: file, overrides and validation") {
  const fs::path dir = scratch("config");
  write_text(dir / "run.cfg", "# comment\ncommand = simulate\nsetting = S2\nm = 3   # trailing comment\n"
                              "lambda0_grid = 0.3, 0.1\nrho1 = 0.5\n");
  RunConfig cfg;
  for (const auto& [k, v] : read_key_values(dir / "run.cfg")) apply(cfg, k, v);
  apply(cfg, "m", "1");  // command-line override applied afterwards
  CHECK(cfg.command == Command::simulate);
  CHECK(cfg.setting == Setting::S2);
  CHECK(cfg.scenario.m == 1);
  CHECK(cfg.lambda0_grid == std::vector<double>{0.3, 0.1});
  CHECK(cfg.rho1 == 0.5);
  CHECK_NOTHROW(cfg.validate());

  // the key/value listing reproduces the configuration
  RunConfig copy;
  for (const auto& [k, v] : cfg.to_key_values()) apply(copy, k, v);
  CHECK(copy.to_key_values() == cfg.to_key_values());

  auto message_of = [](auto&& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message_of([&] { apply(cfg, "bogus", "1"); }).find("bogus") != std::string::npos);
  CHECK(message_of([&] { apply(cfg, "rho0", "abc"); }).find("rho0") != std::string::npos);
  CHECK(message_of([&] { apply(cfg, "command", "train"); }).find("command") != std::string::npos);
  RunConfig bad = cfg;
  bad.rho1 = 0.0;
  CHECK(message_of([&] { bad.validate(); }).find("rho1") != std::string::npos);
  RunConfig fit;
  fit.command = Command::fit;
  CHECK(message_of([&] { fit.validate(); }).find("target") != std::string::npos);
  fit.target_csv = dir / "missing.csv";
  fit.source_csv = dir / "missing.csv";
  CHECK(message_of([&] { fit.validate(); }).find("does not exist") != std::string::npos);
  RunConfig sim;
  CHECK(message_of([&] { sim.validate(); }).find("setting") != std::string::npos);
  write_text(dir / "broken.cfg", "no equals sign here\n");
  CHECK_THROWS_AS(read_key_values(dir / "broken.cfg"), ConfigError);
}

TEST_CASE("simulate writes deterministic tables and a replayable manifest") {
  const fs::path dir = scratch("simulate");
  RunConfig cfg;
  cfg.command = Command::simulate;
  cfg.setting = Setting::S1;
  cfg.scenario.d_t = 40;
  cfg.scenario.replicates = 2;
  cfg.out = dir / "a";
  run_command(cfg);
  CHECK(count_lines(dir / "a" / "results.csv") == 1 + 2 * 3);
  CHECK(count_lines(dir / "a" / "summary.csv") == 1 + 3);
  CHECK(slurp(dir / "a" / "results.csv").rfind(kResultsHeader, 0) == 0);

  RunConfig replay;
  for (const auto& [k, v] : read_key_values(dir / "a" / "manifest.txt")) apply(replay, k, v);
  replay.out = dir / "b";
  run_command(replay);
  CHECK(slurp(dir / "a" / "results.csv") == slurp(dir / "b" / "results.csv"));
  CHECK(slurp(dir / "a" / "summary.csv") == slurp(dir / "b" / "summary.csv"));
}

TEST_CASE("fit, tune and oracle on CSV inputs") {
  const fs::path dir = scratch("fit");
  write_dataset_pair(dir, 6, 5);

  RunConfig cfg;
  cfg.command = Command::fit;
  cfg.target_csv = dir / "target.csv";
  cfg.source_csv = dir / "source.csv";
  cfg.test_csv = dir / "test.csv";
  cfg.lambda0_grid = {0.1};
  cfg.lambda1_grid = {0.1};
  cfg.out = dir / "fit";
  const CommandOutcome out = run_command(cfg);
  CHECK(count_lines(dir / "fit" / "coefficients.csv") == 1 + 6 + 5);
  CHECK(count_lines(dir / "fit" / "pairwise_diff.csv") == 1 + 30);
  CHECK(count_lines(dir / "fit" / "fit_summary.csv") == 2);
  CHECK(std::find(out.artifacts.begin(), out.artifacts.end(), dir / "fit" / "coefficients.csv") != out.artifacts.end());

  cfg.split_fraction = 0.8;
  cfg.repeats = 3;
  cfg.out = dir / "split";
  run_command(cfg);
  CHECK(count_lines(dir / "split" / "split_results.csv") == 1 + 2 * 3);
  CHECK(count_lines(dir / "split" / "split_summary.csv") == 3);

  RunConfig tune = cfg;
  tune.command = Command::tune;
  tune.split_fraction = 0.0;
  tune.lambda0_grid = {0.3, 0.2, 0.1};
  tune.lambda1_grid = {0.2, 0.05};
  tune.out = dir / "tune";
  run_command(tune);
  CHECK(count_lines(dir / "tune" / "bic_surface.csv") == 1 + 3 * 2);

  RunConfig oracle = cfg;
  oracle.command = Command::oracle;
  oracle.split_fraction = 0.0;
  oracle.out = dir / "oracle";
  CHECK_THROWS_AS(oracle.validate(), ConfigError);  // truth files required
  oracle.beta_true = dir / "beta.txt";
  oracle.theta_true = dir / "theta.txt";
  run_command(oracle);
  CHECK(count_lines(dir / "oracle" / "oracle_coefficients.csv") == 1 + 6 + 5);
  CHECK(count_lines(dir / "oracle" / "shared_values.csv") == 1 + 3);

  RunConfig wrong = oracle;
  wrong.theta_true = dir / "beta.txt";  // 6 entries for a 5-column source
  CHECK_THROWS_AS(run_command(wrong), InvalidInput);
}

TEST_CASE("tune and oracle on a simulated setting") {
  const fs::path dir = scratch("setting");
  RunConfig cfg;
  cfg.command = Command::tune;
  cfg.setting = Setting::EX2;
  cfg.lambda0_grid = {0.2, 0.1};
  cfg.lambda1_grid = {0.2, 0.1, 0.05};
  cfg.out = dir / "tune";
  run_command(cfg);
  CHECK(count_lines(dir / "tune" / "bic_surface.csv") == 1 + 6);
  cfg.command = Command::oracle;
  cfg.out = dir / "oracle";
  run_command(cfg);
  CHECK(count_lines(dir / "oracle" / "oracle_coefficients.csv") == 1 + 3 + 3);
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("cli");
  write_dataset_pair(dir, 4, 4);
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("--no-such-flag") == 1);
  CHECK(run_cli("--command simulate") == 1);                 // setting missing
  CHECK(run_cli("--command simulate --setting S1 --rho1 0") == 1);
  CHECK(run_cli("--command fit --target " + (dir / "absent.csv").string() + " --source x.csv") == 1);
  CHECK(run_cli("--command oracle --setting EX1 --out " + (dir / "ok").string()) == 0);
  // well-formed configuration, but the data cannot be fitted: runtime failure
  write_text(dir / "ragged.csv", "a,y\n1,2\n3\n");
  CHECK(run_cli("--command fit --target " + (dir / "ragged.csv").string() + " --source " +
                (dir / "source.csv").string() + " --out " + (dir / "bad").string()) == 2);
}
