#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "greedylab/errors.hpp"
#include "greedylab/experiment.hpp"
#include "greedylab/format.hpp"
#include "greedylab/verify.hpp"

using namespace greedylab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("greedylab_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int code;
  std::string err;
};

Run run_cli(const std::string& args, const fs::path& dir) {
  const auto err_file = dir / "stderr.txt";
  const std::string cmd = std::string(GREEDYLAB_BIN) + " " + args + " 2> " + err_file.string() +
                          " > " + (dir / "stdout.txt").string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err_file)};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (c == '"') {
        if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = !quoted;
        }
      } else if (c == ',' && !quoted) {
        cells.push_back(cell);
        cell.clear();
      } else {
        cell += c;
      }
    }
    cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

ExperimentConfig config_for(const std::string& space) {
  ExperimentConfig c;
  c.space = space;
  return c;
}

}  // namespace

TEST_CASE("config parsing and flag precedence") {
  const auto dir = scratch("config");
  {
    std::ofstream f(dir / "run.cfg");
    f << "# experiment\nspace = summing:dim=6\nseed = 42   # trailing comment\n\nsamples=7\n"
         "delta-grid = 0.5, 0.25\nsuite = witness-w,convexity\n";
  }
  ExperimentConfig c;
  for (const auto& [k, v] : read_config_file(dir / "run.cfg")) apply_setting(c, k, v);
  CHECK(c.space == "summing:dim=6");
  CHECK(c.seed == 42);
  CHECK(c.samples == 7);
  CHECK(c.delta_grid == std::vector<double>{0.5, 0.25});
  CHECK(c.suites == std::vector<std::string>{"witness-w", "convexity"});
  apply_setting(c, "dim", "9");
  CHECK(c.resolved_space().canonical() == "summing:dim=9");

  CHECK(parse_seed("18446744073709551615") == 18446744073709551615ULL);
  CHECK_THROWS_AS(parse_seed("-1"), ConfigError);
  CHECK_THROWS_AS(parse_seed("18446744073709551616"), ConfigError);
  CHECK_THROWS_AS(parse_suites("witness-w,bogus"), ConfigError);
  CHECK(parse_suites("all") == kSuiteNames);
  CHECK_THROWS_AS(parse_delta_grid("0.1,0"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "colour", "red"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "samples", "ten"), ConfigError);
  {
    std::ofstream f(dir / "bad.cfg");
    f << "space summing\n";
  }
  CHECK_THROWS_AS(read_config_file(dir / "bad.cfg"), ConfigError);
  CHECK_THROWS_AS(read_config_file(dir / "missing.cfg"), ConfigError);
}

TEST_CASE("curve examples") {
  const auto dir = scratch("curve");
  {
    std::ofstream f(dir / "x.txt");
    f << "3, 2, 1\n";
  }
  auto c = config_for("lp:p=2:dim=3");
  c.vector_file = dir / "x.txt";
  c.max_m = 2;
  const auto rows = csv_rows(curve_csv(c));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"m", "greedy_err", "cheb_err", "sigma", "sigma_tilde"});
  for (std::size_t k = 1; k <= 4; ++k) {
    CHECK(std::stod(rows[1][k]) == std::sqrt(14.0));
    CHECK(std::abs(std::stod(rows[2][k]) - std::sqrt(5.0)) <= 1e-12);
  }

  {
    std::ofstream f(dir / "y.txt");
    f << "2 -1 1";
  }
  auto s = config_for("summing:dim=3");
  s.vector_file = dir / "y.txt";
  s.max_m = 1;
  const auto srows = csv_rows(curve_csv(s));
  CHECK(std::abs(std::stod(srows[2][3]) - 0.5) <= 1e-9);
  CHECK(std::stod(srows[2][4]) == 1.0);

  auto wrong = config_for("summing:dim=4");
  wrong.vector_file = dir / "y.txt";
  CHECK_THROWS_AS(curve_csv(wrong), ConfigError);

  auto rnd = config_for("lorentz:w=harmonic:dim=6");
  rnd.seed = 5;
  CHECK(curve_csv(rnd) == curve_csv(rnd));
}

TEST_CASE("constants and democracy tables") {
  auto l1 = config_for("lp:p=1:dim=6");
  l1.max_m = 6;
  l1.samples = 5;
  const auto demo = csv_rows(democracy_csv(l1));
  REQUIRE(demo.size() == 7);
  CHECK(demo[0].size() == 9);
  for (std::size_t m = 1; m <= 6; ++m) {
    CHECK(std::stod(demo[m][1]) == static_cast<double>(m));
    CHECK(std::stod(demo[m][2]) == static_cast<double>(m));
  }

  auto lp2 = config_for("lp:p=2:dim=8");
  lp2.samples = 20;
  const auto rows = csv_rows(constants_csv(lp2));
  CHECK(rows[0] == std::vector<std::string>{"name", "value", "kind", "witness"});
  bool saw_cq = false;
  const auto space = lp2.resolved_space();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    ConstantEstimate est{r[0], std::stod(r[1]), EstimateKind::unavailable, json::parse(r[3])};
    if (r[2] == "sampled-lower-bound") est.kind = EstimateKind::sampled_lower_bound;
    if (r[2] == "enumerated-exact") est.kind = EstimateKind::enumerated_exact;
    if (r[2] == "certified-exact") est.kind = EstimateKind::certified_exact;
    // reading the witness back reproduces the printed value
    CHECK(std::abs(reevaluate(space, est, default_chebyshev_options(space, lp2.seed)) - est.value) <=
          1e-12);
    if (r[0] == "C_q") {
      saw_cq = true;
      CHECK(r[2] == "sampled-lower-bound");
      CHECK(est.value >= 0.93);
    }
  }
  CHECK(saw_cq);
}

TEST_CASE("atomic writes leave no temp file") {
  const auto dir = scratch("atomic");
  write_atomic(dir / "sub" / "a.txt", "hello\n");
  CHECK(slurp(dir / "sub" / "a.txt") == "hello\n");
  write_atomic(dir / "sub" / "a.txt", "again\n");
  CHECK(slurp(dir / "sub" / "a.txt") == "again\n");
  CHECK_FALSE(fs::exists(dir / "sub" / "a.txt.tmp"));
}

TEST_CASE("exit codes") {
  const auto dir = scratch("exit");
  const auto out = " --out " + dir.string();

  const auto bad = run_cli("verify --space lp:p=0" + out, dir);
  CHECK(bad.code == 2);
  CHECK(bad.err.find("parameter p") != std::string::npos);

  CHECK(run_cli("verify --space summing:dim=4 --suite bogus" + out, dir).code == 2);
  CHECK(run_cli("verify --space summing:dim=4 --samples zero" + out, dir).code == 2);
  CHECK(run_cli("verify --space summing:dim=4 --config " + (dir / "none.cfg").string() + out, dir)
            .code == 2);
  CHECK(run_cli("frobnicate", dir).code == 2);

  const auto gated = run_cli("verify --space summing:dim=12 --suite truncation" + out, dir);
  CHECK(gated.code == 0);
  const auto report = json::parse(slurp(dir / "report.json"));
  REQUIRE(report.size() == 1);
  CHECK(report[0].at("status") == "no certified constant");
  CHECK(report[0].at("n_instances") == 0);

  const auto refused = run_cli("constants --space summing:dim=13 --max-m 13 --samples 1" + out, dir);
  CHECK(refused.code == 1);
  CHECK(refused.err.find("cap") != std::string::npos);

  CHECK(run_cli("spaces list --dim 5", dir).code == 0);
  CHECK(slurp(dir / "stdout.txt").find("summing:dim=5") != std::string::npos);
}

TEST_CASE("full verify run is clean, reproducible and self-verifying") {
  const auto a = scratch("verify_a");
  const auto b = scratch("verify_b");
  const std::string args = "verify --space lp:p=2:dim=8 --suite all --samples 300 --seed 7";
  CHECK(run_cli(args + " --out " + a.string(), a).code == 0);
  CHECK(run_cli(args + " --out " + b.string(), b).code == 0);
  const auto text = slurp(a / "report.json");
  CHECK(text == slurp(b / "report.json"));

  const auto space = SpaceSpec::parse("lp:p=2:dim=8");
  VerifyOptions o;
  o.budget = 300;
  o.seed = 7;
  o.estimator_budget = 40;
  for (const auto& r : json::parse(text)) {
    if (r.at("worst_witness").is_null()) continue;
    const auto id = r.at("check_id").get<std::string>();
    if (id == "classification") continue;  // re-runs all estimators; covered in unit tests
    CAPTURE(id);
    CHECK(std::abs(replay_witness(space, id, r.at("worst_witness"), o) -
                   r.at("max_violation").get<double>()) <= 1e-12);
  }
}

TEST_CASE("config file run and byte-identical constants") {
  const auto dir = scratch("cfg_run");
  {
    std::ofstream f(dir / "c.cfg");
    f << "space = summing:dim=5\nsamples = 4\nseed = 9\nout = " << (dir / "ignored").string()
      << "\n";
  }
  const auto first = dir / "first";
  const auto second = dir / "second";
  CHECK(run_cli("constants --config " + (dir / "c.cfg").string() + " --out " + first.string(), dir)
            .code == 0);
  CHECK(run_cli("constants --config " + (dir / "c.cfg").string() + " --out " + second.string(),
                dir)
            .code == 0);
  CHECK_FALSE(fs::exists(dir / "ignored"));
  CHECK(slurp(first / "constants.csv") == slurp(second / "constants.csv"));
  CHECK(slurp(first / "democracy.csv") == slurp(second / "democracy.csv"));
  CHECK(run_cli("curve --space summing:dim=5 --seed 3 --out " + first.string(), dir).code == 0);
  CHECK(run_cli("curve --space summing:dim=5 --seed 3 --out " + second.string(), dir).code == 0);
  CHECK(slurp(first / "curve.csv") == slurp(second / "curve.csv"));
}
