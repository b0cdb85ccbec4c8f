#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <string>

#include "netmimo/error.hpp"
#include "netmimo/experiments.hpp"

using namespace netmimo;

namespace {

const char* kRing = R"(
layout:
  dimension: 1
  B: 24
  grid_density: 20
system:
  M: 30
  L: 40
family:
  schemes: ["(1,1,1)Q1", "(1,1,0)Q1", "(2,2,1)Q2", "(2,2,2)Q2"]
run:
  seed: 4
  trials: 40
  threads: 1
)";

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

const CsvFile& file(const CommandResult& r, const std::string& name) {
  for (const auto& f : r.files) {
    if (f.name == name) return f;
  }
  throw std::runtime_error("missing " + name);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NETMIMO_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto dir = std::filesystem::temp_directory_path() / "netmimo_config_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("defaults") {
  const auto cfg = parse_config("");
  CHECK(cfg.layout.dimension == 1);
  CHECK(cfg.layout.bs_count == 24);
  CHECK(cfg.system.M == 30.0);
  CHECK(cfg.system.L == 40.0);
  CHECK(cfg.system.alpha_ul == 10.0);
  CHECK(cfg.pathloss.G0 == 1e6);
  CHECK(cfg.run.seed == 1);
}

TEST_CASE("schema errors carry line numbers") {
  CHECK(error_of("layout:\n  dimension: 1\n  colour: red\n").find("line 3") != std::string::npos);
  CHECK(error_of("layout:\n  dimension: 1\n  colour: red\n").find("colour") != std::string::npos);
  CHECK(error_of("system:\n  M: -1\n").find("line 2") != std::string::npos);
  CHECK(error_of("extra: 1\n").find("unknown key") != std::string::npos);
  CHECK(error_of("family:\n  schemes: [\"(1,1,2)Q1\"]\n").find("line 2") != std::string::npos);
  CHECK(error_of("family:\n  F: [1]\n  schemes: [\"(1,1,0)Q1\"]\n").find("either") != std::string::npos);
  CHECK(error_of("run:\n  utility: fastest\n").find("line 2") != std::string::npos);
  CHECK(error_of("layout: [1, 2\n").find("line") != std::string::npos);
  CHECK(error_of("layout:\n  dimension: 2\n  bins:\n    x: [0.1]\n").find("1-D") != std::string::npos);
}

TEST_CASE("scheme strings and maps") {
  const auto cfg = parse_config("family:\n  schemes: [\"(3,1,1)Q1\", {F: 1, C: 2, J: 3, Q: 2, S: 1.5}]\n");
  REQUIRE(cfg.family.schemes.size() == 2);
  CHECK(cfg.family.schemes[0] == SchemeSpec{3, 1, 1, 1, 0.0});
  CHECK(cfg.family.schemes[1] == SchemeSpec{1, 2, 3, 2, 1.5});
}

TEST_CASE("empty explicit family gives a header-only table") {
  const auto ex = build_experiment(parse_config("family:\n  schemes: []\n"));
  const auto r = run_command("bin-rates", ex);
  const auto& csv = file(r, "bin_rates.csv").content;
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1);
  CHECK(csv.rfind("bin_id,", 0) == 0);
}

TEST_CASE("antenna budget check") {
  auto cfg = parse_config(kRing);
  cfg.system.U = 20.0;  // m U = 40 < C M = 60 for the two-BS schemes
  CHECK_THROWS_AS(build_experiment(cfg), ConfigError);
  cfg.system.U = 30.0;
  CHECK_NOTHROW(build_experiment(cfg));
}

TEST_CASE("training identities hold on configured scenarios") {
  const auto ex = build_experiment(parse_config(kRing));
  std::vector<std::string> failures;
  for (int b = 0; b < ex.factory->num_bins(); ++b) {
    CHECK(check_training_identities(ex.factory->scenario(b, 2, 2, 2), 1.7, &failures) == 0);
  }
  CHECK(failures.empty());
}

TEST_CASE("outputs are byte-stable across runs and thread counts") {
  auto cfg = parse_config(kRing);
  const auto a = run_command("validate", build_experiment(cfg));
  const auto b = run_command("validate", build_experiment(cfg));
  cfg.run.threads = 3;
  const auto c = run_command("validate", build_experiment(cfg));
  REQUIRE(a.files.size() == b.files.size());
  REQUIRE(a.files.size() == c.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    CHECK(a.files[i].content == b.files[i].content);
    CHECK(a.files[i].content == c.files[i].content);
  }
  cfg.run.trials = 10;
  const auto rates = run_command("bin-rates", build_experiment(cfg));
  const auto& csv = file(rates, "bin_rates.csv").content;
  CHECK(csv.find("mc_group_rate") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 41);
}

TEST_CASE("schedule and sweep commands") {
  auto cfg = parse_config(kRing);
  cfg.run.utility = "maxmin";
  const auto ex = build_experiment(cfg);
  const auto s = run_command("schedule", ex);
  const auto& csv = file(s, "schedule.csv").content;
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
  cfg.system.M_list = {10, 100};
  const auto t = run_command("throughput-sweep", build_experiment(cfg));
  const auto& sweep = file(t, "throughput_sweep.csv").content;
  CHECK(std::count(sweep.begin(), sweep.end(), '\n') == 3);
  CHECK_THROWS_AS(run_command("plot", ex), ConfigError);
}

TEST_CASE("command-line exit codes") {
  const auto good = write_temp("good.yaml", kRing);
  const auto out = (std::filesystem::temp_directory_path() / "netmimo_config_test" / "out").string();
  CHECK(run_cli("optimize-map --config " + good + " --out " + out) == 0);
  CHECK(std::filesystem::exists(std::filesystem::path(out) / "optimize_map.csv"));
  CHECK(run_cli("bin-rates --config " + write_temp("bad.yaml", "system:\n  speed: 3\n") + " --out " + out) == 1);
  CHECK(run_cli("bin-rates --config /nonexistent.yaml") == 1);
  CHECK(run_cli("bin-rates --config " + good + " --trials -3") == 1);
  CHECK(run_cli("frobnicate") == 1);
}
