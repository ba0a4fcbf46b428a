#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "collar/config.hpp"
#include "collar/report.hpp"

using namespace collar;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(COLLAR_CLI_PATH) + " " + args +
                          " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string cfg_path(const std::string& name) {
  return std::string(COLLAR_CONFIG_DIR) + "/" + name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("config parse and canonical round trip") {
  const std::string text =
      "[problem]\n"
      "manifold = euclidean\n"
      "m = 2\n"
      "sigma = 3\n"
      "\n"
      "[eigen]\n"
      "rho_list = 0.5,0.9\n";
  const auto cfg = Config::parse(text);
  CHECK(cfg.serialize() == text);
  CHECK(Config::parse(cfg.serialize()).serialize() == text);
  CHECK(cfg.require("problem", "manifold") == "euclidean");
  CHECK(cfg.get_double("problem", "sigma", 0.0) == 3.0);
  CHECK(cfg.get_int("problem", "m", 0) == 2);
  CHECK_FALSE(cfg.get("problem", "absent").has_value());
  CHECK(cfg.get_double("problem", "absent", 7.5) == 7.5);
}

TEST_CASE("config diagnostics carry line numbers") {
  try {
    Config::parse("[problem]\nmanifold euclidean\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("config:2:") != std::string::npos);
  }
  CHECK_THROWS_AS(Config::parse("[unterminated\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse(" = 3\n"), ConfigError);

  const auto cfg = Config::parse("[problem]\nm = x\n");
  CHECK_THROWS_AS(cfg.get_int("problem", "m", 0), ConfigError);
  CHECK_THROWS_AS(cfg.get_double("problem", "m", 0.0), ConfigError);
}

TEST_CASE("unknown keys are rejected") {
  const auto cfg = Config::parse("[problem]\nmanifold = euclidean\nboom = 1\n");
  CHECK_THROWS_AS(cfg.check_known("problem", {"manifold"}), ConfigError);
  CHECK_NOTHROW(cfg.check_known("problem", {"manifold", "boom"}));
  CHECK_THROWS_AS(cfg.check_sections({"other"}), ConfigError);
  CHECK_THROWS_AS(problem_from_config(cfg), ConfigError);
}

TEST_CASE("problem block builds a full specification") {
  const auto cfg = Config::load(cfg_path("blowup.cfg"));
  const auto spec = problem_from_config(cfg);
  CHECK(spec.manifold.m == 2);
  CHECK(spec.exps.sigma == 3.0);
  CHECK(spec.V.boundary_piece().q == -4.0);
  CHECK(spec.a.is_constant());
}

TEST_CASE("json and csv rendering uses 17 significant digits") {
  Json j;
  j["value"] = 0.1;
  j["nested"] = {{"pi_ish", 3.141592653589793}};
  j["list"] = {1.5, 2.0};
  const std::string out = dump_json17(j);
  CHECK(out.find("0.10000000000000001") != std::string::npos);
  CHECK(out.find("3.1415926535897931") != std::string::npos);
  const std::string csv = to_csv({"a", "b"}, {{0.1, 2.0}});
  CHECK(csv == "a,b\n0.10000000000000001,2\n");
  CHECK_THROWS_AS(to_csv({"a"}, {{1.0, 2.0}}), std::invalid_argument);
}

TEST_CASE("cli exit codes encode verdicts") {
  const auto tmp = std::filesystem::temp_directory_path() / "collar_cli_test";
  std::filesystem::create_directories(tmp);
  const std::string out = " --out " + tmp.string();

  CHECK(run_cli("geom --config " + cfg_path("blowup.cfg") + out) == 0);
  // Growth verdicts, both polarities of --expect.
  CHECK(run_cli("hp-check --variant hp3 --config " + cfg_path("expdecay.cfg") +
                out) == 0);
  CHECK(run_cli("hp-check --variant hp1 --config " + cfg_path("expdecay.cfg") +
                out) == 1);
  CHECK(run_cli("hp-check --variant hp1 --config " + cfg_path("expdecay.cfg") +
                " --expect fail" + out) == 0);
  CHECK(run_cli("hp-check --variant hp1 --config " + cfg_path("powerlog.cfg") +
                out) == 0);
  // Usage errors.
  CHECK(run_cli("hp-check --config /nonexistent.cfg") == 2);
  CHECK(run_cli("bogus-subcommand") == 2);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("estimates --part a --config " + cfg_path("powerlog.cfg") + out) ==
        0);
  CHECK(run_cli("barrier --config " + cfg_path("blowup.cfg") + out) == 0);
}

TEST_CASE("cli reports are byte-identical across reruns") {
  namespace fs = std::filesystem;
  const auto tmp1 = fs::temp_directory_path() / "collar_det_1";
  const auto tmp2 = fs::temp_directory_path() / "collar_det_2";
  fs::create_directories(tmp1);
  fs::create_directories(tmp2);
  REQUIRE(run_cli("hp-check --variant hp1 --config " + cfg_path("powerlog.cfg") +
                  " --out " + tmp1.string()) == 0);
  REQUIRE(run_cli("hp-check --variant hp1 --config " + cfg_path("powerlog.cfg") +
                  " --out " + tmp2.string()) == 0);
  CHECK(slurp(tmp1 / "hp_report.json") == slurp(tmp2 / "hp_report.json"));
  CHECK(slurp(tmp1 / "hp_table.csv") == slurp(tmp2 / "hp_table.csv"));
  CHECK_FALSE(slurp(tmp1 / "hp_report.json").empty());
  // report merges whatever component outputs exist.
  CHECK(run_cli("report --out " + tmp1.string()) == 0);
  CHECK(fs::exists(tmp1 / "summary.json"));
  const auto empty_dir = fs::temp_directory_path() / "collar_det_empty";
  fs::create_directories(empty_dir);
  fs::remove_all(empty_dir);
  fs::create_directories(empty_dir);
  CHECK(run_cli("report --out " + empty_dir.string()) == 2);
}

TEST_CASE("malformed config exits with a usage error") {
  namespace fs = std::filesystem;
  const auto bad = fs::temp_directory_path() / "collar_bad.cfg";
  std::ofstream(bad) << "[problem]\nmanifold euclidean\n";
  CHECK(run_cli("geom --config " + bad.string()) == 2);
  std::ofstream(bad) << "[problem]\nmanifold = euclidean\nsigma = 3\nboom = 1\n";
  CHECK(run_cli("geom --config " + bad.string()) == 2);
}
