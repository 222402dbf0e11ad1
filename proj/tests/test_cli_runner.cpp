#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "bubbletower/cli_runner.hpp"
#include "bubbletower/errors.hpp"

using namespace bubbletower;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bubbletower_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(RunConfig cfg, const fs::path& out) {
  cfg.output = out.string();
  std::ostringstream log;
  return execute(cfg, log);
}

std::string error_message(const std::map<std::string, std::string>& entries) {
  try {
    (void)parse_config(entries);
  } catch (const Error& e) {
    return std::string(kind_name(e.kind())) + ": " + e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const auto cfg = parse_config(parse_config_text("n=3\nk=1\ncmd=constants\n"));
  CHECK(cfg.eta == doctest::Approx(0.1));
  CHECK(cfg.rho == doctest::Approx(0.5));
  CHECK(cfg.quad_tolerance == doctest::Approx(1e-10));
}

TEST_CASE("validation and config errors") {
  CHECK(error_message({{"n", "2"}}).find("n must be >= 3") != std::string::npos);
  CHECK(error_message({{"n", "2"}}).rfind("validation", 0) == 0);
  CHECK(error_message({{"eps", "1.5"}}).rfind("validation", 0) == 0);
  CHECK(error_message({{"k", "0"}}).rfind("validation", 0) == 0);
  CHECK(error_message({{"cmd", "sweep"}, {"eps", "0.5"}}).rfind("validation", 0) == 0);
  CHECK(error_message({{"sweep.mode", "lukewarm"}}).rfind("validation", 0) == 0);
  CHECK(error_message({{"n", "three"}}).rfind("config", 0) == 0);
  try {
    (void)parse_config_text("n=3\nbogus.key=1\n");
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
    CHECK(std::string(e.what()).find("bogus.key") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("n=3\nn=4\n"), Error);
  CHECK_THROWS_AS(parse_config_text("just words\n"), Error);
  CHECK(parse_config_text("# comment\n\n  n = 4  # trailing\n").at("n") == "4");
}

TEST_CASE("eps specifications") {
  const auto g = expand_eps("0.2:0.0125:geometric");
  REQUIRE(g.size() == 5);
  const double expect[5] = {0.2, 0.1, 0.05, 0.025, 0.0125};
  for (int i = 0; i < 5; ++i) CHECK(g[i] == doctest::Approx(expect[i]).epsilon(1e-14));
  CHECK(expand_eps("0.2:0.025:geometric:7").size() == 7);
  const auto l = expand_eps("0.1:0.05:linear:6");
  CHECK(l[1] == doctest::Approx(0.09));
  CHECK(expand_eps("0.2, 0.1,0.05").size() == 3);
  CHECK_THROWS_AS(expand_eps("0.1:0.05:linear"), Error);
  CHECK_THROWS_AS(expand_eps("0.1:0.05:cubic"), Error);
}

TEST_CASE("property: parse(print(config)) is the identity") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    RunConfig c;
    c.cmd = command_names()[trial % command_names().size()];
    c.n = 3 + trial % 4;
    c.k = 1 + trial % 3;
    c.radius = 0.5 + U(rng);
    c.center = trial % 2 ? std::vector<double>(c.n, U(rng)) : std::vector<double>{};
    c.eps = trial % 3 ? "0.2:0.0125:geometric" : "0.1,0.05";
    c.eta = 0.01 + 0.2 * U(rng);
    c.rho = 0.4 * c.radius * U(rng) + 1e-3;
    if (trial % 4 == 0) c.d = std::vector<double>(c.k, U(rng) + 0.01);
    c.quad_tolerance = 1e-12 + 1e-6 * U(rng);
    c.newton_rel_tol = U(rng) * 1e-8 + 1e-12;
    c.sweep_mode = trial % 2 ? "warm" : "cold";
    c.ls_enabled = trial % 5 == 0;
    c.output = "out dir " + std::to_string(trial);
    validate_config(c);
    const auto back = parse_config(parse_config_text(print_config(c)));
    CHECK(back == c);
  }
}

TEST_CASE("property: 17 significant digits round-trip every double") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> E(-300.0, 300.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::pow(10.0, E(rng)) * (i % 2 ? -1.0 : 1.0);
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }
  CHECK(format_double(NAN) == "nan");
}

TEST_CASE("constants command writes a CSV, a manifest and identical bytes twice") {
  RunConfig cfg;
  cfg.cmd = "constants";
  const auto a = scratch("const_a"), b = scratch("const_b");
  REQUIRE(run(cfg, a) == 0);
  REQUIRE(run(cfg, b) == 0);
  const auto csv = slurp(a / "constants.csv");
  CHECK(csv.rfind("quantity,value,error_estimate,closed_form\na1,", 0) == 0);
  for (const char* row : {"\na2,", "\na3,", "\na4,", "\ng0,"}) CHECK(csv.find(row) != std::string::npos);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(csv == slurp(b / "constants.csv"));
  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(manifest["status"] == "ok");
  for (auto& [name, entry] : manifest["files"].items())
    CHECK(entry["sha256"] == sha256_hex(a / name));
  CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json").replace(
                                          slurp(b / "manifest.json").find(b.string()),
                                          b.string().size(), a.string()));
  CHECK_FALSE(fs::exists(a / "error.json"));
}

TEST_CASE("sha256 of a known string") {
  const auto p = scratch("sha") ;
  fs::create_directories(p);
  std::ofstream(p / "abc.txt", std::ios::binary) << "abc";
  CHECK(sha256_hex(p / "abc.txt") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("reduce command emits roots and singular values") {
  RunConfig cfg;
  cfg.cmd = "reduce";
  cfg.k = 2;
  const auto out = scratch("reduce");
  REQUIRE(run(cfg, out) == 0);
  const auto j = nlohmann::json::parse(slurp(out / "reduce.json"));
  CHECK(j["s"].size() == 2);
  CHECK(j["jacobian_singular_values"].size() == 4);
  CHECK(j["G_inf"].get<double>() < 1e-10);
  // keys sorted
  std::string prev;
  for (auto& [key, value] : j.items()) {
    CHECK(prev < key);
    prev = key;
  }
}

TEST_CASE("sweep command with the documented range") {
  RunConfig cfg;
  cfg.cmd = "sweep";
  cfg.k = 2;
  cfg.eps = "0.2:0.0125:geometric";
  const auto out = scratch("sweep");
  const int code = run(cfg, out);
  CHECK((code == 0 || code == 2));
  const auto csv = slurp(out / "sweep.csv");
  CHECK(csv.rfind("eps,converged,newton_iters,residual,mu_1,mu_2,d_1,d_2,nodal_radius_1\n", 0) ==
        0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("numerical failure exits 2 and leaves an error record") {
  RunConfig cfg;
  cfg.cmd = "solve";
  cfg.eps = "0.1";
  cfg.newton_max_iterations = 1;
  cfg.newton_max_continuation_steps = 0;
  cfg.grid_max_regrids = 0;
  const auto out = scratch("fail");
  CHECK(run(cfg, out) == 2);
  REQUIRE(fs::exists(out / "error.json"));
  const auto j = nlohmann::json::parse(slurp(out / "error.json"));
  CHECK(j["exit_code"] == 2);
  CHECK(nlohmann::json::parse(slurp(out / "manifest.json"))["status"] != "ok");
}

TEST_CASE("invalid configuration exits 1") {
  RunConfig cfg;
  cfg.n = 2;
  CHECK(run(cfg, scratch("bad")) == 1);
}

TEST_CASE("BUBBLETOWER_OUT overrides the output directory") {
  const auto target = scratch("env");
  ::setenv("BUBBLETOWER_OUT", target.string().c_str(), 1);
  RunConfig cfg;
  cfg.output = "ignored_dir";
  CHECK(output_directory(cfg) == target);
  std::ostringstream log;
  CHECK(execute(cfg, log) == 0);
  ::unsetenv("BUBBLETOWER_OUT");
  CHECK(fs::exists(target / "constants.csv"));
  CHECK_FALSE(fs::exists("ignored_dir"));
}
