#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "queuenet/scenario.hpp"
#include "scenario_path.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(QUEUENET_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("queuenet_cli_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// Night scenario with a small optimizer budget, written next to the outputs.
fs::path small_scenario(const fs::path& dir) {
  queuenet::Scenario sc = queuenet::load_scenario(scenario_path("night.toml"));
  sc.name = "small";
  sc.optimizer.n_ants = 4;
  sc.optimizer.n_antlions = 4;
  sc.optimizer.t_max = 2;
  sc.equilibrium.eps = 1e-3;
  const fs::path p = dir / "small.toml";
  std::ofstream(p) << queuenet::scenario_to_string(sc);
  return p;
}

}  // namespace

TEST_CASE("predict writes per-minute rows") {
  TempDir tmp;
  REQUIRE(run("predict " + scenario_path("day.toml") + " --out " + tmp.path.string()) == 0);
  const auto rows = lines(slurp(tmp.path / "predict_day_42.csv"));
  REQUIRE(rows.size() == 17u);
  CHECK(rows[0] == "t,W_X,W_B,W_S,L_X,L_B,L_S,W_mean,L_max");
  CHECK(rows[1].rfind("0,", 0) == 0);
  CHECK(rows[16].rfind("15,", 0) == 0);
}

TEST_CASE("horizon override shortens the forecast") {
  TempDir tmp;
  REQUIRE(run("predict " + scenario_path("night.toml") + " --horizon 3 --out " + tmp.path.string()) == 0);
  CHECK(lines(slurp(tmp.path / "predict_night_42.csv")).size() == 5u);
}

TEST_CASE("equilibrium trace on a two-class case ends below eps") {
  TempDir tmp;
  REQUIRE(run("equilibrium " + scenario_path("case1.toml") + " --json --out " + tmp.path.string()) == 0);
  const auto rows = lines(slurp(tmp.path / "equilibrium_case1_42.csv"));
  REQUIRE(rows.size() >= 2u);
  CHECK(rows[0] == "iter,alpha,beta,gamma,W_X,W_B,W_S,error");
  const std::string last = rows.back();
  const double err = std::stod(last.substr(last.rfind(',') + 1));
  CHECK(err <= 1e-4);
  const std::string json = slurp(tmp.path / "equilibrium_case1_42.json");
  CHECK(json.find("\"command\"") != std::string::npos);
  CHECK(json.find("\"resolved_config\"") != std::string::npos);
}

TEST_CASE("optimize is reproducible across runs and thread counts") {
  TempDir tmp;
  const fs::path sc = small_scenario(tmp.path);
  const fs::path a = tmp.path / "a", b = tmp.path / "b", c = tmp.path / "c";
  fs::create_directories(a);
  fs::create_directories(b);
  fs::create_directories(c);
  REQUIRE(run("optimize " + sc.string() + " --seed 7 --threads 1 --out " + a.string()) == 0);
  REQUIRE(run("optimize " + sc.string() + " --seed 7 --threads 1 --out " + b.string()) == 0);
  REQUIRE(run("optimize " + sc.string() + " --seed 7 --threads 3 --out " + c.string()) == 0);
  const std::string first = slurp(a / "optimize_small_7.csv");
  REQUIRE(!first.empty());
  CHECK(lines(first)[0] == "iter,J_X,J_B,J_S,fitness,L_X,L_B,L_S,alpha,beta,gamma");
  CHECK(lines(first).size() == 4u);
  CHECK(first == slurp(b / "optimize_small_7.csv"));
  CHECK(first == slurp(c / "optimize_small_7.csv"));
}

TEST_CASE("exit status reflects errors") {
  TempDir tmp;
  CHECK(run("") != 0);
  CHECK(run("predict /nonexistent/file.toml") != 0);
  const fs::path bad = tmp.path / "bad.toml";
  std::ofstream(bad) << "name = \"bad\"\n[taxi]\nwheels = 4\n";
  CHECK(run("predict " + bad.string() + " --out " + tmp.path.string()) == 2);
  const fs::path invalid = tmp.path / "invalid.toml";
  std::ofstream(invalid) << "name = \"x\"\n[rates]\nbreakpoints = [0, 15]\ntotal = [5]\n"
                            "supply_breakpoints = [0, 15]\ntaxi_supply = [1]\n[bus]\nq_B = 1.3\n"
                            "[[choice.class]]\nO = [0, 0, 0]\n";
  CHECK(run("predict " + invalid.string() + " --out " + tmp.path.string()) == 1);
}

TEST_CASE("forcing the scalar kernels leaves the output unchanged") {
  TempDir tmp;
  const fs::path a = tmp.path / "a", b = tmp.path / "b";
  fs::create_directories(a);
  fs::create_directories(b);
  REQUIRE(run("predict " + scenario_path("day.toml") + " --out " + a.string()) == 0);
  const std::string cmd = "QUEUENET_SIMD=scalar " + std::string(QUEUENET_CLI) + " predict " + scenario_path("day.toml") +
                          " --out " + b.string() + " >/dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(slurp(a / "predict_day_42.csv") == slurp(b / "predict_day_42.csv"));
}
