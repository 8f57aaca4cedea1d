#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vring/config_io.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RING_DESING_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vring_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("solve writes four files and is reproducible") {
  const fs::path dir = scratch("solve");
  write(dir / "cfg.json", R"({"epsilon": 0.1, "grid": {"n_r": 40, "n_z": 40}})");
  CHECK(run_cli("solve --config " + (dir / "cfg.json").string() + " --out " + (dir / "a").string()) == 0);
  for (const char* f : {"result.json", "zeta.csv", "psi.csv", "manifest.json"}) CHECK(fs::exists(dir / "a" / f));
  CHECK(run_cli("solve --config " + (dir / "cfg.json").string() + " --out " + (dir / "b").string()) == 0);
  CHECK(slurp(dir / "a" / "result.json") == slurp(dir / "b" / "result.json"));

  // The snapshot in the manifest reproduces the run.
  const auto manifest = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
  write(dir / "snap.json", manifest["config"].dump());
  CHECK(run_cli("solve --config " + (dir / "snap.json").string() + " --out " + (dir / "c").string()) == 0);
  CHECK(slurp(dir / "a" / "result.json") == slurp(dir / "c" / "result.json"));
  fs::remove_all(dir);
}

TEST_CASE("solve exit codes") {
  const fs::path dir = scratch("codes");
  write(dir / "bad.json", R"({"epsilon": 1.5})");
  CHECK(run_cli("solve --config " + (dir / "bad.json").string() + " --out " + dir.string()) == 1);
  write(dir / "short.json", R"({"epsilon": 0.1, "grid": {"n_r": 32, "n_z": 32}, "tol": {"max_iterations": 1}})");
  CHECK(run_cli("solve --config " + (dir / "short.json").string() + " --out " + dir.string()) == 2);
  CHECK(slurp(dir / "result.json").find("\"partial\": true") != std::string::npos);
  CHECK(run_cli("solve --config " + (dir / "missing.json").string() + " --out " + dir.string()) == 1);
  fs::remove_all(dir);
}

TEST_CASE("sweep deduplicates and report fits") {
  const fs::path dir = scratch("sweep");
  write(dir / "cfg.json", R"({"epsilons": [0.2, 0.1, 0.1, 0.05], "grid": {"n_r": 48, "n_z": 48}})");
  CHECK(run_cli("sweep --config " + (dir / "cfg.json").string() + " --out " + dir.string() + " --threads 2") == 0);
  const auto points = vring::read_sweep_csv((dir / "sweep.csv").string());
  CHECK(points.size() == 3);
  // Every sweep row comes from the per-epsilon result files.
  for (const auto& p : points) {
    const auto res = nlohmann::json::parse(slurp(dir / ("eps_" + vring::format_number(p.epsilon)) / "result.json"));
    CHECK(res["mu"].get<double>() == p.mu);
    CHECK(res["E"].get<double>() == p.E);
    CHECK(res["diagnostics"]["R_center"].get<double>() == p.R_center);
    CHECK(res["diagnostics"]["far_field"]["v_z"].get<double>() == p.far_vz);
  }
  CHECK(run_cli("report --sweep " + (dir / "sweep.csv").string() + " --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "report.json"));

  write(dir / "one.json", R"({"epsilons": [0.2, 0.1], "grid": {"n_r": 32, "n_z": 32}, "tol": {"max_iterations": 1}})");
  CHECK(run_cli("sweep --config " + (dir / "one.json").string() + " --out " + (dir / "x").string()) == 2);
  fs::remove_all(dir);
}

TEST_CASE("validate suites") {
  const fs::path dir = scratch("validate");
  CHECK(run_cli("validate bathtub --out " + dir.string()) == 0);
  CHECK(run_cli("validate profiles --out " + dir.string()) == 0);
  CHECK(run_cli("validate nosuch --out " + dir.string()) == 1);
  run_cli("validate greens --out " + dir.string());
  const std::string csv = slurp(dir / "greens.csv");
  CHECK(csv.rfind("r,z,rp,zp,sigma,K_quad,K_closed,rel_err,bound\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("output directory falls back to the environment") {
  const fs::path dir = scratch("env");
  setenv("RING_DESING_OUT", dir.string().c_str(), 1);
  CHECK(run_cli("validate bathtub") == 0);
  CHECK(fs::exists(dir / "validate_bathtub.json"));
  unsetenv("RING_DESING_OUT");
  fs::remove_all(dir);
}
