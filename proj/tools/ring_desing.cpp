#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "vring/config_io.hpp"
#include "vring/diagnostics.hpp"
#include "vring/errors.hpp"
#include "vring/greens.hpp"
#include "vring/solver.hpp"
#include "vring/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vring;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string sweep;
  std::string suite;
  unsigned threads = 1;
  std::uint64_t seed = 20240611;
};

std::string output_dir(const Options& opt) {
  if (!opt.out.empty()) return opt.out;
  if (const char* env = std::getenv("RING_DESING_OUT"); env != nullptr && *env != '\0') return env;
  return ".";
}

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::string field_csv(const ScalarField& field) {
  std::ostringstream os;
  write_field_csv(os, field);
  return os.str();
}

struct RunOutput {
  SolveResult result;
  DiagnosticsRecord diagnostics;
  bool has_diagnostics = false;
  std::string diagnostics_error;
  json timings;
  std::vector<std::string> files;
};

// Solves one configuration and writes result.json, zeta.csv and psi.csv into dir.
RunOutput solve_and_write(const ProblemConfig& cfg, const GeneratorPair& gen, const StreamOperator& op,
                          const fs::path& dir) {
  RunOutput out;
  Stopwatch sw;
  out.result = run(cfg, gen, op);
  out.timings["solve"] = sw.lap();
  try {
    out.diagnostics = diagnose(cfg, gen, out.result);
    out.has_diagnostics = true;
  } catch (const std::exception& e) {
    out.diagnostics_error = e.what();
  }
  out.timings["diagnostics"] = sw.lap();
  json result = result_to_json(cfg, out.result, out.has_diagnostics ? &out.diagnostics : nullptr);
  if (!out.diagnostics_error.empty()) result["diagnostics_error"] = out.diagnostics_error;
  if (!out.result.converged) result["partial"] = true;
  write_text_atomic((dir / "result.json").string(), dump_json(result));
  write_text_atomic((dir / "zeta.csv").string(), field_csv(out.result.state.zeta));
  write_text_atomic((dir / "psi.csv").string(), field_csv(out.result.state.psi));
  out.files = {"result.json", "zeta.csv", "psi.csv"};
  out.timings["write"] = sw.lap();
  return out;
}

json manifest(const RunConfig& rc, const json& outputs, const json& timings) {
  return {{"tool_version", kToolVersion},
          {"config", rc.snapshot},
          {"grid_hash", rc.problem.grid().fingerprint()},
          {"outputs", outputs},
          {"wall_clock_seconds", timings}};
}

int cmd_solve(const Options& opt) {
  const RunConfig rc = load_config(opt.config);
  ProblemConfig cfg = rc.problem;
  cfg.threads = opt.threads;
  const fs::path dir = output_dir(opt);
  Stopwatch sw;
  const StreamOperator op(cfg.grid(), cfg.threads);
  const double t_op = sw.lap();
  RunOutput out = solve_and_write(cfg, rc.generator, op, dir);
  out.timings["operator"] = t_op;
  json files = out.files;
  files.push_back("manifest.json");
  write_text_atomic((dir / "manifest.json").string(), dump_json(manifest(rc, files, out.timings)));

  const auto& r = out.result;
  std::cout << "epsilon=" << format_number(cfg.epsilon) << " converged=" << (r.converged ? "true" : "false")
            << " iterations=" << r.state.iteration << " mu=" << format_number(r.state.mu)
            << " E=" << format_number(r.state.energy) << "\n";
  if (!r.asymptotics_reliable) std::cerr << "warning: epsilon >= 0.5, asymptotic diagnostics are unreliable\n";
  if (!r.converged) {
    std::cerr << "not converged after " << r.state.iteration << " iterations; partial results written\n";
    return 2;
  }
  return 0;
}

int cmd_sweep(const Options& opt) {
  const RunConfig rc = load_config(opt.config);
  std::vector<double> eps = rc.epsilons;
  if (eps.empty()) eps.push_back(rc.problem.epsilon);
  std::vector<double> unique;
  for (double e : eps) {
    if (std::find(unique.begin(), unique.end(), e) != unique.end()) {
      std::cerr << "warning: duplicate epsilon " << format_number(e) << " dropped\n";
      continue;
    }
    unique.push_back(e);
  }

  const fs::path dir = output_dir(opt);
  const unsigned workers = std::max(1U, std::min<unsigned>(opt.threads, unique.size()));
  Stopwatch sw;
  // Sweep points share one operator; parallelism goes to the pool.
  const StreamOperator op(rc.problem.grid(), workers == 1 ? opt.threads : 1);
  json timings;
  timings["operator"] = sw.lap();

  std::vector<SweepPoint> points(unique.size());
  std::vector<json> point_timings(unique.size());
  std::vector<std::string> subdirs(unique.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&]() {
    for (std::size_t k = next++; k < unique.size(); k = next++) {
      ProblemConfig cfg = rc.problem;
      cfg.epsilon = unique[k];
      cfg.threads = 1;
      subdirs[k] = "eps_" + format_number(unique[k]);
      SweepPoint p;
      p.epsilon = unique[k];
      try {
        RunOutput out = solve_and_write(cfg, rc.generator, op, dir / subdirs[k]);
        point_timings[k] = out.timings;
        if (out.has_diagnostics) {
          p = make_sweep_point(cfg, out.result, out.diagnostics);
        } else {
          p.mu = out.result.state.mu;
          p.E = out.result.state.energy;
          p.status = "diagnostics_failed";
        }
      } catch (const std::exception& e) {
        const double nan = std::nan("");
        p.mu = p.E = p.R_center = p.theta_minus = p.theta_plus = p.diam = p.dist_to_ring = nan;
        p.mass = p.kkt_residual = p.patch_measure = p.far_vz = p.core_radius = nan;
        p.status = "error";
        std::lock_guard lock(log_mutex);
        std::cerr << "epsilon " << format_number(unique[k]) << ": " << e.what() << "\n";
      }
      points[k] = p;
      std::lock_guard lock(log_mutex);
      std::cout << "epsilon=" << format_number(p.epsilon) << " status=" << p.status
                << " mu=" << format_number(p.mu) << " E=" << format_number(p.E) << "\n";
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  write_text_atomic((dir / "sweep.csv").string(), sweep_csv(points));
  json files = json::array({"sweep.csv", "manifest.json"});
  json runs = json::array();
  for (std::size_t k = 0; k < unique.size(); ++k) {
    for (const char* f : {"result.json", "zeta.csv", "psi.csv"})
      if (fs::exists(dir / subdirs[k] / f)) files.push_back(subdirs[k] + "/" + f);
    runs.push_back({{"epsilon", unique[k]}, {"dir", subdirs[k]}, {"status", points[k].status},
                    {"wall_clock_seconds", point_timings[k]}});
  }
  json m = manifest(rc, files, timings);
  m["runs"] = runs;
  write_text_atomic((dir / "manifest.json").string(), dump_json(m));

  const bool any_ok = std::any_of(points.begin(), points.end(),
                                  [](const SweepPoint& p) { return p.status == "converged"; });
  if (!any_ok) {
    std::cerr << "every sweep point failed\n";
    return 2;
  }
  return 0;
}

int cmd_validate(const Options& opt) {
  static const std::vector<std::string> suites = {"greens", "profiles", "bathtub", "all"};
  if (std::find(suites.begin(), suites.end(), opt.suite) == suites.end()) {
    std::cerr << "unknown suite '" << opt.suite << "' (expected greens, profiles, bathtub or all)\n";
    return 1;
  }
  const fs::path dir = output_dir(opt);
  const bool all = opt.suite == "all";
  json summary;
  bool passed = true;
  if (all || opt.suite == "greens") {
    validation::GreensOptions g;
    g.seed = opt.seed;
    const auto rep = validation::run_greens(g);
    write_text_atomic((dir / "greens.csv").string(), rep.csv());
    summary["greens"] = rep.summary();
    passed = passed && rep.passed();
  }
  if (all || opt.suite == "profiles") {
    validation::ProfilesOptions p;
    p.seed = opt.seed;
    const auto rep = validation::run_profiles(p);
    summary["profiles"] = rep.summary();
    passed = passed && rep.passed();
  }
  if (all || opt.suite == "bathtub") {
    validation::BathtubOptions b;
    b.seed = opt.seed;
    const auto rep = validation::run_bathtub(b);
    summary["bathtub"] = rep.summary();
    passed = passed && rep.passed();
  }
  summary["passed"] = passed;
  summary["seed"] = opt.seed;
  const std::string text = dump_json(summary);
  write_text_atomic((dir / ("validate_" + opt.suite + ".json")).string(), text);
  std::cout << text;
  return passed ? 0 : 2;
}

int cmd_report(const Options& opt) {
  const auto points = read_sweep_csv(opt.sweep);
  std::vector<SweepPoint> usable;
  for (const auto& p : points)
    if (p.status == "converged" || p.status == "not_converged") usable.push_back(p);
  double kappa = 4.0 * 3.14159265358979323846, W = 1.0;
  if (!opt.config.empty()) {
    const RunConfig rc = load_config(opt.config);
    kappa = rc.problem.kappa;
    W = rc.problem.W;
  }
  const AsymptoticFit fit = asymptotic_fit(usable, kappa, W);
  const KelvinHicksReport kh = kelvin_hicks_check(usable, kappa, W);
  const std::string text = dump_json(report_to_json(fit, kh, kappa, W));
  write_text_atomic((fs::path(output_dir(opt)) / "report.json").string(), text);
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady vortex rings by energy maximisation"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", opt.out, "Output directory (default $RING_DESING_OUT or .)");
    sub->add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", opt.seed, "Seed for validation sampling");
  };
  auto* solve = app.add_subcommand("solve", "Solve one configuration");
  solve->add_option("--config", opt.config, "JSON config")->required();
  add_common(solve);
  auto* sweep = app.add_subcommand("sweep", "Solve every epsilon in the config");
  sweep->add_option("--config", opt.config, "JSON config with 'epsilons'")->required();
  add_common(sweep);
  auto* validate = app.add_subcommand("validate", "Run validation suites");
  validate->add_option("suite", opt.suite, "greens, profiles, bathtub or all")->required();
  add_common(validate);
  auto* report = app.add_subcommand("report", "Fit asymptotics of a sweep");
  report->add_option("--sweep", opt.sweep, "sweep.csv")->required();
  report->add_option("--config", opt.config, "Config supplying kappa and W");
  add_common(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  try {
    if (*solve) return cmd_solve(opt);
    if (*sweep) return cmd_sweep(opt);
    if (*validate) return cmd_validate(opt);
    if (*report) return cmd_report(opt);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
