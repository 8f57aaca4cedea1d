#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "vring/diagnostics.hpp"
#include "vring/profiles.hpp"
#include "vring/solver.hpp"

namespace vring {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
  ProblemConfig problem;
  GeneratorPair generator = GeneratorPair::power_law(1.0);
  std::vector<double> epsilons;  // sweep values; empty for single solves
  nlohmann::json snapshot;       // normalised config with defaults filled in
};

// Parses and validates a config document. Every offending key is reported
// in one ConfigError, one line per problem.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

// Normalised snapshot of a config (all keys, defaults made explicit).
nlohmann::json config_to_json(const ProblemConfig& cfg, const GeneratorPair& gen,
                              const std::vector<double>& epsilons = {},
                              const std::string& table_path = "");

nlohmann::json result_to_json(const ProblemConfig& cfg, const SolveResult& result,
                              const DiagnosticsRecord* diagnostics);

// Sorted keys, two-space indent, trailing newline.
std::string dump_json(const nlohmann::json& doc);

// Writes through a temporary file in the same directory and renames.
void write_text_atomic(const std::string& path, const std::string& text);

inline const char* kSweepHeader =
    "epsilon,log_inv_eps,mu,E,R_center,theta_minus,theta_plus,diam,diam_over_eps,dist_to_ring,"
    "mass,kkt_residual,patch_measure,simply_connected,far_vz,core_radius,status";

std::string sweep_csv(const std::vector<SweepPoint>& points);
std::vector<SweepPoint> parse_sweep_csv(const std::string& text);
std::vector<SweepPoint> read_sweep_csv(const std::string& path);

nlohmann::json report_to_json(const AsymptoticFit& fit, const KelvinHicksReport& kh,
                              double kappa, double W);

// Shortest round-trip decimal form of a double.
std::string format_number(double v);

}  // namespace vring
