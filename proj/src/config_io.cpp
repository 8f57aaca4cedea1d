#include "vring/config_io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "vring/errors.hpp"

namespace vring {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Problems {
 public:
  void add(std::string msg) { list_.push_back(std::move(msg)); }
  bool empty() const { return list_.empty(); }
  [[noreturn]] void raise() const {
    std::string msg = "invalid configuration:";
    for (const auto& p : list_) msg += "\n  - " + p;
    throw ConfigError(msg);
  }

 private:
  std::vector<std::string> list_;
};

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed,
                Problems& problems) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) problems.add("unknown key '" + where + key + "'");
}

template <typename T>
bool read(const json& obj, const char* key, const std::string& where, T& out,
          Problems& problems) {
  if (!obj.contains(key)) return false;
  const json& v = obj.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) {
      problems.add("'" + where + key + "' must be a boolean");
      return false;
    }
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      problems.add("'" + where + key + "' must be a non-negative integer");
      return false;
    }
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) {
      problems.add("'" + where + key + "' must be a number");
      return false;
    }
  } else {
    if (!v.is_string()) {
      problems.add("'" + where + key + "' must be a string");
      return false;
    }
  }
  out = v.get<T>();
  return true;
}

const json* section(const json& doc, const char* key, Problems& problems) {
  if (!doc.contains(key)) return nullptr;
  if (!doc.at(key).is_object()) {
    problems.add(std::string("'") + key + "' must be an object");
    return nullptr;
  }
  return &doc.at(key);
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  Problems problems;
  check_keys(doc, "",
             {"kappa", "W", "epsilon", "epsilons", "Lambda", "grid", "profile", "tol",
              "symmetrize", "acceleration"},
             problems);

  RunConfig rc;
  ProblemConfig& cfg = rc.problem;
  read(doc, "kappa", "", cfg.kappa, problems);
  read(doc, "W", "", cfg.W, problems);
  const bool has_eps = read(doc, "epsilon", "", cfg.epsilon, problems);
  if (doc.contains("Lambda") && !doc.at("Lambda").is_null()) read(doc, "Lambda", "", cfg.Lambda, problems);
  read(doc, "symmetrize", "", cfg.symmetrize, problems);

  if (doc.contains("epsilons")) {
    const json& list = doc.at("epsilons");
    if (!list.is_array() || list.empty()) {
      problems.add("'epsilons' must be a non-empty array of numbers");
    } else {
      for (std::size_t k = 0; k < list.size(); ++k) {
        if (!list[k].is_number()) {
          problems.add("'epsilons[" + std::to_string(k) + "]' must be a number");
          continue;
        }
        const double e = list[k].get<double>();
        if (!(e > 0.0 && e < 1.0))
          problems.add("'epsilons[" + std::to_string(k) + "]' = " + format_number(e) +
                       " must lie in (0, 1)");
        rc.epsilons.push_back(e);
      }
    }
  }
  if (!has_eps) {
    if (rc.epsilons.empty()) problems.add("'epsilon' is required (or 'epsilons' for a sweep)");
    else cfg.epsilon = rc.epsilons.front();
  }

  if (const json* grid = section(doc, "grid", problems)) {
    check_keys(*grid, "grid.", {"n_r", "n_z"}, problems);
    read(*grid, "n_r", "grid.", cfg.n_r, problems);
    read(*grid, "n_z", "grid.", cfg.n_z, problems);
  }
  if (const json* tol = section(doc, "tol", problems)) {
    check_keys(*tol, "tol.", {"zeta", "mu", "max_iterations"}, problems);
    read(*tol, "zeta", "tol.", cfg.tol.zeta, problems);
    read(*tol, "mu", "tol.", cfg.tol.mu, problems);
    read(*tol, "max_iterations", "tol.", cfg.tol.max_iterations, problems);
  }
  if (const json* acc = section(doc, "acceleration", problems)) {
    check_keys(*acc, "acceleration.", {"anderson_depth", "translation_moves"}, problems);
    read(*acc, "anderson_depth", "acceleration.", cfg.anderson_depth, problems);
    read(*acc, "translation_moves", "acceleration.", cfg.translation_moves, problems);
  }

  std::string family = "power_law", table_path;
  double p = 1.0, alpha = 1.0;
  if (const json* prof = section(doc, "profile", problems)) {
    check_keys(*prof, "profile.", {"family", "p", "alpha", "table_path"}, problems);
    read(*prof, "family", "profile.", family, problems);
    read(*prof, "p", "profile.", p, problems);
    read(*prof, "alpha", "profile.", alpha, problems);
    read(*prof, "table_path", "profile.", table_path, problems);
  }
  try {
    switch (parse_profile_family(family)) {
      case ProfileFamily::power_law: rc.generator = GeneratorPair::power_law(p); break;
      case ProfileFamily::turkington: rc.generator = GeneratorPair::turkington(alpha); break;
      case ProfileFamily::beltrami: rc.generator = GeneratorPair::beltrami(p); break;
      case ProfileFamily::mixed: rc.generator = GeneratorPair::mixed(p); break;
      case ProfileFamily::tabulated:
        if (table_path.empty()) problems.add("'profile.table_path' is required for tabulated profiles");
        else rc.generator = GeneratorPair::from_table_csv(table_path);
        break;
      case ProfileFamily::custom:
        problems.add("'profile.family' = custom is only available from the library API");
        break;
    }
  } catch (const ConfigError& e) {
    problems.add(std::string("profile: ") + e.what());
  }

  for (const auto& msg : cfg.problems(rc.generator)) problems.add(msg);
  if (!problems.empty()) problems.raise();
  rc.snapshot = config_to_json(cfg, rc.generator, rc.epsilons, table_path);
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  // Table paths are relative to the config file.
  if (doc.is_object() && doc.contains("profile") && doc["profile"].is_object() &&
      doc["profile"].contains("table_path") && doc["profile"]["table_path"].is_string()) {
    fs::path table = doc["profile"]["table_path"].get<std::string>();
    if (table.is_relative()) doc["profile"]["table_path"] = (fs::path(path).parent_path() / table).string();
  }
  return parse_config(doc);
}

json config_to_json(const ProblemConfig& cfg, const GeneratorPair& gen,
                    const std::vector<double>& epsilons, const std::string& table_path) {
  json j;
  j["kappa"] = cfg.kappa;
  j["W"] = cfg.W;
  j["epsilon"] = cfg.epsilon;
  j["Lambda"] = cfg.cap(gen);
  j["grid"] = {{"n_r", cfg.n_r}, {"n_z", cfg.n_z}};
  json prof = {{"family", to_string(gen.family())}};
  switch (gen.family()) {
    case ProfileFamily::turkington: prof["alpha"] = gen.alpha(); break;
    case ProfileFamily::tabulated: prof["table_path"] = table_path; break;
    case ProfileFamily::custom: prof["name"] = gen.name(); break;
    default: prof["p"] = gen.p(); break;
  }
  j["profile"] = prof;
  j["tol"] = {{"zeta", cfg.tol.zeta}, {"mu", cfg.tol.mu}, {"max_iterations", cfg.tol.max_iterations}};
  j["symmetrize"] = cfg.symmetrize;
  j["acceleration"] = {{"anderson_depth", cfg.anderson_depth},
                       {"translation_moves", cfg.translation_moves}};
  if (!epsilons.empty()) j["epsilons"] = epsilons;
  return j;
}

json result_to_json(const ProblemConfig& cfg, const SolveResult& result,
                    const DiagnosticsRecord* d) {
  json j;
  j["epsilon"] = cfg.epsilon;
  j["converged"] = result.converged;
  j["mu"] = result.state.mu;
  j["E"] = result.state.energy;
  j["iterations"] = result.state.iteration;
  j["kkt_residual"] = result.kkt_residual;
  j["patch_measure"] = result.patch_measure;
  j["mass"] = integrate_nu(result.state.zeta);
  j["Lambda"] = result.Lambda;
  j["energy_monotone"] = result.energy_monotone;
  j["asymptotics_reliable"] = result.asymptotics_reliable;
  j["accelerated_steps"] = result.accelerated_steps;
  j["translation_steps"] = result.translation_steps;
  j["energy_trace"] = result.energy_trace;
  j["grid"] = {{"n_r", cfg.n_r}, {"n_z", cfg.n_z}, {"fingerprint", result.state.zeta.spec().fingerprint()}};
  if (!result.asymptotics_reliable)
    j["warning"] = "epsilon >= 0.5: asymptotic diagnostics are unreliable";
  if (d != nullptr) {
    json dj;
    dj["R_center"] = d->center.r;
    dj["Z_center"] = d->center.z;
    dj["theta_minus"] = d->support.theta_minus;
    dj["theta_plus"] = d->support.theta_plus;
    dj["diam"] = d->support.diam;
    dj["diam_over_eps"] = d->support.diam / cfg.epsilon;
    dj["dist_to_ring"] = d->support.dist_to_ring;
    dj["support_cells"] = d->support.cells;
    dj["core_radius"] = d->core_radius;
    dj["simply_connected"] = d->simply_connected;
    dj["support_interior"] = d->support_interior;
    dj["psi_negative_on_boundary"] = d->psi_negative_on_boundary;
    dj["psi_max_in_support"] = d->psi_max_in_support;
    dj["dz_psi_max"] = d->dz_psi_max;
    dj["swirl_max"] = d->swirl_max;
    dj["swirl_on_core"] = d->swirl_on_core;
    dj["far_field"] = {{"r", d->far_field.r},
                       {"z", d->far_field.z},
                       {"distance", d->far_field.distance},
                       {"v_z", d->far_field.v_z},
                       {"expected", d->far_field.expected},
                       {"rel_error", d->far_field.rel_error}};
    dj["axis_bounded"] = d->axis.bounded;
    j["diagnostics"] = dj;
  }
  return j;
}

std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

void write_text_atomic(const std::string& path, const std::string& text) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::ostringstream os;
  os << kSweepHeader << "\n";
  for (const auto& p : points) {
    const double L = std::log(1.0 / p.epsilon);
    const double values[] = {p.epsilon, L, p.mu, p.E, p.R_center, p.theta_minus, p.theta_plus,
                             p.diam, p.diam / p.epsilon, p.dist_to_ring, p.mass, p.kkt_residual,
                             p.patch_measure};
    for (double v : values) os << format_number(v) << ",";
    os << (p.simply_connected ? "true" : "false") << "," << format_number(p.far_vz) << ","
       << format_number(p.core_radius) << "," << p.status << "\n";
  }
  return os.str();
}

std::vector<SweepPoint> parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSweepHeader) throw ConfigError("sweep CSV header does not match the expected columns");
  std::vector<SweepPoint> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream fields(line);
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (cells.size() != 17) throw ConfigError("sweep CSV row " + std::to_string(row) + " has " +
                                              std::to_string(cells.size()) + " fields, expected 17");
    auto num = [&](std::size_t k) {
      try {
        return std::stod(cells[k]);
      } catch (const std::exception&) {
        throw ConfigError("sweep CSV row " + std::to_string(row) + " field " + std::to_string(k + 1) +
                          " is not a number");
      }
    };
    SweepPoint p;
    p.epsilon = num(0);
    p.mu = num(2);
    p.E = num(3);
    p.R_center = num(4);
    p.theta_minus = num(5);
    p.theta_plus = num(6);
    p.diam = num(7);
    p.dist_to_ring = num(9);
    p.mass = num(10);
    p.kkt_residual = num(11);
    p.patch_measure = num(12);
    p.simply_connected = cells[13] == "true";
    p.far_vz = num(14);
    p.core_radius = num(15);
    p.status = cells[16];
    out.push_back(p);
  }
  return out;
}

std::vector<SweepPoint> read_sweep_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sweep CSV '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_sweep_csv(ss.str());
}

json report_to_json(const AsymptoticFit& fit, const KelvinHicksReport& kh, double kappa, double W) {
  json j;
  j["kappa"] = kappa;
  j["W"] = W;
  j["points"] = fit.points;
  j["mu"] = {{"slope", fit.slope_mu},
             {"intercept", fit.intercept_mu},
             {"r_squared", fit.r_squared_mu},
             {"predicted_slope", fit.predicted_slope_mu},
             {"relative_error", fit.rel_error_mu}};
  j["energy"] = {{"slope", fit.slope_E},
                 {"intercept", fit.intercept_E},
                 {"r_squared", fit.r_squared_E},
                 {"predicted_slope", fit.predicted_slope_E},
                 {"relative_error", fit.rel_error_E}};
  j["kelvin_hicks"] = {{"differences", kh.differences},
                       {"spread", kh.spread},
                       {"bounded", kh.bounded},
                       {"core_ratio", kh.core_ratio},
                       {"core_ratio_factor", kh.core_ratio_factor}};
  return j;
}

}  // namespace vring
