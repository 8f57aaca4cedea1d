#include "vring/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <optional>
#include <sstream>

#include "vring/errors.hpp"
#include "vring/parallel.hpp"
#include "vring/rearrange.hpp"

namespace vring {
namespace {

double l1_nu(const ScalarField& a, const ScalarField& b) {
  const GridSpec& g = a.spec();
  double total = 0.0;
  for (std::size_t i = 0; i < g.n_r(); ++i) {
    double column = 0.0;
    for (std::size_t j = 0; j < g.n_z(); ++j) column += std::abs(a(i, j) - b(i, j));
    total += column * g.cell_volume(i);
  }
  return total;
}

// Background -(W r^2 / 2) log(1/eps) per radial index.
std::vector<double> background(const ProblemConfig& cfg, const GridSpec& g) {
  std::vector<double> bg(g.n_r());
  const double c = 0.5 * cfg.W * cfg.log_inv_eps();
  for (std::size_t i = 0; i < g.n_r(); ++i) bg[i] = c * g.r_center(i) * g.r_center(i);
  return bg;
}

void mirror_average(ScalarField& f) {
  const GridSpec& g = f.spec();
  for (std::size_t i = 0; i < g.n_r(); ++i)
    for (std::size_t j = 0; j < g.n_z() / 2; ++j) {
      const std::size_t jm = g.mirror_j(j);
      const double avg = 0.5 * (f(i, j) + f(i, jm));
      f(i, j) = avg;
      f(i, jm) = avg;
    }
}

// zeta moved by `shift` radial cells with zeta r kept per cell, so the
// nu-mass is unchanged. Empty when mass would leave the grid or the cap would
// be exceeded.
std::optional<ScalarField> shift_radially(const ScalarField& zeta, int shift, double cap) {
  const GridSpec& g = zeta.spec();
  const auto nr = static_cast<long>(g.n_r());
  ScalarField out(g, 0.0);
  for (long i = 0; i < nr; ++i) {
    const long target = i + shift;
    for (std::size_t j = 0; j < g.n_z(); ++j) {
      const double v = zeta(static_cast<std::size_t>(i), j);
      if (v == 0.0) continue;
      if (target < 0 || target >= nr) return std::nullopt;
      const auto ti = static_cast<std::size_t>(target);
      const double moved = v * g.r_center(static_cast<std::size_t>(i)) / g.r_center(ti);
      if (moved > cap) return std::nullopt;
      out(ti, j) = moved;
    }
  }
  return out;
}

}  // namespace

double ProblemConfig::r_star() const { return kappa / (4.0 * std::numbers::pi * W); }
double ProblemConfig::log_inv_eps() const { return std::log(1.0 / epsilon); }
DomainBounds ProblemConfig::domain() const { return default_domain(kappa, W); }
GridSpec ProblemConfig::grid() const { return build_grid(domain(), n_r, n_z); }

double ProblemConfig::cap(const GeneratorPair& gen) const {
  if (std::isnan(Lambda)) return 40.0 * std::max(1.0, gen.g0_plus());
  return Lambda;
}

std::vector<std::string> ProblemConfig::problems(const GeneratorPair& gen) const {
  std::vector<std::string> out;
  if (!(kappa > 0.0) || !std::isfinite(kappa)) out.push_back("kappa must be > 0");
  if (!(W > 0.0) || !std::isfinite(W)) out.push_back("W must be > 0");
  if (!(epsilon > 0.0 && epsilon < 1.0)) out.push_back("epsilon must lie in (0, 1)");
  const double lam = cap(gen);
  const double floor = std::max(1.0, gen.g0_plus());
  if (!(lam > floor) || !std::isfinite(lam)) {
    std::ostringstream os;
    os << "Lambda must exceed max(1, g(0+)) = " << floor;
    out.push_back(os.str());
  }
  if (n_r < 2 || n_z < 2) out.push_back("grid.n_r and grid.n_z must be >= 2");
  if (symmetrize && n_z % 2 != 0) out.push_back("grid.n_z must be even when symmetrize is on");
  if (!(tol.zeta > 0.0)) out.push_back("tol.zeta must be > 0");
  if (!(tol.mu > 0.0 && tol.mu < 1.0)) out.push_back("tol.mu must lie in (0, 1)");
  if (tol.max_iterations < 1) out.push_back("tol.max_iterations must be >= 1");
  return out;
}

void ProblemConfig::validate(const GeneratorPair& gen) const {
  const auto list = problems(gen);
  if (list.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& p : list) msg += "\n  - " + p;
  throw ConfigError(msg);
}

ScalarField relative_stream(const ProblemConfig& cfg, const ScalarField& psi0, double mu) {
  const GridSpec& g = psi0.spec();
  const auto bg = background(cfg, g);
  ScalarField psi(g, 0.0);
  for (std::size_t i = 0; i < g.n_r(); ++i)
    for (std::size_t j = 0; j < g.n_z(); ++j) psi(i, j) = psi0(i, j) - bg[i] - mu;
  return psi;
}

double energy(const ProblemConfig& cfg, const GeneratorPair& gen, const ScalarField& zeta,
              const ScalarField& psi0) {
  require_same_grid(zeta, psi0);
  const GridSpec& g = zeta.spec();
  const double eps2 = cfg.epsilon * cfg.epsilon;
  const double kinetic = 0.5 * inner_nu(zeta, psi0);
  double moment = 0.0, penalty = 0.0;
  for (std::size_t i = 0; i < g.n_r(); ++i) {
    const double r = g.r_center(i);
    double col_m = 0.0, col_j = 0.0;
    for (std::size_t j = 0; j < g.n_z(); ++j) {
      const double z = zeta(i, j);
      if (z == 0.0) continue;
      col_m += r * r * z;
      col_j += eval_J(gen, r, eps2 * z);
    }
    moment += col_m * g.cell_volume(i);
    penalty += col_j * g.cell_volume(i);
  }
  return kinetic - 0.5 * cfg.W * cfg.log_inv_eps() * moment - penalty / eps2;
}

ScalarField pointwise_update(const ProblemConfig& cfg, const GeneratorPair& gen,
                             const ScalarField& psi) {
  const GridSpec& g = psi.spec();
  const double lam = cfg.cap(gen);
  const double inv_eps2 = 1.0 / (cfg.epsilon * cfg.epsilon);
  ScalarField zeta(g, 0.0);
  for (std::size_t i = 0; i < g.n_r(); ++i) {
    const double r = g.r_center(i);
    for (std::size_t j = 0; j < g.n_z(); ++j) {
      const double t = psi(i, j);
      if (t > 0.0) zeta(i, j) = std::min(lam, eval_i(gen, r, t)) * inv_eps2;
    }
  }
  return zeta;
}

MuSolution solve_mu(const ProblemConfig& cfg, const GeneratorPair& gen, const ScalarField& psi0) {
  const GridSpec& g = psi0.spec();
  const auto bg = background(cfg, g);
  const double lam = cfg.cap(gen);
  const double inv_eps2 = 1.0 / (cfg.epsilon * cfg.epsilon);

  // Only cells with psi0 - bg > 0 can carry vorticity for mu >= 0.
  struct Cell {
    std::size_t k, i;
    double base, r;
  };
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < g.n_r(); ++i)
    for (std::size_t j = 0; j < g.n_z(); ++j) {
      const double base = psi0(i, j) - bg[i];
      if (base > 0.0) cells.push_back({g.flat(i, j), i, base, g.r_center(i)});
    }

  std::vector<double> values(cells.size());
  // Fills `values` for multiplier mu and returns the nu-mass with the same
  // column-wise summation order as integrate_nu.
  auto evaluate = [&](double mu, std::vector<double>& out) {
    double total = 0.0, column = 0.0;
    std::size_t current = cells.empty() ? 0 : cells.front().i;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].i != current) {
        total += column * g.cell_volume(current);
        column = 0.0;
        current = cells[c].i;
      }
      const double t = cells[c].base - mu;
      out[c] = t > 0.0 ? std::min(lam, eval_i(gen, cells[c].r, t)) * inv_eps2 : 0.0;
      column += out[c];
    }
    if (!cells.empty()) total += column * g.cell_volume(current);
    return total;
  };
  auto to_field = [&](const std::vector<double>& v) {
    ScalarField z(g, 0.0);
    for (std::size_t c = 0; c < cells.size(); ++c) z[cells[c].k] = v[c];
    return z;
  };

  MuSolution sol;
  const double m0 = evaluate(0.0, values);
  if (m0 <= cfg.kappa) {
    sol.mu = 0.0;
    sol.mass = m0;
    sol.zeta = to_field(values);
    return sol;
  }

  double lo = 0.0, hi = std::max(0.0, psi0.max());
  double m_lo = m0;
  std::vector<double> v_hi(cells.size());
  double m_hi = evaluate(hi, v_hi);
  if (m_hi > cfg.kappa)
    throw NumericalError("multiplier bracket failure: mass at mu = max psi0 exceeds kappa");
  const double target = cfg.kappa * (1.0 - cfg.tol.mu);
  std::vector<double> v_lo = values, v_mid(cells.size());
  while (m_hi < target) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) {
      // The interval collapsed on a jump of i: fill the cells that switch on
      // between hi and lo in proportion, landing just below kappa.
      const double goal = cfg.kappa * (1.0 - 1e-14);
      const double theta = std::clamp((goal - m_hi) / (m_lo - m_hi), 0.0, 1.0);
      for (std::size_t c = 0; c < cells.size(); ++c) v_hi[c] += theta * (v_lo[c] - v_hi[c]);
      sol.level_fill = true;
      break;
    }
    const double m_mid = evaluate(mid, v_mid);
    ++sol.bisections;
    if (m_mid > m_lo || m_mid < m_hi)
      throw ConsistencyError("mass is not monotone in the multiplier");
    if (m_mid > cfg.kappa) {
      lo = mid;
      m_lo = m_mid;
      std::swap(v_lo, v_mid);
    } else {
      hi = mid;
      m_hi = m_mid;
      std::swap(v_hi, v_mid);
    }
  }
  sol.mu = hi;
  sol.zeta = to_field(v_hi);
  sol.mass = integrate_nu(sol.zeta);
  return sol;
}

ScalarField initialize(const ProblemConfig& cfg, const GeneratorPair& gen) {
  cfg.validate(gen);
  const GridSpec g = cfg.grid();
  const double rs = cfg.r_star();
  const double cap = cfg.cap(gen) / (cfg.epsilon * cfg.epsilon);
  const double room = std::min({rs - g.r_min(), g.r_max() - rs, g.z_max(), -g.z_min()});
  double radius = cfg.epsilon * std::sqrt(cfg.kappa / (std::numbers::pi * rs));
  for (int attempt = 0; attempt < 200; ++attempt) {
    if (radius >= room) {
      std::ostringstream os;
      os << "initial patch of radius " << radius << " does not fit inside D (epsilon = "
         << cfg.epsilon << " too large)";
      throw ConfigError(os.str());
    }
    ScalarField zeta(g, 0.0);
    double volume = 0.0;
    for (std::size_t i = 0; i < g.n_r(); ++i)
      for (std::size_t j = 0; j < g.n_z(); ++j)
        if (std::hypot(g.r_center(i) - rs, g.z_center(j)) < radius) {
          zeta(i, j) = 1.0;
          volume += g.cell_volume(i);
        }
    if (volume == 0.0) {
      radius *= 1.05;
      continue;
    }
    const double c = cfg.kappa / volume;
    if (c <= cap) {
      zeta *= c;
      return zeta;
    }
    radius *= 1.05;
  }
  throw ConfigError("could not place an admissible initial patch");
}

double patch_measure(const ProblemConfig& cfg, double Lambda, const ScalarField& zeta) {
  const GridSpec& g = zeta.spec();
  const double eps2 = cfg.epsilon * cfg.epsilon;
  double total = 0.0;
  for (std::size_t i = 0; i < g.n_r(); ++i)
    for (std::size_t j = 0; j < g.n_z(); ++j)
      if (eps2 * zeta(i, j) >= 0.999 * Lambda) total += g.cell_volume(i);
  return total;
}

double kkt_residual(const ProblemConfig& cfg, const GeneratorPair& gen, const ScalarField& zeta,
                    const ScalarField& psi) {
  require_same_grid(zeta, psi);
  const GridSpec& g = zeta.spec();
  const double lam = cfg.cap(gen);
  const double eps2 = cfg.epsilon * cfg.epsilon;
  const double g0 = gen.g0_plus();
  double scale = 0.0;
  for (double v : psi.values()) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) scale = 1.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < g.n_r(); ++i) {
    const double r = g.r_center(i);
    const double cap_threshold = eval_dJds(gen, r, lam);
    for (std::size_t j = 0; j < g.n_z(); ++j) {
      const double s = eps2 * zeta(i, j);
      const double p = psi(i, j);
      double v;
      if (s >= lam) {
        v = std::max(0.0, cap_threshold - p) / scale;
      } else if (s > 0.0) {
        v = std::max(0.0, -p) / scale;
        // Below the jump of i the inverse relation is read through dJ/ds.
        const double interior = (g0 > 0.0 && s <= g0)
                                    ? std::abs(p - eval_dJds(gen, r, s)) / scale
                                    : std::abs(s - eval_i(gen, r, std::max(p, 0.0))) / lam;
        v = std::max(v, interior);
      } else {
        v = std::max(0.0, p) / scale;
      }
      worst = std::max(worst, v);
    }
  }
  return worst;
}

double kkt_residual(const ProblemConfig& cfg, const GeneratorPair& gen, const SolveResult& result) {
  return kkt_residual(cfg, gen, result.state.zeta, result.state.psi);
}

SolveResult run(const ProblemConfig& cfg, const GeneratorPair& gen) {
  cfg.validate(gen);
  StreamOperator op(cfg.grid(), cfg.threads);
  return run(cfg, gen, op);
}

SolveResult run(const ProblemConfig& cfg, const GeneratorPair& gen, const StreamOperator& op) {
  cfg.validate(gen);
  const GridSpec g = cfg.grid();
  if (!(op.grid() == g)) throw ConsistencyError("stream operator grid does not match the config");
  if (cfg.symmetrize && !g.symmetric_in_z())
    throw ConfigError("symmetrize requires a grid symmetric about z = 0");

  SolveResult result;
  result.Lambda = cfg.cap(gen);
  result.asymptotics_reliable = cfg.epsilon < 0.5;

  auto stream = [&](const ScalarField& zeta) {
    ScalarField psi0 = op.apply(zeta, support_indices(zeta));
    if (cfg.symmetrize) mirror_average(psi0);
    return psi0;
  };
  // One ascent map: multiplier, pointwise update, optional symmetrization.
  auto ascend = [&](const ScalarField& psi0, double& mu) {
    MuSolution m = solve_mu(cfg, gen, psi0);
    mu = m.mu;
    if (cfg.symmetrize) return steiner_symmetrize_z(m.zeta, op.threads());
    return std::move(m.zeta);
  };

  ScalarField zeta = initialize(cfg, gen);
  ScalarField psi0 = stream(zeta);
  double mu = 0.0;
  double E = energy(cfg, gen, zeta, psi0);
  result.energy_trace.push_back(E);

  using Vec = Eigen::VectorXd;
  auto as_vec = [](const ScalarField& f) {
    return Vec(Eigen::Map<const Vec>(f.values().data(), static_cast<Eigen::Index>(f.size())));
  };
  std::deque<Vec> dx, df;  // differences of iterates and of residuals
  Vec x_prev, f_prev;

  std::size_t it = 0;
  for (; it < cfg.tol.max_iterations; ++it) {
    double mu_p = 0.0;
    ScalarField zeta_p = ascend(psi0, mu_p);
    ScalarField psi0_p = stream(zeta_p);
    double E_p = energy(cfg, gen, zeta_p, psi0_p);
    const double change = l1_nu(zeta_p, zeta) / cfg.kappa;
    result.change_trace.push_back(change);

    if (change <= cfg.tol.zeta) {
      zeta = std::move(zeta_p);
      psi0 = std::move(psi0_p);
      mu = mu_p;
      E = E_p;
      result.energy_trace.push_back(E);
      result.converged = true;
      ++it;
      break;
    }

    // Anderson candidate on the fixed-point map psi0 -> K(ascend(psi0)).
    bool took_candidate = false;
    if (cfg.anderson_depth > 0) {
      const Vec x = as_vec(psi0);
      const Vec gx = as_vec(psi0_p);
      const Vec f = gx - x;
      if (x_prev.size() == x.size()) {
        dx.push_back(x - x_prev);
        df.push_back(f - f_prev);
        if (dx.size() > cfg.anderson_depth) {
          dx.pop_front();
          df.pop_front();
        }
      }
      x_prev = x;
      f_prev = f;
      if (!dx.empty()) {
        const auto m = static_cast<Eigen::Index>(df.size());
        Eigen::MatrixXd F(f.size(), m), X(f.size(), m);
        for (Eigen::Index c = 0; c < m; ++c) {
          F.col(c) = df[static_cast<std::size_t>(c)];
          X.col(c) = dx[static_cast<std::size_t>(c)];
        }
        const Vec gamma = F.colPivHouseholderQr().solve(f);
        if (gamma.allFinite()) {
          const Vec xa = gx - (X + F) * gamma;
          ScalarField psi0_a(g, std::vector<double>(xa.data(), xa.data() + xa.size()));
          if (cfg.symmetrize) mirror_average(psi0_a);
          double mu_c = 0.0;
          ScalarField zeta_c = ascend(psi0_a, mu_c);
          ScalarField psi0_c = stream(zeta_c);
          const double E_c = energy(cfg, gen, zeta_c, psi0_c);
          if (E_c > E_p) {
            zeta = std::move(zeta_c);
            psi0 = std::move(psi0_c);
            mu = mu_c;
            E = E_c;
            took_candidate = true;
            ++result.accelerated_steps;
          }
        }
      }
    }
    if (cfg.translation_moves) {
      const double best = took_candidate ? E : E_p;
      const double cap = result.Lambda / (cfg.epsilon * cfg.epsilon);
      double E_s_best = best;
      std::optional<ScalarField> zeta_s_best, psi0_s_best;
      for (int shift : {-1, 1}) {
        auto zeta_s = shift_radially(zeta, shift, cap);
        if (!zeta_s) continue;
        ScalarField psi0_s = stream(*zeta_s);
        const double E_s = energy(cfg, gen, *zeta_s, psi0_s);
        if (E_s > E_s_best) {
          E_s_best = E_s;
          zeta_s_best = std::move(zeta_s);
          psi0_s_best = std::move(psi0_s);
        }
      }
      if (zeta_s_best) {
        zeta = std::move(*zeta_s_best);
        psi0 = std::move(*psi0_s_best);
        E = E_s_best;
        took_candidate = true;
        ++result.translation_steps;
        // The jump invalidates the secant history.
        dx.clear();
        df.clear();
        x_prev.resize(0);
      }
    }
    if (!took_candidate) {
      zeta = std::move(zeta_p);
      psi0 = std::move(psi0_p);
      mu = mu_p;
      E = E_p;
    }
    result.energy_trace.push_back(E);
  }

  for (std::size_t k = 1; k < result.energy_trace.size(); ++k) {
    const double prev = result.energy_trace[k - 1];
    if (result.energy_trace[k] < prev - 1e-9 * std::abs(prev)) result.energy_monotone = false;
  }

  result.state.zeta = std::move(zeta);
  result.state.psi0 = std::move(psi0);
  result.state.mu = mu;
  result.state.psi = relative_stream(cfg, result.state.psi0, mu);
  result.state.energy = E;
  result.state.iteration = it;
  result.kkt_residual = kkt_residual(cfg, gen, result);
  result.patch_measure = patch_measure(cfg, result.Lambda, result.state.zeta);
  return result;
}

}  // namespace vring
