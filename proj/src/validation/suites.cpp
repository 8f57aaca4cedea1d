#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "vring/config_io.hpp"
#include "vring/errors.hpp"
#include "vring/fd_solver.hpp"
#include "vring/greens.hpp"
#include "vring/oracles.hpp"
#include "vring/quadrature.hpp"
#include "vring/rearrange.hpp"
#include "vring/validation.hpp"

namespace vring::validation {

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

// ---------------------------------------------------------------- greens

GreensReport run_greens(const GreensOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const DomainBounds d = default_domain(opts.kappa, opts.W);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> ur(d.r_min, d.r_max), uz(d.z_min, d.z_max);

  GreensReport rep;
  rep.agreement_passed = true;
  while (rep.rows.size() < opts.pairs) {
    const double r = ur(rng), z = uz(rng), rp = ur(rng), zp = uz(rng);
    const double s = sigma(r, z, rp, zp);
    if (s < opts.sigma_min) continue;
    GreensRow row{r, z, rp, zp, s, std::nan(""), 0.0, std::nan(""), 0.0};
    row.K_closed = kernel_closed_form(r, z, rp, zp).value;
    row.bound = kernel_upper_bound(r, z, rp, zp);
    try {
      row.K_quad = kernel_quadrature(r, z, rp, zp, 1e-12).value;
      row.rel_err = std::abs(row.K_closed - row.K_quad) / std::abs(row.K_quad);
    } catch (const NumericalError&) {
      rep.agreement_passed = false;
    }
    if (!(row.rel_err <= opts.agreement_tol)) rep.agreement_passed = false;
    if (std::isfinite(row.rel_err)) rep.max_rel_err = std::max(rep.max_rel_err, row.rel_err);
    if (!(row.K_closed > 0.0)) ++rep.nonpositive;
    if (row.K_closed > row.bound) ++rep.bound_violations;
    if (row.K_closed > 2.0 * row.bound) ++rep.wide_bound_violations;
    rep.worst_bound_ratio = std::max(rep.worst_bound_ratio, row.K_closed / row.bound);
    rep.rows.push_back(row);
  }
  rep.bound_passed = rep.nonpositive == 0 && rep.bound_violations == 0;

  // Pairs at prescribed sigma: x uniform in D, direction uniform, distance
  // solved from sigma^2 = d^2 / (4 r r').
  std::uniform_real_distribution<double> ulog(std::log(opts.remainder_sigma_min),
                                              std::log(opts.remainder_sigma_max));
  std::uniform_real_distribution<double> uphi(0.0, 2.0 * std::numbers::pi);
  std::size_t taken = 0, attempts = 0;
  const std::size_t max_attempts = 1000 * opts.remainder_fine;
  while (taken < opts.remainder_fine && attempts++ < max_attempts) {
    const double r = ur(rng), z = uz(rng);
    const double s = std::exp(ulog(rng)), phi = uphi(rng);
    const double c = std::cos(phi);
    const double dist = 2.0 * s * s * r * c + std::sqrt(4.0 * std::pow(s, 4) * r * r * c * c + 4.0 * s * s * r * r);
    const double rp = r + dist * c, zp = z + dist * std::sin(phi);
    if (rp <= d.r_min || rp >= d.r_max || zp <= d.z_min || zp >= d.z_max) continue;
    const double l = std::abs(expansion_remainder(r, z, rp, zp));
    ++taken;
    if (taken <= opts.remainder_coarse) rep.remainder_sup_coarse = std::max(rep.remainder_sup_coarse, l);
    rep.remainder_sup_fine = std::max(rep.remainder_sup_fine, l);
  }
  rep.remainder_limit = expansion_remainder_limit();
  rep.remainder_passed = taken == opts.remainder_fine && std::isfinite(rep.remainder_sup_fine) &&
                         rep.remainder_sup_fine <= opts.remainder_growth * rep.remainder_sup_coarse;
  rep.seconds = seconds_since(t0);
  return rep;
}

std::string GreensReport::csv() const {
  std::ostringstream os;
  os << "r,z,rp,zp,sigma,K_quad,K_closed,rel_err,bound\n";
  for (const auto& w : rows)
    os << format_number(w.r) << ',' << format_number(w.z) << ',' << format_number(w.rp) << ','
       << format_number(w.zp) << ',' << format_number(w.sigma) << ',' << format_number(w.K_quad) << ','
       << format_number(w.K_closed) << ',' << format_number(w.rel_err) << ',' << format_number(w.bound)
       << '\n';
  return os.str();
}

json GreensReport::summary() const {
  return {{"pairs", rows.size()},
          {"max_rel_err", max_rel_err},
          {"agreement_passed", agreement_passed},
          {"nonpositive", nonpositive},
          {"bound_violations", bound_violations},
          {"worst_bound_ratio", worst_bound_ratio},
          {"wide_bound_violations", wide_bound_violations},
          {"bound_passed", bound_passed},
          {"remainder_sup_coarse", remainder_sup_coarse},
          {"remainder_sup_fine", remainder_sup_fine},
          {"remainder_limit", remainder_limit},
          {"remainder_passed", remainder_passed},
          {"seconds", seconds},
          {"passed", passed()}};
}

// ---------------------------------------------------------------- bathtub

BathtubReport run_bathtub(const BathtubOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<std::size_t> un(1, opts.max_atoms);
  std::uniform_real_distribution<double> uw(0.1, 2.0), uh(-1.0, 3.0), u01(0.0, 1.0);
  std::uniform_int_distribution<int> ugrid(-2, 6);

  BathtubReport rep;
  rep.trials = opts.trials;
  auto note = [&](std::size_t trial, const std::string& what) {
    if (rep.failures.size() < 10) rep.failures.push_back("trial " + std::to_string(trial) + ": " + what);
  };
  for (std::size_t trial = 0; trial < opts.trials; ++trial) {
    MeasureSpace space;
    const std::size_t n = un(rng);
    const bool ties = trial % 2 == 1;  // values on a coarse lattice to force level sets
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double w = uw(rng);
      const double h = ties ? 0.5 * ugrid(rng) : uh(rng);
      space.atoms.push_back({w, h});
      total += w;
    }
    space.capacity = total * (0.02 + 0.96 * u01(rng));

    const BathtubSolution sol = bathtub_maximize(space);
    const oracle::BathtubVertexOptimum ref = oracle::bathtub_vertex_search(space);
    const double scale = std::max(1.0, std::abs(ref.value));
    const double err = std::abs(sol.value - ref.value) / scale;
    rep.max_value_error = std::max(rep.max_value_error, err);
    if (err > opts.tol) {
      ++rep.value_mismatches;
      note(trial, "value " + format_number(sol.value) + " vs " + format_number(ref.value));
    }
    if (sol.level != ref.level) {
      ++rep.level_mismatches;
      note(trial, "level " + format_number(sol.level) + " vs " + format_number(ref.level));
    }
    const double cut = std::max(0.0, sol.level);
    double used = 0.0, recomputed = 0.0;
    bool structure = true;
    for (std::size_t k = 0; k < n; ++k) {
      const double w = sol.omega[k];
      if (w < 0.0 || w > 1.0) structure = false;
      if (space.atoms[k].value > cut && w != 1.0) structure = false;
      if (space.atoms[k].value < cut && w != 0.0) structure = false;
      used += space.atoms[k].weight * w;
      recomputed += space.atoms[k].weight * space.atoms[k].value * w;
    }
    if (std::abs(recomputed - sol.value) > opts.tol * scale) structure = false;
    if (!structure) {
      ++rep.structure_failures;
      note(trial, "fill structure");
    }
    const double cap_tol = opts.tol * std::max(1.0, space.capacity);
    if (used > space.capacity + cap_tol || (sol.level > 0.0 && std::abs(used - space.capacity) > cap_tol)) {
      ++rep.capacity_failures;
      note(trial, "capacity used " + format_number(used) + " of " + format_number(space.capacity));
    }
    MeasureSpace larger = space;
    larger.capacity = space.capacity + (total - space.capacity) * u01(rng);
    if (larger.capacity > space.capacity && larger.capacity < total &&
        bathtub_maximize(larger).value < sol.value - opts.tol * scale) {
      ++rep.monotonicity_failures;
      note(trial, "value decreased with capacity");
    }
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

json BathtubReport::summary() const {
  return {{"trials", trials},
          {"value_mismatches", value_mismatches},
          {"level_mismatches", level_mismatches},
          {"structure_failures", structure_failures},
          {"capacity_failures", capacity_failures},
          {"monotonicity_failures", monotonicity_failures},
          {"max_value_error", max_value_error},
          {"failures", failures},
          {"seconds", seconds},
          {"passed", passed()}};
}

// ---------------------------------------------------------------- profiles

std::vector<GeneratorPair> profile_suite_generators() {
  return {GeneratorPair::power_law(1.0), GeneratorPair::power_law(2.0), GeneratorPair::turkington(1.0),
          GeneratorPair::beltrami(1.0),  GeneratorPair::beltrami(2.0),  GeneratorPair::mixed(1.0),
          GeneratorPair::mixed(2.0)};
}

ProfileFamilyReport check_generator(const GeneratorPair& gen, const ProfilesOptions& opts) {
  ProfileFamilyReport rep;
  rep.generator = gen.name();
  const double rs = opts.r_star;
  const std::vector<double> radii = {0.5 * rs, 0.75 * rs, rs, 1.5 * rs, 2.0 * rs};
  const std::vector<double> ss = {0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 20.0, 35.0, 50.0};
  std::vector<double> ts;
  for (double t = 1e-3; t <= 20.0; t *= 1.5) ts.push_back(t);

  for (double r : radii) {
    for (double s : ss) {
      const double J = eval_J(gen, r, s);
      const double Jn = eval_J_numeric(gen, r, s, bracket_conjugate(gen, r, s));
      rep.max_J_error = std::max(rep.max_J_error, std::abs(J - Jn) / (1.0 + std::abs(J)));
      if (s > gen.g0_plus() && s > 0.0) {
        const double back = eval_i(gen, r, eval_dJds(gen, r, s));
        rep.max_inverse_error = std::max(rep.max_inverse_error, std::abs(back - s) / std::max(1.0, s));
      }
    }
    for (double t : ts) {
      const double s = eval_i(gen, r, t);
      rep.max_inverse_error =
          std::max(rep.max_inverse_error, std::abs(eval_dJds(gen, r, s) - t) / std::max(1.0, t));
      const double gap = eval_I(gen, r, t) + eval_J(gen, r, s) - s * t;
      rep.max_fenchel_young_gap = std::max(rep.max_fenchel_young_gap, std::abs(gap) / std::max(1.0, s * t));
    }
  }

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> ur(0.5 * rs, 2.0 * rs), us(-5.0, 50.0), ut(0.0, 20.0);
  rep.min_fenchel_young_slack = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2000; ++k) {
    const double r = ur(rng), s = us(rng), t = ut(rng), s2 = us(rng);
    const double slack = (eval_I(gen, r, t) + eval_J(gen, r, s) - s * t) / std::max(1.0, std::abs(s * t));
    rep.min_fenchel_young_slack = std::min(rep.min_fenchel_young_slack, slack);
    const double avg = 0.5 * (eval_J(gen, r, s) + eval_J(gen, r, s2));
    const double mid = eval_J(gen, r, 0.5 * (s + s2));
    rep.max_convexity_violation = std::max(rep.max_convexity_violation, (mid - avg) / (1.0 + avg));
  }

  for (double t : ts) {
    const double H = eval_H(gen, t);
    const auto F = integrate_adaptive([&](double x) { return gen.f(x); }, {0.0, t}, 1e-13);
    rep.max_H_error = std::max(rep.max_H_error, std::abs(H * H - 2.0 * F.value) / std::max(1.0, 2.0 * F.value));
  }
  if (eval_H(gen, 0.0) != 0.0 || eval_H(gen, -1.0) != 0.0) rep.max_H_error = std::numeric_limits<double>::infinity();

  AssumptionSampleSpec sample;
  sample.d = 2.0 * rs;
  rep.assumptions = check_assumptions(gen, sample);

  rep.J_passed = rep.max_J_error <= 1e-6;
  rep.inverse_passed = rep.max_inverse_error <= 1e-8;
  rep.fenchel_young_passed = rep.max_fenchel_young_gap <= 1e-8 && rep.min_fenchel_young_slack >= -1e-12;
  rep.convexity_passed = rep.max_convexity_violation <= 1e-12;
  rep.H_passed = rep.max_H_error <= 1e-10;
  return rep;
}

json ProfileFamilyReport::summary() const {
  json checks = json::array();
  for (const auto& c : assumptions.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return {{"generator", generator},
          {"max_J_error", max_J_error},
          {"J_passed", J_passed},
          {"max_inverse_error", max_inverse_error},
          {"inverse_passed", inverse_passed},
          {"max_fenchel_young_gap", max_fenchel_young_gap},
          {"min_fenchel_young_slack", min_fenchel_young_slack},
          {"fenchel_young_passed", fenchel_young_passed},
          {"max_convexity_violation", max_convexity_violation},
          {"convexity_passed", convexity_passed},
          {"max_H_error", max_H_error},
          {"H_passed", H_passed},
          {"assumptions",
           {{"checks", checks},
            {"delta0", assumptions.delta0},
            {"delta1", assumptions.delta1},
            {"all_passed", assumptions.all_passed()},
            {"coverage_note", assumptions.coverage_note}}},
          {"passed", passed()}};
}

ProfilesReport run_profiles(const ProfilesOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  ProfilesReport rep;
  for (const auto& gen : profile_suite_generators()) rep.families.push_back(check_generator(gen, opts));
  rep.seconds = seconds_since(t0);
  return rep;
}

bool ProfilesReport::passed() const {
  return !families.empty() &&
         std::all_of(families.begin(), families.end(), [](const auto& f) { return f.passed(); });
}

json ProfilesReport::summary() const {
  json fams = json::array();
  for (const auto& f : families) fams.push_back(f.summary());
  return {{"families", fams}, {"seconds", seconds}, {"passed", passed()}};
}

// ---------------------------------------------------------------- cross operator

CrossOperatorReport run_cross_operator(std::size_t n_r, std::size_t n_z, double patch_radius,
                                       std::vector<double> box_factors) {
  const auto t0 = std::chrono::steady_clock::now();
  const double kappa = 4.0 * std::numbers::pi, W = 1.0, r_star = 1.0;
  const GridSpec g = build_grid(default_domain(kappa, W), n_r, n_z);
  ScalarField zeta(g, 0.0);
  for (std::size_t i = 0; i < g.n_r(); ++i)
    for (std::size_t j = 0; j < g.n_z(); ++j)
      if (std::hypot(g.r_center(i) - r_star, g.z_center(j)) < patch_radius) zeta(i, j) = 1.0;
  const ScalarField green = StreamOperator(g).apply(zeta);

  CrossOperatorReport rep;
  rep.box_factors = box_factors;
  for (double factor : box_factors) {
    const ScalarField fd = fd_solve(zeta, default_box(g, factor)).restrict_to(g);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < green.size(); ++k) {
      const double w = g.cell_volume(g.cell(k).i);
      num += (green[k] - fd[k]) * (green[k] - fd[k]) * w;
      den += green[k] * green[k] * w;
    }
    rep.rel_l2.push_back(std::sqrt(num / den));
  }
  rep.within_tolerance =
      std::all_of(rep.rel_l2.begin(), rep.rel_l2.end(), [](double e) { return e <= 0.05; });
  rep.decreasing = true;
  for (std::size_t k = 1; k < rep.rel_l2.size(); ++k)
    if (!(rep.rel_l2[k] < rep.rel_l2[k - 1])) rep.decreasing = false;
  rep.seconds = seconds_since(t0);
  return rep;
}

json CrossOperatorReport::summary() const {
  return {{"box_factors", box_factors},
          {"rel_l2", rel_l2},
          {"within_tolerance", within_tolerance},
          {"decreasing", decreasing},
          {"seconds", seconds},
          {"passed", passed()}};
}

}  // namespace vring::validation
