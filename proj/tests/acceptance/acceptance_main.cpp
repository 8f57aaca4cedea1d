// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "vring/config_io.hpp"
#include "vring/diagnostics.hpp"
#include "vring/oracles.hpp"
#include "vring/rearrange.hpp"
#include "vring/solver.hpp"
#include "vring/validation.hpp"

using namespace vring;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

int failures = 0;

void verdict(int id, bool pass, const std::string& summary) {
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", summary.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void detail(const std::string& text) {
  std::printf("    %s\n", text.c_str());
  std::fflush(stdout);
}

const std::vector<double> kSweep = {0.2, 0.1, 0.05, 0.025};

struct Run {
  ProblemConfig cfg;
  SolveResult result;
  DiagnosticsRecord diag;
  SweepPoint point;
  ScaledProfile profile;
  bool profile_ok = false;
  std::string profile_error;
};

struct Sweep {
  std::string label;
  GeneratorPair gen;
  std::vector<Run> runs;
  double seconds = 0.0;
};

Sweep run_sweep(const std::string& label, const GeneratorPair& gen, const StreamOperator& op) {
  Sweep sw{label, gen, {}, 0.0};
  const auto t0 = Clock::now();
  for (double eps : kSweep) {
    Run run_;
    run_.cfg.epsilon = eps;
    run_.result = run(run_.cfg, gen, op);
    run_.diag = diagnose(run_.cfg, gen, run_.result);
    run_.point = make_sweep_point(run_.cfg, run_.result, run_.diag);
    try {
      run_.profile = scaled_profile(run_.result.state.zeta, run_.diag.center, eps,
                                    2.0 * run_.diag.support.diam / eps);
      run_.profile_ok = true;
    } catch (const std::exception& e) {
      run_.profile_error = e.what();
    }
    detail(label + " eps=" + num(eps) + ": converged=" + (run_.result.converged ? "yes" : "no") +
           " iterations=" + std::to_string(run_.result.state.iteration) + " mu=" + num(run_.result.state.mu, 6) +
           " E=" + num(run_.result.state.energy, 6) + " R=" + num(run_.diag.center.r, 5));
    sw.runs.push_back(std::move(run_));
  }
  sw.seconds = since(t0);
  return sw;
}

std::vector<SweepPoint> points(const Sweep& sw) {
  std::vector<SweepPoint> out;
  for (const auto& r : sw.runs) out.push_back(r.point);
  return out;
}

bool solver_invariants(const Sweep& sw) {
  bool pass = sw.seconds <= 20.0 * 60.0;
  for (const auto& r : sw.runs) {
    const auto& res = r.result;
    const double kappa = r.cfg.kappa;
    const double mass_err = std::abs(integrate_nu(res.state.zeta) - kappa) / kappa;
    bool monotone = true;
    for (std::size_t k = 1; k < res.energy_trace.size(); ++k)
      if (res.energy_trace[k] < res.energy_trace[k - 1] - 1e-9 * std::abs(res.energy_trace[k - 1])) monotone = false;
    const bool sym = is_even_in_z(res.state.zeta) && is_steiner_symmetric(res.state.zeta);
    const bool ok = res.converged && mass_err <= 1e-8 && monotone && res.kkt_residual <= 1e-3 &&
                    res.patch_measure == 0.0 && r.diag.support_interior && sym;
    pass = pass && ok;
    detail(sw.label + " eps=" + num(r.cfg.epsilon) + ": converged=" + (res.converged ? "yes" : "no") +
           " mass_err=" + num(mass_err, 3) + " monotone=" + (monotone ? "yes" : "no") +
           " kkt=" + num(res.kkt_residual, 3) + " patch=" + num(res.patch_measure, 3) +
           " interior=" + (r.diag.support_interior ? "yes" : "no") + " symmetric=" + (sym ? "yes" : "no") +
           (ok ? "" : "  <- fails"));
  }
  detail(sw.label + " sweep wall clock " + num(sw.seconds, 4) + " s (limit 1200 s)");
  return pass;
}

bool localization(const Sweep& sw) {
  const auto& last = sw.runs.back().diag;
  const double dev = std::abs(last.center.r - 1.0);
  bool r_decreasing = true, dist_decreasing = true;
  double ratio_min = INFINITY, ratio_max = 0.0;
  for (std::size_t k = 0; k < sw.runs.size(); ++k) {
    const auto& d = sw.runs[k].diag;
    const double ratio = d.support.diam / sw.runs[k].cfg.epsilon;
    ratio_min = std::min(ratio_min, ratio);
    ratio_max = std::max(ratio_max, ratio);
    if (k > 0) {
      const auto& p = sw.runs[k - 1].diag;
      if (std::abs(d.center.r - 1.0) > std::abs(p.center.r - 1.0)) r_decreasing = false;
      if (d.support.dist_to_ring > p.support.dist_to_ring + 1e-6) dist_decreasing = false;
    }
  }
  const bool band = ratio_max <= 2.0 * ratio_min;
  std::string rs, ths, ds;
  for (const auto& r : sw.runs) {
    rs += " " + num(r.diag.center.r, 4);
    ths += " [" + num(r.diag.support.theta_minus, 4) + "," + num(r.diag.support.theta_plus, 4) + "]";
    ds += " " + num(r.diag.support.dist_to_ring, 4);
  }
  detail(sw.label + ": R =" + rs + "  |R-1| at eps=0.025: " + num(dev, 4) + " (limit 0.15), |R-1| decreasing=" +
         (r_decreasing ? "yes" : "no"));
  detail(sw.label + ": theta =" + ths);
  detail(sw.label + ": dist_to_ring =" + ds + " decreasing=" + (dist_decreasing ? "yes" : "no") +
         "; diam/eps in [" + num(ratio_min, 4) + ", " + num(ratio_max, 4) + "]" + (band ? " within" : " outside") +
         " factor 2");
  return dev <= 0.15 && r_decreasing && dist_decreasing && band;
}

bool slopes(const Sweep& sw) {
  const auto pts = points(sw);
  const auto fit = asymptotic_fit(pts, pts.empty() ? 0.0 : sw.runs[0].cfg.kappa, sw.runs[0].cfg.W);
  std::vector<double> x, mu, E;
  for (const auto& p : pts) {
    x.push_back(std::log(1.0 / p.epsilon));
    mu.push_back(p.mu);
    E.push_back(p.E);
  }
  const double kappa = sw.runs[0].cfg.kappa, W = sw.runs[0].cfg.W;
  const double pred_mu = 3.0 * kappa * kappa / (32.0 * std::numbers::pi * std::numbers::pi * W);
  const double pred_E = kappa * kappa * kappa / (32.0 * std::numbers::pi * std::numbers::pi * W);
  const double ref_mu = oracle::fit_line(x, mu).slope, ref_E = oracle::fit_line(x, E).slope;
  const bool fit_consistent = std::abs(ref_mu - fit.slope_mu) <= 1e-10 * std::abs(ref_mu) &&
                              std::abs(ref_E - fit.slope_E) <= 1e-10 * std::abs(ref_E) &&
                              std::abs(pred_mu - fit.predicted_slope_mu) <= 1e-12 * pred_mu &&
                              std::abs(pred_E - fit.predicted_slope_E) <= 1e-12 * pred_E;
  const double err_mu = std::abs(ref_mu - pred_mu) / pred_mu, err_E = std::abs(ref_E - pred_E) / pred_E;
  detail(sw.label + ": slope mu " + num(ref_mu, 5) + " vs " + num(pred_mu, 5) + " (rel err " + num(err_mu, 3) +
         "), slope E " + num(ref_E, 5) + " vs " + num(pred_E, 5) + " (rel err " + num(err_E, 3) + ")" +
         (fit_consistent ? "" : "  library fit disagrees with oracle fit"));
  return fit_consistent && err_mu <= 0.2 && err_E <= 0.2;
}

}  // namespace

int main() {
  const auto start = Clock::now();

  {
    const auto rep = validation::run_greens();
    const bool pass = rep.passed() && rep.seconds <= 30.0;
    verdict(1, pass,
            "kernel agreement max rel err " + num(rep.max_rel_err, 3) + " (limit 1e-10), bound violations " +
                std::to_string(rep.bound_violations) + "/" + std::to_string(rep.rows.size()) +
                ", remainder sup fine/coarse " + num(rep.remainder_sup_fine / rep.remainder_sup_coarse, 6) +
                " (limit 1.05), " + num(rep.seconds, 3) + " s");
    detail("positivity failures " + std::to_string(rep.nonpositive) + ", worst K/bound " +
           num(rep.worst_bound_ratio, 5) + ", violations with 1/(2 pi) in place of 1/(4 pi): " +
           std::to_string(rep.wide_bound_violations));
  }

  {
    const auto rep = validation::run_cross_operator();
    const bool pass = rep.passed() && rep.seconds <= 120.0;
    std::string errs;
    for (std::size_t k = 0; k < rep.rel_l2.size(); ++k)
      errs += " " + num(rep.box_factors[k]) + "x:" + num(rep.rel_l2[k], 4);
    verdict(2, pass, "Green summation vs finite differences, rel L2 by box margin" + errs + " (limit 0.05, decreasing), " +
                         num(rep.seconds, 3) + " s");
  }

  {
    const auto rep = validation::run_bathtub();
    const bool pass = rep.passed() && rep.seconds <= 5.0;
    verdict(3, pass, std::to_string(rep.trials) + " instances, value mismatches " +
                         std::to_string(rep.value_mismatches) + ", max value err " + num(rep.max_value_error, 3) +
                         ", level/structure/capacity failures " + std::to_string(rep.level_mismatches) + "/" +
                         std::to_string(rep.structure_failures) + "/" + std::to_string(rep.capacity_failures) + ", " +
                         num(rep.seconds, 3) + " s");
  }

  {
    const auto rep = validation::run_profiles();
    const bool pass = rep.passed() && rep.seconds <= 30.0;
    double j = 0, inv = 0, fy = 0;
    for (const auto& f : rep.families) {
      j = std::max(j, f.max_J_error);
      inv = std::max(inv, f.max_inverse_error);
      fy = std::max(fy, f.max_fenchel_young_gap);
      if (!f.passed()) detail(f.generator + " fails");
    }
    verdict(4, pass, std::to_string(rep.families.size()) + " generators, max J err " + num(j, 3) +
                         " (limit 1e-6), inverse err " + num(inv, 3) + " (limit 1e-8), Fenchel-Young gap " + num(fy, 3) +
                         " (limit 1e-8), assumptions " + (rep.passed() ? "all pass" : "see above") + ", " +
                         num(rep.seconds, 3) + " s");
  }

  const ProblemConfig base;
  const StreamOperator op(base.grid());
  detail("solving sweeps eps = 0.2, 0.1, 0.05, 0.025 on " + std::to_string(base.n_r) + "x" +
         std::to_string(base.n_z));
  const Sweep power = run_sweep("power_law(1)", GeneratorPair::power_law(1.0), op);
  const Sweep turk = run_sweep("turkington(1)", GeneratorPair::turkington(1.0), op);

  {
    const bool a = solver_invariants(power), b = solver_invariants(turk);
    verdict(5, a && b, std::string("solver invariants: power_law(1) ") + (a ? "pass" : "fail") + ", turkington(1) " +
                           (b ? "pass" : "fail"));
  }
  {
    const bool a = localization(power), b = localization(turk);
    verdict(6, a && b, std::string("localization: power_law(1) ") + (a ? "pass" : "fail") + ", turkington(1) " +
                           (b ? "pass" : "fail"));
  }
  {
    const bool a = slopes(power), b = slopes(turk);
    verdict(7, a && b, std::string("asymptotic slopes within 20%: power_law(1) ") + (a ? "pass" : "fail") +
                           ", turkington(1) " + (b ? "pass" : "fail"));
  }

  {
    bool topo = true;
    for (const Sweep* sw : {&power, &turk})
      for (const auto& r : sw->runs)
        if (r.result.converged && !r.diag.simply_connected) {
          topo = false;
          detail(sw->label + " eps=" + num(r.cfg.epsilon) + ": support is not a disc");
        }
    const Run& last = power.runs.back();
    const double target = 4.0 * std::numbers::pi * base.W;
    const double mass_err = last.profile_ok ? std::abs(last.profile.planar_mass - target) / target : INFINITY;
    const double ang = last.profile_ok ? last.profile.angular_variation : INFINITY;
    if (!last.profile_ok) detail("scaled profile failed: " + last.profile_error);
    for (const Sweep* sw : {&power, &turk}) {
      std::string s;
      for (const auto& r : sw->runs)
        s += " " + (r.profile_ok ? num(r.profile.planar_mass, 4) + "/" + num(r.profile.angular_variation, 3) : "n/a");
      detail(sw->label + " planar mass / angular variation by eps:" + s);
    }
    verdict(8, topo && mass_err <= 0.1 && ang <= 0.05,
            std::string("topology ") + (topo ? "disc on every converged run" : "fails") +
                "; planar mass at eps=0.025 " + num(last.profile_ok ? last.profile.planar_mass : NAN, 5) +
                " vs 4 pi W = " + num(target, 5) + " (rel err " + num(mass_err, 3) +
                ", limit 0.1); angular variation " + num(ang, 3) + " (limit 0.05)");
  }

  {
    bool far = true, axis = true;
    double worst = 0.0;
    for (const Sweep* sw : {&power, &turk})
      for (const auto& r : sw->runs) {
        const auto& ff = r.diag.far_field;
        worst = std::max(worst, ff.rel_error);
        if (!(ff.rel_error <= 0.1 && ff.distance >= 10.0 * r.diag.support.diam)) far = false;
        if (!r.diag.axis.bounded) axis = false;
      }
    bool no_swirl = true, on_core = true;
    for (const auto& r : power.runs)
      if (r.diag.swirl_max != 0.0) no_swirl = false;
    for (const auto& r : turk.runs)
      if (!r.diag.swirl_on_core || !(r.diag.swirl_max > 0.0)) on_core = false;
    verdict(9, far && axis && no_swirl && on_core,
            "far-field v_z worst rel err " + num(worst, 3) + " (limit 0.1, probe >= 10 diam)" +
                ", psi/r^2 bounded at axis " + (axis ? "yes" : "no") + ", no swirl for f = 0 " +
                (no_swirl ? "yes" : "no") + ", turkington swirl exactly on core " + (on_core ? "yes" : "no"));
  }

  {
    const auto a = kelvin_hicks_check(points(power), base.kappa, base.W);
    const auto b = kelvin_hicks_check(points(turk), base.kappa, base.W);
    const double limit = 0.25 * base.W;
    verdict(10, a.spread <= limit && b.spread <= limit,
            "Kelvin-Hicks difference spread power_law(1) " + num(a.spread, 4) + ", turkington(1) " +
                num(b.spread, 4) + " (limit " + num(limit, 3) + ")");
  }

  std::printf("acceptance: %d of 10 criteria failed, %.1f s\n", failures, since(start));
  return failures == 0 ? 0 : 1;
}
