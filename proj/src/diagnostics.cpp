#include "vring/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

#include "vring/errors.hpp"

namespace vring {
namespace {

std::vector<char> support_mask(const ScalarField& zeta, double threshold_fraction) {
  const double thr = threshold_fraction * zeta.max();
  std::vector<char> mask(zeta.size(), 0);
  if (!(zeta.max() > 0.0)) return mask;
  for (std::size_t k = 0; k < zeta.size(); ++k) mask[k] = zeta[k] > thr ? 1 : 0;
  return mask;
}

// Bilinear interpolation of cell-centre values, zero outside the grid.
double sample_bilinear(const ScalarField& f, double r, double z) {
  const GridSpec& g = f.spec();
  const double u = (r - g.r_center(0)) / g.dr();
  const double v = (z - g.z_center(0)) / g.dz();
  const double fu = std::floor(u), fv = std::floor(v);
  const double a = u - fu, b = v - fv;
  const auto i0 = static_cast<long>(fu), j0 = static_cast<long>(fv);
  auto at = [&](long i, long j) {
    if (i < 0 || j < 0 || i >= static_cast<long>(g.n_r()) || j >= static_cast<long>(g.n_z()))
      return 0.0;
    return f(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  };
  return (1 - a) * (1 - b) * at(i0, j0) + a * (1 - b) * at(i0 + 1, j0) +
         (1 - a) * b * at(i0, j0 + 1) + a * b * at(i0 + 1, j0 + 1);
}

std::size_t count_components(const std::vector<char>& mask, std::size_t nr, std::size_t nz,
                             bool diagonal) {
  std::vector<char> seen(mask.size(), 0);
  std::size_t components = 0;
  std::queue<std::size_t> queue;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (!mask[start] || seen[start]) continue;
    ++components;
    seen[start] = 1;
    queue.push(start);
    while (!queue.empty()) {
      const std::size_t k = queue.front();
      queue.pop();
      const long i = static_cast<long>(k / nz), j = static_cast<long>(k % nz);
      for (long di = -1; di <= 1; ++di)
        for (long dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          if (!diagonal && di != 0 && dj != 0) continue;
          const long a = i + di, b = j + dj;
          if (a < 0 || b < 0 || a >= static_cast<long>(nr) || b >= static_cast<long>(nz)) continue;
          const std::size_t q = static_cast<std::size_t>(a) * nz + static_cast<std::size_t>(b);
          if (mask[q] && !seen[q]) {
            seen[q] = 1;
            queue.push(q);
          }
        }
    }
  }
  return components;
}

double derivative(const ScalarField& f, std::size_t i, std::size_t j, bool along_r) {
  const GridSpec& g = f.spec();
  const std::size_t n = along_r ? g.n_r() : g.n_z();
  const std::size_t k = along_r ? i : j;
  const double h = along_r ? g.dr() : g.dz();
  auto at = [&](std::size_t m) { return along_r ? f(m, j) : f(i, m); };
  if (n < 3) return n == 2 ? (at(1) - at(0)) / h : 0.0;
  if (k == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
  if (k == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
  return (at(k + 1) - at(k - 1)) / (2.0 * h);
}

}  // namespace

SupportStats support_stats(const ScalarField& zeta, double r_star, double threshold_fraction) {
  const GridSpec& g = zeta.spec();
  const auto mask = support_mask(zeta, threshold_fraction);
  std::vector<std::size_t> cells;
  for (std::size_t k = 0; k < mask.size(); ++k)
    if (mask[k]) cells.push_back(k);
  if (cells.empty()) throw DomainError("support is empty");

  SupportStats s;
  s.cells = cells.size();
  s.planar_area = static_cast<double>(cells.size()) * g.cell_area();

  // Row nearest z = 0 that meets the support; the upper row wins a tie.
  std::vector<std::size_t> rows(g.n_z());
  for (std::size_t j = 0; j < g.n_z(); ++j) rows[j] = j;
  std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
    const double za = std::abs(g.z_center(a)), zb = std::abs(g.z_center(b));
    if (za != zb) return za < zb;
    return g.z_center(a) > g.z_center(b);
  });
  for (std::size_t j : rows) {
    bool any = false;
    for (std::size_t i = 0; i < g.n_r(); ++i) {
      if (!mask[g.flat(i, j)]) continue;
      const double r = g.r_center(i);
      if (!any) {
        s.theta_minus = s.theta_plus = r;
        any = true;
      }
      s.theta_minus = std::min(s.theta_minus, r);
      s.theta_plus = std::max(s.theta_plus, r);
    }
    if (any) break;
  }

  double d2 = 0.0;
  for (std::size_t a = 0; a < cells.size(); ++a) {
    const CellIndex ca = g.cell(cells[a]);
    const double ra = g.r_center(ca.i), za = g.z_center(ca.j);
    s.dist_to_ring = std::max(s.dist_to_ring, std::hypot(ra - r_star, za));
    for (std::size_t b = a + 1; b < cells.size(); ++b) {
      const CellIndex cb = g.cell(cells[b]);
      const double dr = ra - g.r_center(cb.i), dz = za - g.z_center(cb.j);
      d2 = std::max(d2, dr * dr + dz * dz);
    }
  }
  s.diam = std::sqrt(d2);
  return s;
}

double core_radius(const SupportStats& stats) {
  return std::sqrt(stats.planar_area / std::numbers::pi);
}

Point2 center_of_vorticity(const ScalarField& zeta) {
  const GridSpec& g = zeta.spec();
  double mass = 0.0, mr = 0.0, mz = 0.0;
  for (std::size_t i = 0; i < g.n_r(); ++i) {
    double column = 0.0;
    for (std::size_t j = 0; j < g.n_z(); ++j) column += zeta(i, j);
    mass += column;
    mr += column * g.r_center(i);
  }
  if (!(mass > 0.0)) throw DomainError("center of vorticity of a zero field");
  if (g.symmetric_in_z()) {
    // Mirrored pairs, so an even field gives exactly zero.
    for (std::size_t i = 0; i < g.n_r(); ++i)
      for (std::size_t j = g.n_z() / 2; j < g.n_z(); ++j)
        mz += g.z_center(j) * (zeta(i, j) - zeta(i, g.mirror_j(j)));
  } else {
    for (std::size_t i = 0; i < g.n_r(); ++i)
      for (std::size_t j = 0; j < g.n_z(); ++j) mz += g.z_center(j) * zeta(i, j);
  }
  return {mr / mass, mz / mass};
}

ScaledProfile scaled_profile(const ScalarField& zeta, Point2 center, double epsilon,
                             double window, std::size_t samples, double threshold_fraction) {
  if (!(epsilon > 0.0) || !(window > 0.0) || samples < 3)
    throw ConfigError("scaled profile needs epsilon > 0, window > 0 and >= 3 samples");
  const GridSpec& g = zeta.spec();
  const auto mask = support_mask(zeta, threshold_fraction);
  double reach = 0.0;
  double planar = 0.0;
  for (std::size_t k = 0; k < mask.size(); ++k) {
    planar += zeta[k];
    if (!mask[k]) continue;
    const CellIndex c = g.cell(k);
    reach = std::max({reach, (std::abs(g.r_center(c.i) - center.r) + 0.5 * g.dr()) / epsilon,
                      (std::abs(g.z_center(c.j) - center.z) + 0.5 * g.dz()) / epsilon});
  }
  if (reach > window) throw DomainError("scaled-profile window clips the support");

  const double eps2 = epsilon * epsilon;
  ScaledProfile out;
  out.samples = samples;
  out.window = window;
  out.planar_mass = planar * g.cell_area();
  out.phi.resize(samples * samples);
  for (std::size_t a = 0; a < samples; ++a)
    for (std::size_t b = 0; b < samples; ++b)
      out.phi[a * samples + b] =
          eps2 * sample_bilinear(zeta, center.r + epsilon * out.coordinate(a),
                                 center.z + epsilon * out.coordinate(b));

  // Rings about the origin of the scaled window.
  const std::size_t rings = samples / 2;
  const std::size_t angles = 64;
  double dev2 = 0.0, tot2 = 0.0, peak = 0.0;
  out.radial_mean.assign(rings, 0.0);
  std::vector<double> ring(angles);
  for (std::size_t k = 0; k < rings; ++k) {
    const double rho = (static_cast<double>(k) + 0.5) * window / static_cast<double>(rings);
    double mean = 0.0;
    for (std::size_t m = 0; m < angles; ++m) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(m) / angles;
      ring[m] = eps2 * sample_bilinear(zeta, center.r + epsilon * rho * std::cos(th),
                                       center.z + epsilon * rho * std::sin(th));
      mean += ring[m];
    }
    mean /= angles;
    out.radial_mean[k] = mean;
    peak = std::max(peak, mean);
    for (double v : ring) {
      dev2 += rho * (v - mean) * (v - mean);
      tot2 += rho * v * v;
    }
  }
  out.angular_variation = tot2 > 0.0 ? std::sqrt(dev2 / tot2) : 0.0;
  out.radially_nonincreasing = true;
  for (std::size_t k = 1; k < rings; ++k)
    if (out.radial_mean[k] > out.radial_mean[k - 1] + 0.05 * peak) out.radially_nonincreasing = false;
  return out;
}

bool topology_check(const ScalarField& zeta, double threshold_fraction) {
  const GridSpec& g = zeta.spec();
  const auto mask = support_mask(zeta, threshold_fraction);
  std::size_t i_lo = g.n_r(), i_hi = 0, j_lo = g.n_z(), j_hi = 0;
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (!mask[k]) continue;
    const CellIndex c = g.cell(k);
    i_lo = std::min(i_lo, c.i);
    i_hi = std::max(i_hi, c.i);
    j_lo = std::min(j_lo, c.j);
    j_hi = std::max(j_hi, c.j);
  }
  if (i_lo > i_hi) return false;
  if (count_components(mask, g.n_r(), g.n_z(), false) != 1) return false;

  // Complement within the bounding box padded by one cell on every side.
  const std::size_t nr = i_hi - i_lo + 3, nz = j_hi - j_lo + 3;
  std::vector<char> outside(nr * nz, 1);
  for (std::size_t a = 1; a + 1 < nr; ++a)
    for (std::size_t b = 1; b + 1 < nz; ++b)
      outside[a * nz + b] = mask[g.flat(i_lo + a - 1, j_lo + b - 1)] ? 0 : 1;
  return count_components(outside, nr, nz, true) == 1;
}

VelocityField velocity_field(const ScalarField& psi, const GeneratorPair& gen, double epsilon) {
  const GridSpec& g = psi.spec();
  VelocityField v{ScalarField(g, 0.0), ScalarField(g, 0.0), ScalarField(g, 0.0)};
  for (std::size_t i = 0; i < g.n_r(); ++i) {
    const double r = g.r_center(i);
    for (std::size_t j = 0; j < g.n_z(); ++j) {
      v.v_r(i, j) = -derivative(psi, i, j, false) / r;
      v.v_z(i, j) = derivative(psi, i, j, true) / r;
      v.v_theta(i, j) = eval_H(gen, psi(i, j)) / (epsilon * r);
    }
  }
  return v;
}

FarFieldProbe probe_far_field(const ProblemConfig& cfg, const SolveResult& result,
                              const FdSolution& fd, const SupportStats& support) {
  const GridSpec& box = fd.psi.spec();
  const GridSpec& d = result.state.zeta.spec();
  const Point2 c = center_of_vorticity(result.state.zeta);
  // Top of the support above the centre column.
  double z_top = c.z;
  for (std::size_t k = 0; k < result.state.zeta.size(); ++k)
    if (result.state.zeta[k] > kDefaultSupportThreshold * result.state.zeta.max())
      z_top = std::max(z_top, d.z_center(d.cell(k).j));
  const double gap = std::max(10.0 * support.diam, 5.0 * cfg.r_star());

  auto nearest = [](double x, double x0, double h, std::size_t n) {
    const double u = std::round((x - x0) / h);
    return static_cast<std::size_t>(std::clamp(u, 1.0, static_cast<double>(n) - 2.0));
  };
  const std::size_t i = nearest(c.r, box.r_center(0), box.dr(), box.n_r());
  std::size_t j = nearest(z_top + gap, box.z_center(0), box.dz(), box.n_z());
  while (j + 2 < box.n_z() && box.z_center(j) - z_top < gap) ++j;

  FarFieldProbe p;
  p.r = box.r_center(i);
  p.z = box.z_center(j);
  p.distance = p.z - z_top;
  // psi = psi0 - (W r^2 / 2) log(1/eps) - mu, so v_z = psi0_r / r - W log(1/eps).
  const double dpsi0 = (fd.psi(i + 1, j) - fd.psi(i - 1, j)) / (2.0 * box.dr());
  p.expected = -cfg.W * cfg.log_inv_eps();
  p.v_z = dpsi0 / p.r + p.expected;
  p.rel_error = std::abs(p.v_z - p.expected) / std::abs(p.expected);
  return p;
}

AxisProbe probe_axis(const FdSolution& fd, const GridSpec& domain) {
  const GridSpec& box = fd.psi.spec();
  // Node row at the z-centre of D.
  const std::size_t j = fd.j_offset + domain.n_z() / 2;
  AxisProbe a;
  for (std::size_t i = 0; i <= fd.i_offset; ++i) {
    const double r = box.r_center(i);
    a.r.push_back(r);
    a.ratio.push_back(std::abs(fd.psi(i, j)) / (r * r));
  }
  const double reference = a.ratio.back();
  const double peak = *std::max_element(a.ratio.begin(), a.ratio.end());
  a.bounded = std::isfinite(peak) && peak <= 2.0 * reference;
  return a;
}

DiagnosticsRecord diagnose(const ProblemConfig& cfg, const GeneratorPair& gen,
                           const SolveResult& result, const DiagnosticsOptions& options) {
  const ScalarField& zeta = result.state.zeta;
  const ScalarField& psi = result.state.psi;
  const GridSpec& g = zeta.spec();
  DiagnosticsRecord rec;
  rec.support = support_stats(zeta, cfg.r_star(), options.threshold_fraction);
  rec.center = center_of_vorticity(zeta);
  rec.mu = result.state.mu;
  rec.energy = result.state.energy;
  rec.mass = integrate_nu(zeta);
  rec.simply_connected = topology_check(zeta, options.threshold_fraction);
  rec.core_radius = core_radius(rec.support);

  const auto mask = support_mask(zeta, options.threshold_fraction);
  rec.support_interior = true;
  rec.psi_negative_on_boundary = true;
  double scale = 0.0;
  for (double v : psi.values()) scale = std::max(scale, std::abs(v));
  std::size_t argmax = 0;
  for (std::size_t k = 0; k < psi.size(); ++k) {
    if (psi[k] > psi[argmax]) argmax = k;
    const CellIndex c = g.cell(k);
    const bool edge = c.i == 0 || c.j == 0 || c.i + 1 == g.n_r() || c.j + 1 == g.n_z();
    if (!edge) continue;
    if (mask[k]) rec.support_interior = false;
    if (!(psi[k] < 0.0)) rec.psi_negative_on_boundary = false;
  }
  rec.psi_max_in_support = mask[argmax] != 0;

  rec.dz_psi_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.n_r(); ++i)
    for (std::size_t j = 0; j < g.n_z(); ++j)
      if (g.z_center(j) > 0.0)
        rec.dz_psi_max = std::max(rec.dz_psi_max, derivative(psi, i, j, false) / scale);

  const VelocityField vel = velocity_field(psi, gen, cfg.epsilon);
  rec.swirl_max = vel.v_theta.max();
  if (gen.swirl_free()) {
    rec.swirl_on_core = rec.swirl_max == 0.0;
  } else {
    rec.swirl_on_core = true;
    for (std::size_t k = 0; k < psi.size(); ++k) {
      // Threshold ties (|psi| at rounding level) may fall either way.
      if ((vel.v_theta[k] > 0.0) != (mask[k] != 0) && std::abs(psi[k]) > 1e-10 * scale)
        rec.swirl_on_core = false;
    }
  }

  if (options.far_field) {
    const FdSolution fd = fd_solve(zeta, default_box(g, options.box_factor));
    rec.far_field = probe_far_field(cfg, result, fd, rec.support);
    rec.axis = probe_axis(fd, g);
  }
  return rec;
}

SweepPoint make_sweep_point(const ProblemConfig& cfg, const SolveResult& result,
                            const DiagnosticsRecord& record) {
  SweepPoint p;
  p.epsilon = cfg.epsilon;
  p.mu = result.state.mu;
  p.E = result.state.energy;
  p.R_center = record.center.r;
  p.theta_minus = record.support.theta_minus;
  p.theta_plus = record.support.theta_plus;
  p.diam = record.support.diam;
  p.dist_to_ring = record.support.dist_to_ring;
  p.mass = record.mass;
  p.kkt_residual = result.kkt_residual;
  p.patch_measure = result.patch_measure;
  p.simply_connected = record.simply_connected;
  p.far_vz = record.far_field.v_z;
  p.core_radius = record.core_radius;
  p.status = result.converged ? "converged" : "not_converged";
  return p;
}

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("least squares needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0) throw ConfigError("least squares needs distinct abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

AsymptoticFit asymptotic_fit(std::span<const SweepPoint> points, double kappa, double W) {
  std::vector<double> eps;
  for (const auto& p : points) eps.push_back(p.epsilon);
  std::sort(eps.begin(), eps.end());
  if (std::unique(eps.begin(), eps.end()) - eps.begin() < 3)
    throw ConfigError("asymptotic fit needs at least 3 distinct epsilon values");
  std::vector<double> x, mu, E;
  for (const auto& p : points) {
    x.push_back(std::log(1.0 / p.epsilon));
    mu.push_back(p.mu);
    E.push_back(p.E);
  }
  const LineFit fm = least_squares(x, mu);
  const LineFit fe = least_squares(x, E);
  AsymptoticFit f;
  f.points = points.size();
  f.slope_mu = fm.slope;
  f.intercept_mu = fm.intercept;
  f.r_squared_mu = fm.r_squared;
  f.slope_E = fe.slope;
  f.intercept_E = fe.intercept;
  f.r_squared_E = fe.r_squared;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  f.predicted_slope_mu = 3.0 * kappa * kappa / (32.0 * pi2 * W);
  f.predicted_slope_E = kappa * kappa * kappa / (32.0 * pi2 * W);
  f.rel_error_mu = std::abs(f.slope_mu - f.predicted_slope_mu) / f.predicted_slope_mu;
  f.rel_error_E = std::abs(f.slope_E - f.predicted_slope_E) / f.predicted_slope_E;
  return f;
}

KelvinHicksReport kelvin_hicks_check(std::span<const SweepPoint> points, double kappa, double W) {
  KelvinHicksReport rep;
  if (points.empty()) return rep;
  const double rs = kappa / (4.0 * std::numbers::pi * W);
  for (const auto& p : points) {
    const double ring_speed = kappa / (4.0 * std::numbers::pi * rs) *
                              (std::log(8.0 * rs / p.core_radius) - 0.25);
    rep.differences.push_back(W * std::log(1.0 / p.epsilon) - ring_speed);
    rep.core_ratio.push_back(p.core_radius / p.epsilon);
  }
  const auto [dlo, dhi] = std::minmax_element(rep.differences.begin(), rep.differences.end());
  rep.spread = *dhi - *dlo;
  rep.bounded = rep.spread <= 0.25 * W;
  const auto [clo, chi] = std::minmax_element(rep.core_ratio.begin(), rep.core_ratio.end());
  rep.core_ratio_factor = *chi / *clo;
  return rep;
}

}  // namespace vring
