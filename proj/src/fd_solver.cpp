#include "vring/fd_solver.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "vring/errors.hpp"

namespace vring {
namespace {

std::mutex fftw_planner_mutex;

double diameter(const GridSpec& g) {
  return std::hypot(g.r_max() - g.r_min(), g.z_max() - g.z_min());
}

// In-place RODFT00 over `rows` contiguous rows of length n.
void sine_transform_rows(std::vector<double>& data, std::size_t rows, std::size_t n) {
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex);
    int len = static_cast<int>(n);
    fftw_r2r_kind kind = FFTW_RODFT00;
    plan = fftw_plan_many_r2r(1, &len, static_cast<int>(rows), data.data(), nullptr, 1, len,
                              data.data(), nullptr, 1, len, &kind, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw NumericalError("sine transform planning failed");
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(fftw_planner_mutex);
  fftw_destroy_plan(plan);
}

}  // namespace

ExtendedBox default_box(const GridSpec& domain, double margin_factor) {
  return {margin_factor * diameter(domain), domain.r_min() / 8.0};
}

ScalarField FdSolution::restrict_to(const GridSpec& domain) const {
  ScalarField out(domain, 0.0);
  for (std::size_t i = 0; i < domain.n_r(); ++i)
    for (std::size_t j = 0; j < domain.n_z(); ++j) out(i, j) = psi(i + i_offset, j + j_offset);
  return out;
}

FdSolution fd_solve(const ScalarField& zeta, const ExtendedBox& box) {
  const GridSpec& d = zeta.spec();
  if (!zeta.all_finite()) throw ConfigError("fd_solve: zeta has non-finite values");
  if (!(box.margin >= 3.0 * diameter(d) * (1.0 - 1e-12)))
    throw ConfigError("fd_solve: box margin must be at least 3 diam(D)");
  if (!(box.r_axis > 0.0) || !(box.r_axis < d.r_min()))
    throw ConfigError("fd_solve: axis offset must lie in (0, r_min)");

  const double dr = d.dr(), dz = d.dz();
  // Lattice offsets: unknown radial nodes are D centres shifted by integer
  // steps, from the first node above r_axis out to r_max + margin.
  auto lead = static_cast<std::size_t>(std::max(0.0, std::ceil((d.r_center(0) - box.r_axis) / dr) - 1.0));
  while (d.r_center(0) - static_cast<double>(lead) * dr <= box.r_axis) --lead;
  const auto extra_r = static_cast<std::size_t>(std::ceil(box.margin / dr));
  const auto extra_z = static_cast<std::size_t>(std::ceil(box.margin / dz));
  const std::size_t nr = lead + d.n_r() + extra_r;
  const std::size_t nz = d.n_z() + 2 * extra_z;

  const double r0 = d.r_center(0) - static_cast<double>(lead) * dr;  // first unknown node
  const double z0 = d.z_center(0) - static_cast<double>(extra_z) * dz;
  const GridSpec grid = build_grid({r0 - 0.5 * dr, r0 + (static_cast<double>(nr) - 0.5) * dr,
                                    z0 - 0.5 * dz, z0 + (static_cast<double>(nz) - 0.5) * dz},
                                   nr, nz);
  auto rnode = [&](double k) { return r0 + k * dr; };

  // Right-hand side r * zeta.
  std::vector<double> rhs(nr * nz, 0.0);
  double rhs_scale = 0.0;
  for (std::size_t i = 0; i < d.n_r(); ++i)
    for (std::size_t j = 0; j < d.n_z(); ++j) {
      const double v = d.r_center(i) * zeta(i, j);
      rhs[(i + lead) * nz + (j + extra_z)] = v;
      rhs_scale = std::max(rhs_scale, std::abs(v));
    }

  FdSolution sol;
  sol.i_offset = lead;
  sol.j_offset = extra_z;
  if (rhs_scale == 0.0) {
    sol.psi = ScalarField(grid, 0.0);
    return sol;
  }

  std::vector<double> work = rhs;
  sine_transform_rows(work, nr, nz);

  const double inv_dr2 = 1.0 / (dr * dr);
  std::vector<double> lower(nr), upper(nr), rk(nr);
  for (std::size_t k = 0; k < nr; ++k) {
    const double kk = static_cast<double>(k);
    lower[k] = inv_dr2 / rnode(kk - 0.5);
    upper[k] = inv_dr2 / rnode(kk + 0.5);
    rk[k] = rnode(kk);
  }
  std::vector<double> cprime(nr), dprime(nr);
  for (std::size_t m = 0; m < nz; ++m) {
    const double s = std::sin(0.5 * std::numbers::pi * static_cast<double>(m + 1) /
                              static_cast<double>(nz + 1));
    const double lambda = 4.0 * s * s / (dz * dz);
    // Thomas algorithm; the matrix is symmetric and diagonally dominant.
    for (std::size_t k = 0; k < nr; ++k) {
      const double diag = lower[k] + upper[k] + lambda / rk[k];
      const double sub = k > 0 ? -lower[k] : 0.0;
      const double denom = diag - (k > 0 ? sub * cprime[k - 1] : 0.0);
      cprime[k] = -upper[k] / denom;
      dprime[k] = (work[k * nz + m] - (k > 0 ? sub * dprime[k - 1] : 0.0)) / denom;
    }
    work[(nr - 1) * nz + m] = dprime[nr - 1];
    for (std::size_t k = nr - 1; k-- > 0;)
      work[k * nz + m] = dprime[k] - cprime[k] * work[(k + 1) * nz + m];
  }
  sine_transform_rows(work, nr, nz);
  const double norm = 1.0 / (2.0 * static_cast<double>(nz + 1));
  for (double& v : work) v *= norm;

  // Residual of the multiplied-through stencil.
  double res = 0.0;
  auto at = [&](std::ptrdiff_t k, std::ptrdiff_t j) {
    if (k < 0 || j < 0 || k >= static_cast<std::ptrdiff_t>(nr) || j >= static_cast<std::ptrdiff_t>(nz))
      return 0.0;
    return work[static_cast<std::size_t>(k) * nz + static_cast<std::size_t>(j)];
  };
  for (std::size_t k = 0; k < nr; ++k)
    for (std::size_t j = 0; j < nz; ++j) {
      const auto kk = static_cast<std::ptrdiff_t>(k), jj = static_cast<std::ptrdiff_t>(j);
      const double c = at(kk, jj);
      const double lr = -(upper[k] * (at(kk + 1, jj) - c) - lower[k] * (c - at(kk - 1, jj)));
      const double lz = -(at(kk, jj + 1) - 2.0 * c + at(kk, jj - 1)) / (dz * dz * rk[k]);
      res = std::max(res, std::abs(lr + lz - rhs[k * nz + j]));
    }
  sol.residual = res / rhs_scale;
  if (!(sol.residual <= 1e-8))
    throw NumericalError("fd_solve: linear solve residual " + std::to_string(sol.residual) +
                         " exceeds 1e-8");
  sol.psi = ScalarField(grid, std::move(work));
  return sol;
}

}  // namespace vring
