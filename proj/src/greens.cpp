#include "vring/greens.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "vring/errors.hpp"
#include "vring/parallel.hpp"
#include "vring/quadrature.hpp"

namespace vring {
namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_radii(double r, double rp) {
  if (!(r > 0.0) || !(rp > 0.0))
    throw DomainError("kernel evaluation requires r > 0 and r' > 0");
}

// Leading terms of the log expansion; used where the points are so close
// that sigma^2 is below double resolution relative to 1.
double kernel_expansion(double r, double rp, double s) {
  const double root = std::sqrt(r * rp);
  return root / (2.0 * kPi) * (std::log(1.0 / s) + std::log1p(std::sqrt(s * s + 1.0))) +
         expansion_remainder_limit() * root;
}

}  // namespace

double sigma(double r, double z, double rp, double zp) {
  require_positive_radii(r, rp);
  return std::hypot(r - rp, z - zp) / std::sqrt(4.0 * r * rp);
}

double kernel_upper_bound(double r, double z, double rp, double zp) {
  const double s = sigma(r, z, rp, zp);
  if (s == 0.0) throw SingularError("kernel bound is infinite at coincident points");
  return std::sqrt(r * rp) / (4.0 * kPi) * std::asinh(1.0 / s);
}

KernelEval kernel_quadrature(double r, double z, double rp, double zp, double tol) {
  if (!(tol > 0.0)) throw DomainError("quadrature tolerance must be positive");
  const double s = sigma(r, z, rp, zp);
  if (s == 0.0) throw SingularError("kernel is singular at coincident points");
  const double near2 = (r - rp) * (r - rp) + (z - zp) * (z - zp);
  const double rr = r * rp;
  // Denominator written as near^2 + 4 r r' sin^2(t/2) to avoid cancellation
  // close to t = 0.
  auto integrand = [near2, rr](double t) {
    const double h = std::sin(0.5 * t);
    return std::cos(t) / std::sqrt(near2 + 4.0 * rr * h * h);
  };
  // The integrand has a peak of width ~ sigma at t = 0; a breakpoint there
  // spares the adaptive rule from having to discover the scale.
  const double split = std::min(0.5 * kPi, 8.0 * s);
  const QuadratureResult q =
      integrate_adaptive(integrand, {0.0, split, kPi}, std::min(0.01 * tol, 1e-13));
  const double value = rr / (2.0 * kPi) * q.value;
  const double error = rr / (2.0 * kPi) * q.error;
  if (!(error <= tol * std::abs(value)))
    throw ToleranceError("kernel quadrature did not reach tolerance " + std::to_string(tol));
  return {value, KernelMethod::quadrature, error};
}

KernelEval kernel_closed_form(double r, double z, double rp, double zp) {
  require_positive_radii(r, rp);
  const double dz = z - zp;
  const double near2 = (r - rp) * (r - rp) + dz * dz;
  const double far2 = (r + rp) * (r + rp) + dz * dz;
  if (near2 == 0.0) throw SingularError("kernel is singular at coincident points");
  const double s = std::sqrt(near2) / std::sqrt(4.0 * r * rp);
  if (s < 1e-12) {
    // Truncation of the expansion is O(sigma^2 log sigma).
    return {kernel_expansion(r, rp, s), KernelMethod::closed_form,
            std::sqrt(r * rp) * s * s * (1.0 + std::abs(std::log(s)))};
  }

  // With k^2 = 4 r r' / far2 and k'^2 = near2 / far2,
  //   K = sqrt(rr') / (pi k) [(1 - k^2/2) K(k) - E(k)].
  // The AGM gives K(k) = pi / (2 a_inf) and
  //   (1 - k^2/2) K(k) - E(k) = K(k) sum_{n>=1} 2^{n-1} c_n^2,
  // with c_n = c_{n-1}^2 / (4 a_n) free of cancellation.
  const double k2 = 4.0 * r * rp / far2;
  double a = 1.0;
  double b = std::sqrt(near2 / far2);
  double c2 = k2;  // c_0^2
  double weight = 0.5;
  double series = 0.0;
  for (int n = 1; n < 64; ++n) {
    const double a_next = 0.5 * (a + b);
    const double b_next = std::sqrt(a * b);
    const double c = c2 / (4.0 * a_next);
    c2 = c * c;
    weight *= 2.0;
    const double term = weight * c2;  // 2^{n-1} c_n^2
    series += term;
    a = a_next;
    b = b_next;
    if (term <= 1e-18 * series) break;
  }
  const double k = std::sqrt(k2);
  const double value = std::sqrt(r * rp) * series / (2.0 * k * a);
  return {value, KernelMethod::closed_form, 4.0 * std::numeric_limits<double>::epsilon() * value};
}

double expansion_remainder_limit() { return (std::numbers::ln2 - 2.0) / (2.0 * kPi); }

double expansion_remainder(double r, double z, double rp, double zp) {
  const double s = sigma(r, z, rp, zp);
  if (s == 0.0) throw SingularError("remainder undefined at coincident points");
  const double root = std::sqrt(r * rp);
  const double k = kernel_closed_form(r, z, rp, zp).value;
  return (k - root / (2.0 * kPi) * (std::log(1.0 / s) + std::log1p(std::sqrt(s * s + 1.0)))) /
         root;
}

double mean_log_inverse_distance(double dr, double dz) {
  // \int_0^a \int_0^b log(x^2 + y^2) dy dx
  //   = ab (log(a^2 + b^2) - 3) + a^2 atan(b/a) + b^2 atan(a/b).
  const double a = 0.5 * dr;
  const double b = 0.5 * dz;
  const double quarter = a * b * (std::log(a * a + b * b) - 3.0) + a * a * std::atan(b / a) +
                         b * b * std::atan(a / b);
  // log(1/rho) = -log(rho^2)/2; four quarters over an area of 4ab.
  return -0.5 * quarter / (a * b);
}

StreamOperator::StreamOperator(const GridSpec& grid, unsigned threads)
    : grid_(grid), threads_(threads == 0 ? 1 : threads) {
  const std::size_t nr = grid.n_r(), nz = grid.n_z();
  table_.assign(nr * nr * nz, 0.0);
  const double self_log = mean_log_inverse_distance(grid.dr(), grid.dz());
  const double l0 = expansion_remainder_limit();
  parallel_for(nr, threads_, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double r = grid.r_center(i);
      for (std::size_t ip = i; ip < nr; ++ip) {
        const double rp = grid.r_center(ip);
        for (std::size_t dj = 0; dj < nz; ++dj) {
          double v;
          if (ip == i && dj == 0) {
            // Cell average of the kernel about its own centre: the log(1/rho)
            // part exactly, the bounded parts at the centre (sigma = 0).
            v = r / (2.0 * kPi) * (std::log(4.0 * r) + self_log) + l0 * r;
          } else {
            v = kernel_closed_form(r, 0.0, rp, static_cast<double>(dj) * grid.dz()).value;
          }
          table_[(i * nr + ip) * nz + dj] = v;
          table_[(ip * nr + i) * nz + dj] = v;
        }
      }
    }
  });
}

std::vector<std::size_t> support_indices(const ScalarField& field) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < field.size(); ++k)
    if (field[k] != 0.0) out.push_back(k);
  return out;
}

ScalarField StreamOperator::apply(const ScalarField& zeta,
                                  std::span<const std::size_t> support) const {
  if (!(zeta.spec() == grid_)) throw ConsistencyError("zeta is not on the operator grid");
  const std::size_t nr = grid_.n_r(), nz = grid_.n_z();

  // Group sources by row; rows in increasing order, cells in listed order.
  std::vector<char> listed(zeta.size(), 0);
  for (std::size_t k : support) {
    if (k >= zeta.size()) throw ConsistencyError("support index out of range");
    listed[k] = 1;
  }
  for (std::size_t k = 0; k < zeta.size(); ++k)
    if (zeta[k] != 0.0 && !listed[k])
      throw ConsistencyError("support set omits a cell with nonzero vorticity");

  struct Source {
    std::size_t j;
    double weight;
  };
  std::vector<std::vector<Source>> rows(nr);
  for (std::size_t k : support) {
    const CellIndex c = grid_.cell(k);
    const double w = zeta[k] * grid_.cell_volume(c.i);
    if (w != 0.0) rows[c.i].push_back({c.j, w});
  }
  std::vector<std::size_t> active;
  for (std::size_t ip = 0; ip < nr; ++ip)
    if (!rows[ip].empty()) active.push_back(ip);

  ScalarField psi(grid_, 0.0);
  parallel_for(nr, threads_, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < nz; ++j) {
        double sum = 0.0;
        for (std::size_t ip : active) {
          const double* coeff = &table_[(i * nr + ip) * nz];
          for (const Source& s : rows[ip]) {
            const std::size_t dj = j > s.j ? j - s.j : s.j - j;
            sum += coeff[dj] * s.weight;
          }
        }
        psi(i, j) = sum;
      }
    }
  });
  return psi;
}

ScalarField StreamOperator::apply(const ScalarField& zeta) const {
  const auto support = support_indices(zeta);
  return apply(zeta, support);
}

ScalarField apply_stream_operator(const StreamOperator& op, const ScalarField& zeta,
                                  std::span<const std::size_t> support) {
  for (std::size_t k = 0; k < zeta.size(); ++k)
    if (zeta[k] < 0.0) throw ConsistencyError("stream operator expects zeta >= 0");
  return op.apply(zeta, support);
}

}  // namespace vring
