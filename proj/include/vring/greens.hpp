#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "vring/grid.hpp"

namespace vring {

enum class KernelMethod { quadrature, closed_form };

struct KernelEval {
  double value = 0.0;
  KernelMethod method = KernelMethod::closed_form;
  double estimated_error = 0.0;  // absolute
};

// Normalised separation [(r-r')^2 + (z-z')^2]^{1/2} / (4 r r')^{1/2}.
double sigma(double r, double z, double rp, double zp);

// Ring Green's function of the axisymmetric stream operator
//   K = (r r' / 4 pi) \int_{-pi}^{pi} cos t dt / [(z-z')^2 + r^2 + r'^2 - 2 r r' cos t]^{1/2}
// by adaptive Gauss-Kronrod quadrature. `tol` is relative.
KernelEval kernel_quadrature(double r, double z, double rp, double zp, double tol = 1e-10);

// Same kernel through complete elliptic integrals, evaluated with an AGM
// recursion driven by the complementary modulus so that nearly coincident
// points keep full relative accuracy.
KernelEval kernel_closed_form(double r, double z, double rp, double zp);

// Upper bound (r r')^{1/2} / (4 pi) asinh(1 / sigma).
double kernel_upper_bound(double r, double z, double rp, double zp);

// Bounded remainder l of the log expansion
//   K = sqrt(rr')/(2 pi) [log(1/sigma) + log(1 + sqrt(sigma^2 + 1))] + l sqrt(rr').
double expansion_remainder(double r, double z, double rp, double zp);

// Limit of the remainder as sigma -> 0: (log 2 - 2) / (2 pi).
double expansion_remainder_limit();

// Mean of log(1/rho) over a dr x dz rectangle, rho measured from its centre.
double mean_log_inverse_distance(double dr, double dz);

// Precomputed discrete stream operator psi_0 = K zeta on a grid. Coefficients
// depend on (i, i', |j - j'|) only (translation invariance in z), and the
// self-cell coefficient integrates the logarithmic singularity over the cell.
class StreamOperator {
 public:
  explicit StreamOperator(const GridSpec& grid, unsigned threads = 1);

  const GridSpec& grid() const { return grid_; }
  unsigned threads() const { return threads_; }
  void set_threads(unsigned t) { threads_ = t == 0 ? 1 : t; }

  // Coefficient multiplying zeta(i', j') nu(i') in psi_0(i, j).
  double coefficient(std::size_t i, std::size_t ip, std::size_t dj) const {
    return table_[(i * grid_.n_r() + ip) * grid_.n_z() + dj];
  }

  // psi_0(x) = sum_{y in support} K(x, y) zeta(y) nu(y). Every cell with
  // zeta != 0 must be listed in `support` (ConsistencyError otherwise).
  ScalarField apply(const ScalarField& zeta, std::span<const std::size_t> support) const;
  ScalarField apply(const ScalarField& zeta) const;

 private:
  GridSpec grid_;
  unsigned threads_ = 1;
  std::vector<double> table_;
};

// Flat indices of cells with nonzero value, in storage order.
std::vector<std::size_t> support_indices(const ScalarField& field);

ScalarField apply_stream_operator(const StreamOperator& op, const ScalarField& zeta,
                                  std::span<const std::size_t> support);

}  // namespace vring
