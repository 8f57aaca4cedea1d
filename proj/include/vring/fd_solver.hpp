#pragma once

#include <cstddef>

#include "vring/grid.hpp"

namespace vring {

// Computational box around D for the finite-difference validator. Nodes sit
// on the lattice of D's cell centres, so D embeds exactly.
struct ExtendedBox {
  double margin = 0.0;  // added on the far-r side and both z sides
  double r_axis = 0.0;  // Dirichlet line standing in for the axis, 0 < r_axis < r_min(D)
};

// margin = factor * diam(D) and r_axis = r_min(D) / 8.
ExtendedBox default_box(const GridSpec& domain, double margin_factor = 3.0);

struct FdSolution {
  ScalarField psi;          // unknown nodes of the box, as a cell-centred grid
  std::size_t i_offset = 0;  // box index of D's first radial cell
  std::size_t j_offset = 0;  // box index of D's first axial cell
  double residual = 0.0;    // max |L_h psi - zeta| r scaled by max |r zeta|
  ScalarField restrict_to(const GridSpec& domain) const;
};

// Second-order solution of L psi = zeta with psi = 0 on the box boundary and
// on r = r_axis, zeta extended by zero outside D. Multiplying by r makes the
// five-point stencil symmetric; the z-direction is diagonalised by a sine
// transform and each mode is a tridiagonal solve in r.
FdSolution fd_solve(const ScalarField& zeta, const ExtendedBox& box);

}  // namespace vring
