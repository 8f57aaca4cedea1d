#pragma once

#include <cstddef>
#include <vector>

#include "vring/rearrange.hpp"

namespace vring::oracle {

// Midpoint rule with n nodes for the azimuthal kernel integral. The
// integrand is smooth and periodic, so the rule converges geometrically.
double kernel_midpoint(double r, double z, double rp, double zp, std::size_t n = 1000000);

struct BathtubVertexOptimum {
  double value = 0.0;
  double level = 0.0;  // inf{t : weight{h > t} <= capacity}, over atom values
};

// Exhaustive search over vertices of the feasible polytope
// {0 <= omega <= 1, sum w omega <= capacity}: every atom is 0 or 1 except at
// most one partial atom that makes the capacity tight. At most 20 atoms.
BathtubVertexOptimum bathtub_vertex_search(const MeasureSpace& space);

// Least-squares line through (x, y), computed from centred sums.
struct Line {
  double slope = 0.0;
  double intercept = 0.0;
};
Line fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace vring::oracle
