#pragma once

#include <vector>

#include "vring/grid.hpp"

namespace vring {

struct Atom {
  double weight = 0.0;  // > 0
  double value = 0.0;
};

struct MeasureSpace {
  std::vector<Atom> atoms;
  double capacity = 0.0;  // 0 < capacity < total weight

  double total_weight() const;
  // Throws ConfigError on an empty list, non-positive weights or a capacity
  // outside (0, total weight).
  void validate() const;
};

struct BathtubSolution {
  std::vector<double> omega;  // fill fraction per atom, in [0, 1]
  double level = 0.0;         // inf{t : weight{h > t} <= capacity}
  double value = 0.0;         // sum weight * h * omega
};

// Maximises sum w_i h_i omega_i over 0 <= omega <= 1, sum w_i omega_i <= capacity.
// Atoms above max(0, level) are filled, atoms below are empty, and leftover
// capacity is spread over the level set in proportion to weight.
BathtubSolution bathtub_maximize(const MeasureSpace& space);

// Rearranges every r-column so that values are nonincreasing along the
// centre-out slot order (-1, +1, -2, +2, ...), keeping each column's multiset
// of values. Columns whose values pair up come out even in z. Requires a grid
// symmetric about z = 0.
ScalarField steiner_symmetrize_z(const ScalarField& zeta, unsigned threads = 1);

// True when every column is nonincreasing along the centre-out slot order,
// i.e. a fixed point of steiner_symmetrize_z.
bool is_steiner_symmetric(const ScalarField& zeta);

// zeta(r, z) == zeta(r, -z) exactly.
bool is_even_in_z(const ScalarField& zeta);

}  // namespace vring
