#include "vring/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "vring/errors.hpp"
#include "vring/parallel.hpp"

namespace vring {

double MeasureSpace::total_weight() const {
  double sum = 0.0;
  for (const Atom& a : atoms) sum += a.weight;
  return sum;
}

void MeasureSpace::validate() const {
  if (atoms.empty()) throw ConfigError("bathtub needs at least one atom");
  for (const Atom& a : atoms) {
    if (!(a.weight > 0.0) || !std::isfinite(a.weight))
      throw ConfigError("atom weights must be positive and finite");
    if (!std::isfinite(a.value)) throw ConfigError("atom values must be finite");
  }
  if (!(capacity > 0.0) || !(capacity < total_weight()))
    throw ConfigError("capacity must lie in (0, total weight)");
}

BathtubSolution bathtub_maximize(const MeasureSpace& space) {
  space.validate();
  const std::size_t n = space.atoms.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return space.atoms[a].value > space.atoms[b].value;
  });

  // First value v with weight{h >= v} > capacity; then weight{h > v} <= capacity.
  // Always found since capacity < total weight.
  double level = space.atoms[order.back()].value;
  double cumulative = 0.0;
  for (std::size_t k = 0; k < n;) {
    const double v = space.atoms[order[k]].value;
    std::size_t m = k;
    while (m < n && space.atoms[order[m]].value == v) cumulative += space.atoms[order[m++]].weight;
    if (cumulative > space.capacity) {
      level = v;
      break;
    }
    k = m;
  }

  BathtubSolution sol;
  sol.level = level;
  sol.omega.assign(n, 0.0);
  const double cut = std::max(0.0, level);
  double used = 0.0;
  double tie_weight = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Atom& a = space.atoms[k];
    if (a.value > cut) {
      sol.omega[k] = 1.0;
      used += a.weight;
    } else if (a.value == cut && a.value > 0.0) {
      tie_weight += a.weight;
    }
  }
  if (tie_weight > 0.0) {
    const double frac = std::clamp((space.capacity - used) / tie_weight, 0.0, 1.0);
    for (std::size_t k = 0; k < n; ++k)
      if (space.atoms[k].value == cut) sol.omega[k] = frac;
  }
  for (std::size_t k = 0; k < n; ++k)
    sol.value += space.atoms[k].weight * space.atoms[k].value * sol.omega[k];
  return sol;
}

ScalarField steiner_symmetrize_z(const ScalarField& zeta, unsigned threads) {
  const GridSpec& g = zeta.spec();
  if (!g.symmetric_in_z()) throw ConfigError("Steiner symmetrization needs a grid symmetric about z = 0");
  const std::size_t nz = g.n_z();
  const std::size_t half = nz / 2;
  ScalarField out(g, 0.0);
  parallel_for(g.n_r(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> column(nz);
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < nz; ++j) column[j] = zeta(i, j);
      std::sort(column.begin(), column.end(), std::greater<>());
      // Slots centre-out: (-1, +1, -2, +2, ...); j = half - 1 is the first
      // cell below z = 0 and j = half the first above.
      for (std::size_t k = 0; k < nz; ++k) {
        const std::size_t ring = k / 2;
        const std::size_t j = (k % 2 == 0) ? half - 1 - ring : half + ring;
        out(i, j) = column[k];
      }
    }
  });
  return out;
}

bool is_steiner_symmetric(const ScalarField& zeta) {
  const GridSpec& g = zeta.spec();
  if (!g.symmetric_in_z()) return false;
  const std::size_t nz = g.n_z(), half = nz / 2;
  for (std::size_t i = 0; i < g.n_r(); ++i) {
    double previous = zeta(i, half - 1);
    for (std::size_t k = 1; k < nz; ++k) {
      const std::size_t ring = k / 2;
      const std::size_t j = (k % 2 == 0) ? half - 1 - ring : half + ring;
      if (zeta(i, j) > previous) return false;
      previous = zeta(i, j);
    }
  }
  return true;
}

bool is_even_in_z(const ScalarField& zeta) {
  const GridSpec& g = zeta.spec();
  if (!g.symmetric_in_z()) return false;
  for (std::size_t i = 0; i < g.n_r(); ++i)
    for (std::size_t j = 0; j < g.n_z() / 2; ++j)
      if (zeta(i, j) != zeta(i, g.mirror_j(j))) return false;
  return true;
}

}  // namespace vring
