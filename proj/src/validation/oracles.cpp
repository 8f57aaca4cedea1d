#include "vring/oracles.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace vring::oracle {

double kernel_midpoint(double r, double z, double rp, double zp, std::size_t n) {
  const double pi = std::numbers::pi;
  const double h = pi / static_cast<double>(n);
  const double dz2 = (z - zp) * (z - zp);
  long double sum = 0.0L;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * h;
    sum += std::cos(t) / std::sqrt(dz2 + r * r + rp * rp - 2.0 * r * rp * std::cos(t));
  }
  return r * rp / (2.0 * pi) * static_cast<double>(sum) * h;
}

BathtubVertexOptimum bathtub_vertex_search(const MeasureSpace& space) {
  const auto& atoms = space.atoms;
  const std::size_t n = atoms.size();
  if (n == 0 || n > 20) throw std::invalid_argument("vertex search needs 1..20 atoms");
  BathtubVertexOptimum out;
  out.value = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double w = 0.0, v = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      if (mask >> k & 1U) {
        w += atoms[k].weight;
        v += atoms[k].weight * atoms[k].value;
      }
    if (w > space.capacity) continue;
    out.value = std::max(out.value, v);
    const double left = space.capacity - w;
    for (std::size_t k = 0; k < n; ++k)
      if (!(mask >> k & 1U) && left < atoms[k].weight) out.value = std::max(out.value, v + left * atoms[k].value);
  }
  out.level = std::numeric_limits<double>::infinity();
  for (const auto& candidate : atoms) {
    double above = 0.0;
    for (const auto& a : atoms)
      if (a.value > candidate.value) above += a.weight;
    if (above <= space.capacity) out.level = std::min(out.level, candidate.value);
  }
  return out;
}

Line fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k] / n;
    my += y[k] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  Line line;
  line.slope = sxy / sxx;
  line.intercept = my - line.slope * mx;
  return line;
}

}  // namespace vring::oracle
