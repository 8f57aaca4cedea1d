#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace vring {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // absolute estimate
  int intervals = 0;
  bool converged = false;
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
std::pair<double, double> gk15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double fsum = f(center - dx) + f(center + dx);
    resk += kWgk[j] * fsum;
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
  }
  return {resk * half, std::abs((resk - resg) * half)};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod quadrature: repeatedly bisects the interval
// with the largest error estimate until the summed estimate is below
// max(abs_tol, rel_tol * |value|) or the interval budget is exhausted.
template <typename F>
QuadratureResult integrate_adaptive(F&& f, std::vector<double> breakpoints, double rel_tol,
                                    double abs_tol = 0.0, int max_intervals = 4000) {
  struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  std::priority_queue<Piece> heap;
  double value = 0.0, error = 0.0;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    const auto [v, e] = detail::gk15(f, breakpoints[k], breakpoints[k + 1]);
    heap.push({breakpoints[k], breakpoints[k + 1], v, e});
    value += v;
    error += e;
  }
  int intervals = static_cast<int>(heap.size());
  const double eps = std::numeric_limits<double>::epsilon();
  while (error > std::max(abs_tol, rel_tol * std::abs(value)) && intervals < max_intervals) {
    const Piece worst = heap.top();
    // Stop refining once the interval cannot be split meaningfully.
    if (worst.b - worst.a <= 64.0 * eps * std::max(std::abs(worst.a), std::abs(worst.b))) break;
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const auto [v1, e1] = detail::gk15(f, worst.a, mid);
    const auto [v2, e2] = detail::gk15(f, mid, worst.b);
    heap.push({worst.a, mid, v1, e1});
    heap.push({mid, worst.b, v2, e2});
    value += v1 + v2 - worst.value;
    error += e1 + e2 - worst.error;
    ++intervals;
  }
  // Re-sum to shed the drift of the running totals.
  value = 0.0;
  error = 0.0;
  std::vector<Piece> pieces;
  while (!heap.empty()) {
    pieces.push_back(heap.top());
    heap.pop();
  }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
  for (const Piece& p : pieces) {
    value += p.value;
    error += p.error;
  }
  return {value, error, intervals, error <= std::max(abs_tol, rel_tol * std::abs(value))};
}

}  // namespace vring
