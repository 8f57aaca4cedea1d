#include <doctest.h>

#include <cmath>

#include "vring/diagnostics.hpp"
#include "vring/errors.hpp"
#include "vring/oracles.hpp"

using namespace vring;

namespace {
GridSpec unit_grid(std::size_t n = 40) { return build_grid({0.5, 2.0, -1.0, 1.0}, n, n); }

ScalarField disc(const GridSpec& g, double rc, double zc, double radius, double inner = -1.0) {
  ScalarField z(g, 0.0);
  for (std::size_t i = 0; i < g.n_r(); ++i)
    for (std::size_t j = 0; j < g.n_z(); ++j) {
      const double d = std::hypot(g.r_center(i) - rc, g.z_center(j) - zc);
      if (d < radius && d >= inner) z(i, j) = 1.0;
    }
  return z;
}
}  // namespace

TEST_CASE("support of a single cell") {
  const GridSpec g = build_grid({0.5, 2.0, -1.0, 1.0}, 3, 3);  // centre cell at (1.25, 0)
  ScalarField z(g, 0.0);
  z(1, 1) = 2.0;
  const auto s = support_stats(z, 1.25);
  CHECK(s.theta_minus == doctest::Approx(1.25));
  CHECK(s.theta_plus == doctest::Approx(1.25));
  CHECK(s.diam == 0.0);
  CHECK(s.dist_to_ring == doctest::Approx(0.0));
  CHECK(s.cells == 1);
  CHECK_THROWS_AS(support_stats(ScalarField(g, 0.0), 1.0), DomainError);
}

TEST_CASE("support of a disc") {
  const GridSpec g = unit_grid(80);
  const auto s = support_stats(disc(g, 1.0, 0.0, 0.3), 1.0);
  CHECK(std::abs(s.diam - 0.6) <= std::hypot(g.dr(), g.dz()));
  CHECK(s.theta_minus <= 1.0);
  CHECK(s.theta_plus >= 1.0);
  CHECK(core_radius(s) == doctest::Approx(0.3).epsilon(0.05));
}

TEST_CASE("centre of vorticity") {
  const GridSpec g = unit_grid(40);
  const ScalarField z = disc(g, 1.25, 0.0, 0.2);
  const Point2 c = center_of_vorticity(z);
  CHECK(c.z == 0.0);
  ScalarField shifted(g, 0.0);
  for (std::size_t i = 0; i < g.n_r(); ++i)
    for (std::size_t j = 1; j < g.n_z(); ++j) shifted(i, j) = z(i, j - 1);
  CHECK(center_of_vorticity(shifted).z == doctest::Approx(g.dz()).epsilon(1e-12));
  CHECK(center_of_vorticity(shifted).r == doctest::Approx(c.r).epsilon(1e-14));
  CHECK_THROWS(center_of_vorticity(ScalarField(g, 0.0)));
}

TEST_CASE("topology") {
  const GridSpec g = unit_grid(60);
  CHECK(topology_check(disc(g, 1.25, 0.0, 0.4)));
  CHECK_FALSE(topology_check(disc(g, 1.25, 0.0, 0.4, 0.2)));
  ScalarField two = disc(g, 0.9, 0.0, 0.15);
  two += disc(g, 1.6, 0.0, 0.15);
  CHECK_FALSE(topology_check(two));
}

TEST_CASE("scaled profile of a uniform disc") {
  const GridSpec g = unit_grid(160);
  const double eps = 0.1;
  ScalarField z = disc(g, 1.25, 0.0, 0.2);
  z *= 1.0 / (eps * eps);
  const auto p = scaled_profile(z, center_of_vorticity(z), eps, 3.0);
  double area = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) area += z[k] > 0 ? g.cell_area() : 0.0;
  CHECK(p.planar_mass == doctest::Approx(area / (eps * eps)).epsilon(1e-12));
  CHECK(p.radially_nonincreasing);
  CHECK(p.angular_variation < 0.2);
  CHECK_THROWS_AS(scaled_profile(z, center_of_vorticity(z), eps, 1.0), DomainError);
}

TEST_CASE("velocity of the background stream") {
  const GridSpec g = unit_grid(20);
  const double eps = 0.05, L = std::log(1.0 / eps);
  ScalarField psi(g, 0.0);
  for (std::size_t i = 0; i < g.n_r(); ++i)
    for (std::size_t j = 0; j < g.n_z(); ++j) psi(i, j) = -0.5 * g.r_center(i) * g.r_center(i) * L;
  const auto v = velocity_field(psi, GeneratorPair::turkington(1), eps);
  for (std::size_t k = 0; k < psi.size(); ++k) {
    CHECK(v.v_z[k] == doctest::Approx(-L).epsilon(1e-12));
    CHECK(v.v_r[k] == doctest::Approx(0.0));
    CHECK(v.v_theta[k] == 0.0);
  }
  ScalarField positive(g, 1.0);
  const auto none = velocity_field(positive, GeneratorPair::power_law(1), eps);
  CHECK(none.v_theta.max() == 0.0);
}

TEST_CASE("asymptotic fit on exact lines") {
  std::vector<SweepPoint> pts;
  for (double eps : {0.2, 0.1, 0.05, 0.025}) {
    SweepPoint p;
    p.epsilon = eps;
    const double L = std::log(1.0 / eps);
    p.mu = 1.5 * L + 0.25;
    p.E = 2 * M_PI * L - 1.0;
    pts.push_back(p);
  }
  const auto fit = asymptotic_fit(pts, 4 * M_PI, 1.0);
  CHECK(fit.slope_mu == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(fit.slope_E == doctest::Approx(2 * M_PI).epsilon(1e-12));
  CHECK(fit.predicted_slope_mu == doctest::Approx(1.5));
  CHECK(fit.predicted_slope_E == doctest::Approx(2 * M_PI));
  CHECK(fit.rel_error_mu <= 1e-12);

  std::vector<double> x, y;
  for (const auto& p : pts) {
    x.push_back(std::log(1.0 / p.epsilon));
    y.push_back(p.mu);
  }
  CHECK(oracle::fit_line(x, y).slope == doctest::Approx(fit.slope_mu).epsilon(1e-12));

  pts.resize(2);
  CHECK_THROWS(asymptotic_fit(pts, 4 * M_PI, 1.0));
}

TEST_CASE("Kelvin-Hicks differences") {
  // Cores following the Kelvin-Hicks radius exactly give zero spread.
  std::vector<SweepPoint> pts;
  for (double eps : {0.1, 0.05, 0.025}) {
    SweepPoint p;
    p.epsilon = eps;
    p.core_radius = 8.0 * eps * std::exp(-0.25);
    pts.push_back(p);
  }
  const auto kh = kelvin_hicks_check(pts, 4 * M_PI, 1.0);
  CHECK(kh.spread == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(kh.bounded);
  CHECK(kh.core_ratio_factor == doctest::Approx(1.0));
}
