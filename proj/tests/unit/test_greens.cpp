#include <doctest.h>

#include <cmath>
#include <random>

#include "vring/errors.hpp"
#include "vring/fd_solver.hpp"
#include "vring/greens.hpp"
#include "vring/oracles.hpp"

using namespace vring;

TEST_CASE("normalised separation") {
  CHECK(sigma(1, 0, 1, 0) == 0.0);
  CHECK(sigma(1, 0, 1, 2) == doctest::Approx(1.0));
  CHECK(sigma(2, 0, 0.5, 0) == doctest::Approx(0.75));
  CHECK_THROWS_AS(sigma(0.0, 0, 1, 0), DomainError);
}

TEST_CASE("kernel against the brute-force midpoint oracle") {
  // Frozen from the oracle with 10^6 nodes.
  const double reference = 0.38031872677818634;
  CHECK(oracle::kernel_midpoint(1, 0, 1, 0.1) == doctest::Approx(reference).epsilon(1e-13));
  CHECK(kernel_closed_form(1, 0, 1, 0.1).value == doctest::Approx(reference).epsilon(1e-12));
  CHECK(kernel_quadrature(1, 0, 1, 0.1).value == doctest::Approx(reference).epsilon(1e-10));
  for (auto [r, z, rp, zp] : {std::array{0.6, -0.8, 1.9, 0.7}, std::array{1.2, 0.1, 1.25, 0.12}}) {
    const double ref = oracle::kernel_midpoint(r, z, rp, zp);
    CHECK(kernel_closed_form(r, z, rp, zp).value == doctest::Approx(ref).epsilon(1e-11));
  }
}

TEST_CASE("kernel bound at unit separation") {
  CHECK(kernel_upper_bound(1, 0, 1, 2) == doctest::Approx(std::log(1.0 + std::sqrt(2.0)) / (4 * M_PI)));
  CHECK(kernel_upper_bound(1, 0, 1, 2) == doctest::Approx(0.07014).epsilon(1e-4));
  CHECK(kernel_closed_form(1, 0, 1, 2).value <= kernel_upper_bound(1, 0, 1, 2));
}

TEST_CASE("kernel symmetry, translation invariance and errors") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ur(0.5, 2.0), uz(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double r = ur(rng), z = uz(rng), rp = ur(rng), zp = uz(rng);
    const double K = kernel_closed_form(r, z, rp, zp).value;
    CHECK(K > 0.0);
    CHECK(std::abs(K - kernel_closed_form(rp, zp, r, z).value) <= 1e-12 * K);
    CHECK(std::abs(K - kernel_closed_form(r, z + 0.375, rp, zp + 0.375).value) <= 1e-12 * K);
  }
  CHECK_THROWS_AS(kernel_quadrature(1, 0, 1, 0), SingularError);
  CHECK_THROWS_AS(kernel_closed_form(1, 0, 1, 0), SingularError);
}

TEST_CASE("expansion remainder") {
  // At sigma = 1 the log(1/sigma) term vanishes.
  const double r = 1.0, rp = 1.0, zp = 2.0;
  const double K = kernel_closed_form(r, 0, rp, zp).value;
  CHECK(expansion_remainder(r, 0, rp, zp) ==
        doctest::Approx(K / std::sqrt(r * rp) - std::log(1.0 + std::sqrt(2.0)) / (2 * M_PI)));
  CHECK(expansion_remainder_limit() == doctest::Approx((std::log(2.0) - 2.0) / (2 * M_PI)));
  CHECK(expansion_remainder(1, 0, 1, 1e-5) == doctest::Approx(expansion_remainder_limit()).epsilon(1e-6));
}

TEST_CASE("mean log distance over a cell") {
  // Midpoint sum over the cell.
  const double dr = 0.3, dz = 0.2;
  const int n = 2000;
  double sum = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double x = (a + 0.5) / n * dr - dr / 2, y = (b + 0.5) / n * dz - dz / 2;
      sum -= 0.5 * std::log(x * x + y * y);
    }
  CHECK(mean_log_inverse_distance(dr, dz) == doctest::Approx(sum / (double(n) * n)).epsilon(1e-5));
}

TEST_CASE("stream operator") {
  const GridSpec g = build_grid(default_domain(4 * M_PI, 1.0), 24, 32);
  const StreamOperator op(g);
  CHECK(op.apply(ScalarField(g, 0.0)).max() == 0.0);

  ScalarField one(g, 0.0);
  one(5, 7) = 3.0;
  const ScalarField psi = op.apply(one);
  const double mass = 3.0 * g.cell_volume(5);
  const double K = kernel_closed_form(g.r_center(20), g.z_center(28), g.r_center(5), g.z_center(7)).value;
  CHECK(psi(20, 28) == doctest::Approx(K * mass).epsilon(1e-12));
  CHECK(psi.min() > 0.0);

  ScalarField a(g, 0.0), b(g, 0.0);
  for (std::size_t k = 0; k < a.size(); k += 7) a[k] = 1.0 + 0.01 * k;
  for (std::size_t k = 3; k < b.size(); k += 5) b[k] = 2.0;
  const ScalarField lhs = op.apply(2.0 * a + (-0.5) * b);
  const ScalarField ra = op.apply(a), rb = op.apply(b);
  for (std::size_t k = 0; k < lhs.size(); ++k)
    CHECK(std::abs(lhs[k] - (2.0 * ra[k] - 0.5 * rb[k])) <= 1e-12 * std::abs(lhs[k]) + 1e-15);

  const auto again = op.apply(a);
  CHECK(std::equal(ra.values().begin(), ra.values().end(), again.values().begin()));

  const std::vector<std::size_t> partial = {0};
  CHECK_THROWS_AS(apply_stream_operator(op, a, partial), ConsistencyError);
}

TEST_CASE("finite-difference validator") {
  const GridSpec g = build_grid(default_domain(4 * M_PI, 1.0), 24, 32);
  CHECK(fd_solve(ScalarField(g, 0.0), default_box(g)).psi.max() == 0.0);
  ScalarField zeta(g, 0.0);
  for (std::size_t i = 8; i < 14; ++i)
    for (std::size_t j = 12; j < 20; ++j) zeta(i, j) = 1.0;
  const FdSolution fd = fd_solve(zeta, default_box(g));
  CHECK(fd.psi.min() >= 0.0);
  CHECK(fd.residual <= 1e-8);
  CHECK_THROWS_AS(fd_solve(zeta, default_box(g, 2.0)), ConfigError);
}
