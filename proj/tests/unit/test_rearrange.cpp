#include <doctest.h>

#include <cmath>
#include <random>

#include "vring/errors.hpp"
#include "vring/greens.hpp"
#include "vring/oracles.hpp"
#include "vring/rearrange.hpp"
#include "vring/validation.hpp"

using namespace vring;

TEST_CASE("bathtub on three atoms") {
  const MeasureSpace space{{{1, 3}, {1, 2}, {1, 1}}, 1.5};
  const auto sol = bathtub_maximize(space);
  CHECK(sol.level == 2.0);
  CHECK(sol.omega == std::vector<double>{1.0, 0.5, 0.0});
  CHECK(sol.value == doctest::Approx(4.0));
  const auto ref = oracle::bathtub_vertex_search(space);
  CHECK(ref.value == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(ref.level == 2.0);
}

TEST_CASE("bathtub with nonpositive values") {
  const auto neg = bathtub_maximize({{{1, -1}, {2, -3}}, 1.0});
  CHECK(neg.value == 0.0);
  CHECK(neg.omega == std::vector<double>{0.0, 0.0});

  const auto slack = bathtub_maximize({{{1, 1}, {1, -1}}, 1.5});
  CHECK(slack.omega[0] == 1.0);
  CHECK(slack.omega[1] == 0.0);
  CHECK(slack.value == 1.0);
  CHECK(slack.level <= 0.0);
}

TEST_CASE("bathtub input validation") {
  CHECK_THROWS_AS(bathtub_maximize({{}, 1.0}), ConfigError);
  CHECK_THROWS_AS(bathtub_maximize({{{0.0, 1.0}}, 0.5}), ConfigError);
  CHECK_THROWS_AS(bathtub_maximize({{{1.0, 1.0}}, 1.0}), ConfigError);
}

TEST_CASE("bathtub matches vertex search on random instances") {
  const auto rep = validation::run_bathtub();
  CHECK(rep.trials == 200);
  CHECK(rep.value_mismatches == 0);
  CHECK(rep.level_mismatches == 0);
  CHECK(rep.structure_failures == 0);
  CHECK(rep.capacity_failures == 0);
  CHECK(rep.monotonicity_failures == 0);
}

namespace {
GridSpec column_grid(std::size_t n_r, std::size_t n_z) { return build_grid({0.5, 2.0, -1.0, 1.0}, n_r, n_z); }
}  // namespace

TEST_CASE("steiner symmetrisation of a single column") {
  const GridSpec g = column_grid(2, 4);
  const ScalarField col(g, {0.0, 3.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  const ScalarField s = steiner_symmetrize_z(col);
  // slots ordered by |z|: (-1, +1, -2, +2) take (3, 1, 0, 0)
  CHECK(s(0, 1) == 3.0);
  CHECK(s(0, 2) == 1.0);
  CHECK(s(0, 0) == 0.0);
  CHECK(s(0, 3) == 0.0);
  const ScalarField sym(g, {1.0, 3.0, 3.0, 1.0, 0.5, 2.0, 2.0, 0.5});
  CHECK(is_steiner_symmetric(sym));
  CHECK(is_even_in_z(sym));
  CHECK_FALSE(is_even_in_z(s));
  const ScalarField fixed = steiner_symmetrize_z(sym);
  CHECK(std::equal(fixed.values().begin(), fixed.values().end(), sym.values().begin()));
  CHECK_THROWS_AS(steiner_symmetrize_z(ScalarField(column_grid(2, 3), 1.0)), ConfigError);
}

TEST_CASE("steiner symmetrisation properties") {
  const GridSpec g = column_grid(12, 16);
  const StreamOperator op(g);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    ScalarField z(g, 0.0);
    for (std::size_t i = 3; i < 9; ++i)
      for (std::size_t j = 2; j < 14; ++j)
        if (u(rng) < 0.6) z(i, j) = u(rng);
    const ScalarField s = steiner_symmetrize_z(z);
    CHECK(is_steiner_symmetric(s));
    CHECK(integrate_nu(s) == doctest::Approx(integrate_nu(z)).epsilon(1e-14));
    const ScalarField ss = steiner_symmetrize_z(s);
    CHECK(std::equal(ss.values().begin(), ss.values().end(), s.values().begin()));
    const double before = inner_nu(z, op.apply(z)), after = inner_nu(s, op.apply(s));
    CHECK(after >= before - 1e-6 * before);
  }
}
