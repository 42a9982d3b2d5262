#include "oracles.hpp"
#include "slabkin/equilibria.hpp"
#include "slabkin/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace slabkin;

TEST_CASE("maxwellian normalization and derivatives")
{
  CHECK(maxwellian(1.0, 0.0) == doctest::Approx(1.0 / (2.0 * oracle::pi)));
  // mu1 and mu2 against central differences in theta
  for (double s2 : {0.0, 0.7, 3.0, 9.5}) {
    const double h = 1e-4;
    const double d1 = (maxwellian(1.0 + h, s2) - maxwellian(1.0 - h, s2)) / (2.0 * h);
    const double d2 = (maxwellian(1.0 + h, s2) - 2.0 * maxwellian(1.0, s2) + maxwellian(1.0 - h, s2)) / (h * h);
    CHECK(mu1_coefficient(s2) == doctest::Approx(d1).epsilon(1e-7));
    CHECK(mu2_coefficient(s2) == doctest::Approx(0.5 * d2).epsilon(1e-5));
  }
  CHECK_THROWS_AS(maxwellian(0.0, 1.0), InvalidArgument);
}

TEST_CASE("expansion remainder is second order in delta")
{
  const VelocityGrid g = build_grid({12, 8, 8}, 7.0, GridKind::gauss);
  for (double delta : {0.2, 0.1, 0.05}) {
    const double r = expansion_remainder_bound_check(1.0 + delta, delta, g);
    CHECK(r > 0.0);
    CHECK(r < 2.0);
  }
  CHECK(expansion_remainder_bound_check(1.0, 0.1, g) == 0.0);
}

TEST_CASE("wall spec invariants")
{
  WallSpec w{0.05, -1.0, 1.0};
  CHECK(w.theta_minus() == doctest::Approx(0.95));
  CHECK(w.theta_plus() == doctest::Approx(1.05));
  CHECK_NOTHROW(w.validate());
  CHECK_THROWS_AS((WallSpec{-0.1, 0, 0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((WallSpec{0.1, 2.0, 0}.validate()), InvalidArgument);
}
