#include "slabkin/equilibria.hpp"

#include "slabkin/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace slabkin {

void WallSpec::validate() const
{
  require(delta >= 0.0, "WallSpec", "delta must be nonnegative");
  require(std::abs(vartheta_minus) <= 1.0 && std::abs(vartheta_plus) <= 1.0, "WallSpec",
          "|vartheta| must not exceed 1");
  require(theta_minus() > 0.0 && theta_plus() > 0.0, "WallSpec",
          "wall temperatures must be positive");
}

double maxwellian(double theta, double speed2)
{
  require(theta > 0.0, "equilibria.maxwellian", "temperature must be positive");
  return std::exp(-0.5 * speed2 / theta) / (2.0 * std::numbers::pi * theta * theta);
}

double maxwellian(double theta, const Vec3& v)
{
  return maxwellian(theta, v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

double mu1_coefficient(double speed2) { return (0.5 * speed2 - 2.0) * maxwellian(1.0, speed2); }

double mu1_coefficient(const Vec3& v)
{
  return mu1_coefficient(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

double mu2_coefficient(double speed2)
{
  const double s = 0.5 * speed2;
  return (0.5 * (s - 2.0) * (s - 2.0) + 1.0 - s) * maxwellian(1.0, speed2);
}

double expansion_remainder_bound_check(double theta, double delta, const VelocityGrid& grid)
{
  require(delta > 0.0 && delta <= 0.25, "equilibria.expansion_remainder_bound_check",
          "delta must lie in (0, 0.25]");
  // theta = 1 + delta * vartheta with vartheta = (theta - 1) / delta.
  const double vartheta = (theta - 1.0) / delta;
  if (vartheta == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s2 = grid.speed2(i);
    const double remainder =
        std::abs(maxwellian(theta, s2) - maxwellian(1.0, s2) - delta * vartheta * mu1_coefficient(s2));
    const double envelope = delta * delta * vartheta * vartheta * (1.0 + s2 * s2) *
                            std::exp(-0.5 * s2 / (1.0 + delta * std::abs(vartheta)));
    worst = std::max(worst, remainder / envelope);
  }
  return worst;
}

} // namespace slabkin
