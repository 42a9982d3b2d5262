#pragma once

#include "slabkin/velocity.hpp"

namespace slabkin {

/// Wall temperatures theta = 1 + delta * vartheta at x = -1/2 and x = +1/2.
struct WallSpec
{
  double delta = 0.0;
  double vartheta_minus = 0.0;
  double vartheta_plus = 0.0;

  double theta_minus() const { return 1.0 + delta * vartheta_minus; }
  double theta_plus() const { return 1.0 + delta * vartheta_plus; }

  /// Throws InvalidArgument naming the violated WallSpec invariant.
  void validate() const;
};

/// Flux-normalized Maxwellian (2 pi theta^2)^-1 exp(-|v|^2 / (2 theta)).
double maxwellian(double theta, const Vec3& v);
double maxwellian(double theta, double speed2);

/// d mu_theta / d theta at theta = 1, i.e. (|v|^2/2 - 2) mu(v).
double mu1_coefficient(const Vec3& v);
double mu1_coefficient(double speed2);

/// (1/2) d^2 mu_theta / d theta^2 at theta = 1:
/// [ (|v|^2/2 - 2)^2 / 2 + 1 - |v|^2/2 ] mu(v).
double mu2_coefficient(double speed2);

/// max over nodes of |mu_{1+delta} - mu - delta mu1| divided by
/// delta^2 (1 + |v|^4) exp(-|v|^2 / (2 (1 + delta))). Returns 0 for theta == 1.
double expansion_remainder_bound_check(double theta, double delta, const VelocityGrid& grid);

} // namespace slabkin
