#pragma once

#include "slabkin/transport.hpp"

#include <optional>
#include <vector>

namespace slabkin {

struct MomentProfile
{
  std::vector<double> x;
  std::vector<double> rho;
  std::vector<Vec3> u;
  std::vector<double> theta;
  std::vector<Vec3> q;
  std::vector<double> a;
  std::vector<Vec3> b;
  std::vector<double> c;
  std::vector<double> theta1;

  std::size_t size() const { return x.size(); }
  void resize(std::size_t n);
};

/// Moments of a full distribution F given per cell ([cell * nv + node]):
/// rho = int F, u = int v F / rho, theta = int |v - u|^2 F / (3 rho),
/// q = (1/2) int (v - u) |v - u|^2 F. Expansion columns are left at zero.
MomentProfile moments(const VelocityGrid& grid, const SlabMesh& mesh, std::span<const double> F);

/// Profile of F = mu + delta sqrt(mu) f for a steady perturbation. u and q are
/// taken from face values averaged to cells (the fluxes the scheme conserves);
/// a, b, c come from project_P of f and theta1 from theta1_profile.
MomentProfile perturbation_profile(const SlabMesh& mesh, const CollisionOperator& op, const SlabField& f,
                                   double delta);

/// theta1 = int (|v|^2 - 3) sqrt(mu) f1 / (3 sqrt(2 pi)) per cell. Invariant
/// under adding multiples of sqrt(mu); equals c for f1 = c (|v|^2/2 - 2) sqrt(mu).
std::vector<double> theta1_profile(const VelocityGrid& grid, const SlabField& f1);

/// First-order heat flux int v1 (|v|^2/2 - 5/2) sqrt(mu) f1 per cell, from
/// face values averaged to cells.
std::vector<double> heat_flux_linear(const VelocityGrid& grid, const SlabField& f1);

/// First-order mass flux int v1 sqrt(mu) f1 per cell, from face values.
std::vector<double> mass_flux_linear(const VelocityGrid& grid, const SlabField& f1);

struct LinearityReport
{
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
  double rel_residual = 0.0;
  double window_lo = -0.5;
  double window_hi = 0.5;
  int points = 0;
};

/// Least-squares line through the samples with x in [lo, hi].
LinearityReport linearity_test(const std::vector<double>& x, const std::vector<double>& values, double lo,
                               double hi);

inline constexpr double interior_window = 0.3; // |x| <= 0.3, the interior 60%
inline constexpr double relative_floor = 1e-14;

/// max over interior cells of |q1 - mean q1| / |mean q1| (absolute below the floor).
double flux_constancy(const MomentProfile& profile);
double flux_constancy(const std::vector<double>& q);

double weighted_sup_norm(const VelocityGrid& grid, std::span<const double> f, const WeightParams& w);

/// kappa = -q1 / (sqrt(2 pi) Kn dtheta1/dx), with the slope from the interior
/// fit and q1 the mean first-order heat flux. Tends to 5 / (2 nu0) for BGK.
double kappa_hat(const SlabMesh& mesh, const VelocityGrid& grid, const SlabField& f1);

struct ConductivityEstimate
{
  std::vector<double> knudsen; // decreasing
  std::vector<double> kappa;
  /// Linear extrapolation to Kn = 0 through the two smallest Kn values.
  double extrapolated = 0.0;
  /// Largest relative change between successive estimates.
  double max_successive_change = 0.0;
  /// Relative change between the two finest estimates.
  double final_change = 0.0;
  /// Set when the estimates do not vary monotonically with Kn.
  bool non_monotone = false;
};

/// Needs at least three Kn values below 0.2 spanning a factor of ten.
ConductivityEstimate conductivity_estimate(std::vector<double> knudsen, std::vector<double> kappa);

} // namespace slabkin
