#pragma once

#include "slabkin/transport.hpp"

#include <cstdint>
#include <optional>

namespace slabkin {

struct TimeSeries
{
  std::vector<double> times;
  std::vector<double> sup_norms; // weighted sup norm of f(t) - f_s
  std::vector<double> l2_norms;  // slab L2 norm of f(t) - f_s
  std::vector<double> min_F;     // min over the slab of mu + delta sqrt(mu) f
};

/// One backward-Euler step of f_t + v1 f_x + (eps + nu/Kn) f = K f_old / Kn + g.
///
/// Each cell keeps the steady exponential closure between its average and its
/// outgoing face value, so a steady solution of the same data is an exact
/// fixed point. K is lagged one step. The two wall fluxes are solved for
/// implicitly (a 2x2 system), which keeps wall mass exchange exact.
SlabField step_linear(const SlabMesh& mesh, const CollisionOperator& op, const SlabField& f, const SlabField& g,
                      const BoundarySource& r, double dt, double epsilon = 0.0, bool parallel = true);

/// f_s plus a zero-mass bump orthogonal to the collision invariants in every cell.
SlabField perturb_state(const SlabMesh& mesh, const CollisionOperator& op, const SlabField& f_s, double amplitude,
                        std::uint64_t seed);

struct RelaxResult
{
  TimeSeries series;
  SlabField steady;
  SlabField final_state;
  double steady_residual = 0.0;
  /// Decay rate from a least-squares fit of log sup_norm over the last half of
  /// the horizon; nullopt when too few usable points remain.
  std::optional<double> lambda;
  /// True when the fitted rate is not positive.
  bool non_decay = false;
};

/// Integrates the first-order problem from f0 towards the steady f1 solution.
RelaxResult relax_to_steady(const SlabMesh& mesh, const CollisionOperator& op, const WallSpec& walls,
                            const SlabField& f0, double dt, double t_end, const SteadyOptions& steady);

/// Same, with the steady state supplied by the caller.
RelaxResult relax_to_steady(const SlabMesh& mesh, const CollisionOperator& op, const WallSpec& walls,
                            const SlabField& f0, double dt, double t_end, const SteadyOptions& steady,
                            const SteadyResult& f_s);

/// Least-squares decay rate of log(values) against times, using the points
/// with t >= t_from and value > floor.
std::optional<double> fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values,
                                     double t_from, double floor);

/// One step of the positivity-preserving scheme for the full distribution F
/// (BGK gain = local Maxwellian times nu):
/// F'/dt + v1 F'_x + (nu/Kn) F' = F/dt + (nu/Kn) M[F], walls F_in = mu_theta z / Phi_theta.
/// Every term of the update is nonnegative, so F >= 0 is preserved exactly.
SlabField step_nonlinear_positive(const SlabMesh& mesh, const CollisionOperator& op, const SlabField& F,
                                  const WallSpec& walls, double dt, bool parallel = true);

/// The local Maxwellian of one cell, renormalized to the cell's discrete mass.
std::vector<double> local_maxwellian(const VelocityGrid& grid, std::span<const double> F);

} // namespace slabkin
