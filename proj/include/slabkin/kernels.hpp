#pragma once

#include "slabkin/collision.hpp"

#include <cstddef>
#include <span>

// Inner loops of the slab solvers. Each kernel has a serial reference version
// and an OpenMP version parallel over velocity nodes (or cells). The parallel
// versions do the same arithmetic per node in the same order, so results do
// not depend on the thread count.
namespace slabkin::kernels {

/// Per-cell data for a characteristic sweep. Arrays indexed [cell * nv + node].
struct SweepProblem
{
  std::size_t n_cells = 0;
  std::size_t nv = 0;
  double dx = 0.0;
  std::span<const double> v1;       // per node
  std::span<const double> sigma;    // per node, total absorption
  std::span<const double> source;   // per cell and node
  std::span<const double> incoming; // per node: value entering the slab
};

/// Exact step-characteristic solve per cell; writes cell averages and the
/// n_cells + 1 face values per node ([face * nv + node]).
void sweep_serial(const SweepProblem& p, std::span<double> cells, std::span<double> faces);
void sweep_parallel(const SweepProblem& p, std::span<double> cells, std::span<double> faces);

/// One backward-Euler step that keeps the steady per-cell closure between the
/// cell average and the outgoing face value. `previous` holds the old cell
/// averages; a steady solution of the same problem is an exact fixed point.
void closure_step_serial(const SweepProblem& p, double inv_dt, std::span<const double> previous,
                         std::span<double> cells, std::span<double> faces);
void closure_step_parallel(const SweepProblem& p, double inv_dt, std::span<const double> previous,
                           std::span<double> cells, std::span<double> faces);

/// out[cell] = K in[cell] for every cell.
void apply_k_cells_serial(const CollisionOperator& op, std::size_t n_cells, std::span<const double> in,
                          std::span<double> out);
void apply_k_cells_parallel(const CollisionOperator& op, std::size_t n_cells, std::span<const double> in,
                            std::span<double> out);

/// phi(tau) = (1 - e^-tau) / tau, and the closure ratio (1 - e^-tau) / (1 - phi).
double phi(double tau);
double closure_ratio(double tau);

} // namespace slabkin::kernels
