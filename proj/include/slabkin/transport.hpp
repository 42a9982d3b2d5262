#pragma once

#include "slabkin/collision.hpp"
#include "slabkin/equilibria.hpp"

#include <span>
#include <string>
#include <vector>

namespace slabkin {

/// Uniform cells on [-1/2, 1/2].
struct SlabMesh
{
  int n_cells = 64;
  double knudsen = 1.0;

  double cell_width() const { return 1.0 / n_cells; }
  double center(int j) const { return -0.5 + (j + 0.5) * cell_width(); }
  void validate() const;
};

enum class WallSide
{
  left,  // x = -1/2, incoming v1 > 0
  right, // x = +1/2, incoming v1 < 0
};

/// f(x, v) on the slab: cell averages [cell * nv + node] plus the values on
/// the n_cells + 1 faces [face * nv + node] that the sweep produces.
class SlabField
{
 public:
  SlabField() = default;
  SlabField(std::size_t n_cells, std::size_t nv);

  std::size_t n_cells() const noexcept { return n_cells_; }
  std::size_t nv() const noexcept { return nv_; }

  std::vector<double>& cells() noexcept { return cells_; }
  const std::vector<double>& cells() const noexcept { return cells_; }
  std::vector<double>& faces() noexcept { return faces_; }
  const std::vector<double>& faces() const noexcept { return faces_; }

  std::span<double> cell(std::size_t j) { return {cells_.data() + j * nv_, nv_}; }
  std::span<const double> cell(std::size_t j) const { return {cells_.data() + j * nv_, nv_}; }
  std::span<double> face(std::size_t f) { return {faces_.data() + f * nv_, nv_}; }
  std::span<const double> face(std::size_t f) const { return {faces_.data() + f * nv_, nv_}; }

  double& at(std::size_t j, std::size_t i) { return cells_[j * nv_ + i]; }
  double at(std::size_t j, std::size_t i) const { return cells_[j * nv_ + i]; }

  /// Throws if any entry is not finite.
  void check_finite(const char* where) const;

 private:
  std::size_t n_cells_ = 0;
  std::size_t nv_ = 0;
  std::vector<double> cells_;
  std::vector<double> faces_;
};

/// Wall inhomogeneity r in f_in = sqrt(mu) z + r. Both vectors have one entry
/// per node; only the incoming half at each wall is read.
struct BoundarySource
{
  std::vector<double> r_minus; // x = -1/2, v1 > 0
  std::vector<double> r_plus;  // x = +1/2, v1 < 0

  static BoundarySource zero(std::size_t nv);
  /// The incoming mass flux of r sqrt(mu) must vanish at both walls.
  void validate(const VelocityGrid& grid) const;
};

/// w(v) = (1 + rho^2 |v|^2)^(beta/2) exp(zeta |v|^2).
struct WeightParams
{
  double beta = 5.0;
  double zeta = 0.0;
  double rho_scale = 1.0;

  double operator()(double speed2) const;
  void validate() const;
};

/// Steps every node through the slab: eps f + v1 f_x + (nu/Kn) f = source, with
/// exact exponential integration per cell. `incoming` holds, per node, the value
/// entering the slab (left face for v1 > 0, right face for v1 < 0).
SlabField sweep(const SlabMesh& mesh, const CollisionOperator& op, std::span<const double> incoming,
                const SlabField& source, double epsilon);

/// Outgoing mass flux z = sum over outgoing nodes of w |v1| sqrt(mu) f at a wall.
double outgoing_flux(const VelocityGrid& grid, std::span<const double> wall_values, WallSide side);

/// Incoming wall values sqrt(mu) z / Phi + r on the incoming half (zero on the
/// other half), with z the outgoing flux of `outgoing` and Phi the discrete
/// half-space flux of mu. Using the discrete Phi makes the wall conserve mass
/// exactly on the grid. `factor` damps the reflected part.
std::vector<double> diffuse_reflect(const VelocityGrid& grid, std::span<const double> outgoing, WallSide side,
                                    std::span<const double> r, double factor = 1.0);

/// Discrete half-space flux of mu (the same at both walls by symmetry).
double discrete_wall_flux(const VelocityGrid& grid);

/// Total mass sum_j dx sum_i w_i sqrt(mu_i) f_ji of the cell averages.
double slab_mass(const VelocityGrid& grid, const SlabMesh& mesh, const SlabField& f);

enum class SteadyMethod
{
  gmres,            // Krylov-accelerated source iteration
  source_iteration, // plain fixed-point iteration
};

std::string to_string(SteadyMethod method);
SteadyMethod steady_method_from_string(const std::string& name);

struct SteadyOptions
{
  /// Penalization. Zero solves the limit problem with the mass fixed to zero.
  double epsilon = 0.0;
  /// Weighted sup-norm target for the fixed-point residual.
  double tol = 1e-10;
  int max_iter = 4000;
  SteadyMethod method = SteadyMethod::gmres;
  int restart = 80;
  /// Multiplies the reflected flux; 1 means no damping.
  double reflection_factor = 1.0;
  WeightParams weight;
  /// Use the OpenMP kernels.
  bool parallel = true;

  void validate() const;
};

struct SteadyReport
{
  std::string method;
  int iterations = 0;
  /// Source iteration: weighted sup-norm of successive differences.
  /// GMRES: 2-norm residual estimates.
  std::vector<double> history;
  /// Mean per-iteration reduction over the tail of the history.
  double contraction_ratio = 0.0;
  /// Weighted sup norm of T(f) - f at exit.
  double residual = 0.0;
  double mass = 0.0;
  double epsilon = 0.0;
};

struct SteadyResult
{
  SlabField f;
  SteadyReport report;
};

/// Fixed point of f -> sweep(incoming = diffuse_reflect(f) , source = K f / Kn + g).
/// Throws DivergenceError when max_iter is exhausted.
SteadyResult solve_steady_linear(const SlabMesh& mesh, const CollisionOperator& op, const SlabField& g,
                                 const BoundarySource& r, const SteadyOptions& options);

/// r for the first-order problem: vartheta_wall (|v|^2/2 - 2) sqrt(mu) on the
/// incoming half of each wall.
BoundarySource f1_boundary(const VelocityGrid& grid, const WallSpec& walls);

/// r for the second-order problem given the first-order solution.
BoundarySource f2_boundary(const VelocityGrid& grid, const WallSpec& walls, const SlabField& f1);

/// (I - P) Gamma(f1, f1) / Kn per cell. The projection only removes the
/// quadrature leakage into the invariants, which is zero in the continuum.
SlabField f2_source(const SlabMesh& mesh, const CollisionOperator& op, const SlabField& f1);

SteadyResult solve_f1(const SlabMesh& mesh, const CollisionOperator& op, const WallSpec& walls,
                      const SteadyOptions& options);
SteadyResult solve_f2(const SlabMesh& mesh, const CollisionOperator& op, const WallSpec& walls,
                      const SlabField& f1, const SteadyOptions& options);

/// Terms of eps |f|^2 + <Lf, f>/Kn + |f|^2_out/2 - |f|^2_in/2 - <f, g> = 0.
/// The |f|^2 integrals use the exact exponential profile inside each cell, so
/// the identity holds to round-off for a converged sweep solution.
struct EnergyBalance
{
  double penalty = 0.0;
  double dissipation = 0.0;
  double outgoing = 0.0;
  double incoming = 0.0;
  double source = 0.0;
  double imbalance = 0.0;
  /// imbalance over the largest term.
  double relative = 0.0;
  /// Same identity with |f|^2 taken from cell averages; defect is O(dx^2).
  double cell_average_imbalance = 0.0;
};

EnergyBalance discrete_energy_balance(const SlabMesh& mesh, const CollisionOperator& op, const SlabField& f,
                                      const SlabField& g, const BoundarySource& r, double epsilon);

} // namespace slabkin
