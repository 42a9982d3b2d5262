#pragma once

#include "slabkin/transport.hpp"

#include <Eigen/Sparse>

namespace slabkin {

inline constexpr std::size_t dense_oracle_max_unknowns = 20000;

/// The steady slab problem as one linear system over cell averages and face
/// values, using the same per-cell relations as the sweep: a balance row
/// sigma f + v1 (out - in)/dx - K f/Kn = g and a closure row tying the average
/// to the face values through the exact exponential profile. Wall rows carry
/// the diffuse reflection. For epsilon = 0 the system is bordered with a
/// zero-mass row and a uniform sqrt(mu) source multiplier.
struct DenseSystem
{
  Eigen::SparseMatrix<double> a;
  Eigen::VectorXd b;
  std::size_t n_cells = 0;
  std::size_t nv = 0;
  bool bordered = false;
};

DenseSystem assemble_dense_system(const SlabMesh& mesh, const CollisionOperator& op, const SlabField& g,
                                  const BoundarySource& r, double epsilon);

/// Direct sparse LU solve. Rejects n_cells * nv above dense_oracle_max_unknowns.
SlabField dense_oracle_solve(const SlabMesh& mesh, const CollisionOperator& op, const SlabField& g,
                             const BoundarySource& r, double epsilon);

/// Max-norm of A x - b for a field (the multiplier, if any, taken as zero).
double dense_system_residual(const DenseSystem& system, const SlabField& f);

} // namespace slabkin
