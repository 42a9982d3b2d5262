#include "slabkin/dense_oracle.hpp"

#include "slabkin/error.hpp"
#include "slabkin/kernels.hpp"

#include <Eigen/SparseLU>

#include <cmath>

namespace slabkin {

namespace {

Eigen::MatrixXd dense_k(const CollisionOperator& op)
{
  if (op.has_dense_k()) return op.k_matrix();
  const auto n = static_cast<Eigen::Index>(op.size());
  Eigen::MatrixXd k(n, n);
  std::vector<double> e(op.size(), 0.0), col(op.size());
  for (Eigen::Index c = 0; c < n; ++c) {
    e[static_cast<std::size_t>(c)] = 1.0;
    op.apply_k(e, col);
    for (Eigen::Index r = 0; r < n; ++r) k(r, c) = col[static_cast<std::size_t>(r)];
    e[static_cast<std::size_t>(c)] = 0.0;
  }
  return k;
}

} // namespace

DenseSystem assemble_dense_system(const SlabMesh& mesh, const CollisionOperator& op, const SlabField& g,
                                  const BoundarySource& r, double epsilon)
{
  mesh.validate();
  require(epsilon >= 0.0, "transport.dense_oracle_solve", "epsilon must be nonnegative");
  const auto& grid = op.grid();
  const std::size_t nv = grid.size();
  const auto n = static_cast<std::size_t>(mesh.n_cells);
  require(n * nv <= dense_oracle_max_unknowns, "transport.dense_oracle_solve",
          "n_cells * Nv exceeds the dense oracle bound of 20000");
  require(g.n_cells() == n && g.nv() == nv, "transport.dense_oracle_solve", "g shape does not match");
  require(r.r_minus.size() == nv && r.r_plus.size() == nv, "transport.dense_oracle_solve",
          "r vectors must have one entry per node");

  DenseSystem sys;
  sys.n_cells = n;
  sys.nv = nv;
  sys.bordered = epsilon == 0.0;
  const std::size_t cells0 = 0;
  const std::size_t faces0 = n * nv;
  const std::size_t unknowns = n * nv + (n + 1) * nv + (sys.bordered ? 1 : 0);
  const std::size_t lambda = unknowns - 1;
  const double dx = mesh.cell_width();
  const double phi_wall = discrete_wall_flux(grid);
  const Eigen::MatrixXd k = dense_k(op);

  std::vector<Eigen::Triplet<double>> t;
  t.reserve(n * nv * (nv + 6) + nv * nv);
  sys.b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(unknowns));
  auto add = [&](std::size_t row, std::size_t col, double v) {
    if (v != 0.0) t.emplace_back(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col), v);
  };

  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < nv; ++i) {
      const double v = grid.v1(i);
      const double speed = std::abs(v);
      const double sigma = epsilon + op.nu()[i] / mesh.knudsen;
      const double tau = sigma * dx / speed;
      const double e = std::exp(-tau);
      const double ph = kernels::phi(tau);
      const std::size_t in_face = v > 0.0 ? j : j + 1;
      const std::size_t out_face = v > 0.0 ? j + 1 : j;
      const std::size_t cell = cells0 + j * nv + i;
      const std::size_t in = faces0 + in_face * nv + i;
      const std::size_t out = faces0 + out_face * nv + i;

      const std::size_t balance = 2 * (j * nv + i);
      add(balance, cell, sigma);
      add(balance, out, speed / dx);
      add(balance, in, -speed / dx);
      for (std::size_t c = 0; c < nv; ++c) {
        add(balance, cells0 + j * nv + c, -k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) / mesh.knudsen);
      }
      if (sys.bordered) add(balance, lambda, -grid.sqrt_mu(i));
      sys.b(static_cast<Eigen::Index>(balance)) = g.cells()[j * nv + i];

      const std::size_t closure = balance + 1;
      const double om = -std::expm1(-tau);
      add(closure, cell, om);
      add(closure, out, -(1.0 - ph));
      add(closure, in, e * (1.0 - ph) - ph * om);
    }
  }

  std::size_t row = 2 * n * nv;
  auto wall_rows = [&](std::size_t face, HalfSpace incoming, HalfSpace outgoing, const std::vector<double>& rv) {
    for (std::size_t i : grid.half(incoming)) {
      add(row, faces0 + face * nv + i, 1.0);
      for (std::size_t kk : grid.half(outgoing)) {
        add(row, faces0 + face * nv + kk,
            -grid.sqrt_mu(i) * grid.weight(kk) * std::abs(grid.v1(kk)) * grid.sqrt_mu(kk) / phi_wall);
      }
      sys.b(static_cast<Eigen::Index>(row)) = rv[i];
      ++row;
    }
  };
  wall_rows(0, HalfSpace::positive, HalfSpace::negative, r.r_minus);
  wall_rows(n, HalfSpace::negative, HalfSpace::positive, r.r_plus);

  if (sys.bordered) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < nv; ++i) add(row, cells0 + j * nv + i, dx * grid.weight(i) * grid.sqrt_mu(i));
    }
    ++row;
  }
  require(row == unknowns, "transport.dense_oracle_solve", "internal row count mismatch");

  sys.a.resize(static_cast<Eigen::Index>(unknowns), static_cast<Eigen::Index>(unknowns));
  sys.a.setFromTriplets(t.begin(), t.end());
  sys.a.makeCompressed();
  return sys;
}

SlabField dense_oracle_solve(const SlabMesh& mesh, const CollisionOperator& op, const SlabField& g,
                             const BoundarySource& r, double epsilon)
{
  const DenseSystem sys = assemble_dense_system(mesh, op, g, r, epsilon);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(sys.a);
  lu.factorize(sys.a);
  require(lu.info() == Eigen::Success, "transport.dense_oracle_solve", "sparse LU factorization failed");
  const Eigen::VectorXd x = lu.solve(sys.b);
  SlabField f(sys.n_cells, sys.nv);
  const std::size_t m = sys.n_cells * sys.nv;
  for (std::size_t k = 0; k < m; ++k) f.cells()[k] = x(static_cast<Eigen::Index>(k));
  for (std::size_t k = 0; k < f.faces().size(); ++k) f.faces()[k] = x(static_cast<Eigen::Index>(m + k));
  return f;
}

double dense_system_residual(const DenseSystem& system, const SlabField& f)
{
  Eigen::VectorXd x = Eigen::VectorXd::Zero(system.a.cols());
  const std::size_t m = system.n_cells * system.nv;
  for (std::size_t k = 0; k < m; ++k) x(static_cast<Eigen::Index>(k)) = f.cells()[k];
  for (std::size_t k = 0; k < f.faces().size(); ++k) x(static_cast<Eigen::Index>(m + k)) = f.faces()[k];
  return (system.a * x - system.b).cwiseAbs().maxCoeff();
}

} // namespace slabkin
