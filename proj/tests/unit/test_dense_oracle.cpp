#include "slabkin/dense_oracle.hpp"
#include "slabkin/error.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace slabkin;

namespace {

// random flux-free wall data and a zero-mass source
void random_instance(const VelocityGrid& g, std::size_t n, std::uint64_t seed, SlabField& src, BoundarySource& r)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  src = SlabField(n, g.size());
  for (auto& v : src.cells()) v = d(rng);
  double mass = 0.0, mm = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < g.size(); ++i) {
      mass += g.weight(i) * g.sqrt_mu(i) * src.at(j, i);
      mm += g.weight(i) * g.sqrt_mu(i) * g.sqrt_mu(i);
    }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < g.size(); ++i) src.at(j, i) -= mass / mm * g.sqrt_mu(i);
  r = BoundarySource::zero(g.size());
  auto fill = [&](std::vector<double>& out, HalfSpace side) {
    double flux = 0.0, norm = 0.0;
    for (std::size_t i : g.half(side)) {
      out[i] = d(rng) * g.sqrt_mu(i) * (1.0 + g.speed2(i));
      flux += g.weight(i) * std::abs(g.v1(i)) * g.sqrt_mu(i) * out[i];
      norm += g.weight(i) * std::abs(g.v1(i)) * g.sqrt_mu(i) * g.sqrt_mu(i);
    }
    for (std::size_t i : g.half(side)) out[i] -= flux / norm * g.sqrt_mu(i);
  };
  fill(r.r_minus, HalfSpace::positive);
  fill(r.r_plus, HalfSpace::negative);
}

} // namespace

TEST_CASE("iterative and direct solves agree on small instances")
{
  const CollisionOperator op = assemble(CollisionModel{}, build_grid({4, 4, 4}, 6.0, GridKind::gauss));
  for (int k = 0; k < 4; ++k) {
    const SlabMesh mesh{4, k % 2 ? 0.2 : 1.0};
    SlabField src;
    BoundarySource r;
    random_instance(op.grid(), 4, 100 + k, src, r);
    for (double eps : {1e-2, 0.0}) {
      SteadyOptions o;
      o.epsilon = eps;
      o.tol = 1e-11; // the gauge-fixed eps = 0 system stalls near 1e-12
      const SteadyResult it = solve_steady_linear(mesh, op, src, r, o);
      const SlabField dir = dense_oracle_solve(mesh, op, src, r, eps);
      double d = 0.0, s = 0.0;
      for (std::size_t q = 0; q < dir.cells().size(); ++q) {
        d = std::max(d, std::abs(it.f.cells()[q] - dir.cells()[q]));
        s = std::max(s, std::abs(dir.cells()[q]));
      }
      CHECK(d <= 1e-8 * s);
      const DenseSystem sys = assemble_dense_system(mesh, op, src, r, eps);
      CHECK(sys.bordered == (eps == 0.0));
      CHECK(dense_system_residual(sys, it.f) <= 1e-8 * s);
    }
  }
}

TEST_CASE("dense oracle refuses large systems")
{
  const CollisionOperator op = assemble(CollisionModel{}, build_grid({24, 16, 16}, 7.0, GridKind::gauss));
  const SlabMesh mesh{8, 1.0};
  const SlabField src(8, op.size());
  CHECK_THROWS_AS(dense_oracle_solve(mesh, op, src, BoundarySource::zero(op.size()), 0.1), InvalidArgument);
}
