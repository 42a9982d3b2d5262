// Serial vs OpenMP timings of the transport kernels.
#include "slabkin/collision.hpp"
#include "slabkin/kernels.hpp"
#include "slabkin/transport.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

using namespace slabkin;

namespace {

double best_of(int reps, const std::function<void()>& fn)
{
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

} // namespace

int main(int argc, char** argv)
{
  const int n_cells = argc > 1 ? std::atoi(argv[1]) : 128;
  const VelocityGrid grid = build_grid({24, 16, 16}, 7.0, GridKind::gauss);
  const CollisionOperator bgk = assemble(CollisionModel{}, grid);
  const std::size_t nv = grid.size();

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v1(nv), sigma(nv), incoming(nv), source(n_cells * nv), prev(n_cells * nv);
  for (std::size_t i = 0; i < nv; ++i) {
    v1[i] = grid.v1(i);
    sigma[i] = 1.0 + u(rng);
    incoming[i] = u(rng);
  }
  for (auto& s : source) s = u(rng);
  for (auto& s : prev) s = u(rng);
  kernels::SweepProblem p{static_cast<std::size_t>(n_cells), nv, 1.0 / n_cells, v1, sigma, source, incoming};
  std::vector<double> cells(n_cells * nv), faces((n_cells + 1) * nv), kout(n_cells * nv);

  std::printf("threads=%d n_cells=%d nv=%zu\n", omp_get_max_threads(), n_cells, nv);
  const double s1 = best_of(5, [&] { kernels::sweep_serial(p, cells, faces); });
  const double s2 = best_of(5, [&] { kernels::sweep_parallel(p, cells, faces); });
  std::printf("sweep          serial %.3e s  parallel %.3e s  speedup %.2f\n", s1, s2, s1 / s2);
  const double c1 = best_of(5, [&] { kernels::closure_step_serial(p, 20.0, prev, cells, faces); });
  const double c2 = best_of(5, [&] { kernels::closure_step_parallel(p, 20.0, prev, cells, faces); });
  std::printf("closure step   serial %.3e s  parallel %.3e s  speedup %.2f\n", c1, c2, c1 / c2);
  const std::size_t nc = static_cast<std::size_t>(n_cells);
  const double k1 = best_of(5, [&] { kernels::apply_k_cells_serial(bgk, nc, prev, kout); });
  const double k2 = best_of(5, [&] { kernels::apply_k_cells_parallel(bgk, nc, prev, kout); });
  std::printf("apply K (BGK)  serial %.3e s  parallel %.3e s  speedup %.2f\n", k1, k2, k1 / k2);

  // Dense K on a coarse grid.
  CollisionModel hs;
  hs.kind = CollisionKind::hard_sphere;
  const CollisionOperator hard = assemble(hs, build_grid({10, 8, 8}, 7.0, GridKind::gauss));
  std::vector<double> hin(nc * hard.size()), hout(nc * hard.size());
  for (auto& s : hin) s = u(rng);
  const double h1 = best_of(3, [&] { kernels::apply_k_cells_serial(hard, nc, hin, hout); });
  const double h2 = best_of(3, [&] { kernels::apply_k_cells_parallel(hard, nc, hin, hout); });
  std::printf("apply K (HS)   serial %.3e s  parallel %.3e s  speedup %.2f\n", h1, h2, h1 / h2);
  return 0;
}
