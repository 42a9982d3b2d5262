#include "slabkin/diagnostics.hpp"
#include "slabkin/dynamics.hpp"
#include "slabkin/error.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace slabkin;

namespace {

const CollisionOperator& small_bgk()
{
  static const CollisionOperator op = assemble(CollisionModel{}, build_grid({8, 6, 6}, 6.0, GridKind::gauss));
  return op;
}

} // namespace

TEST_CASE("steady solution is a fixed point of the linear step")
{
  const auto& op = small_bgk();
  const SlabMesh mesh{12, 0.5};
  const WallSpec walls{0.05, -1.0, 1.0};
  SteadyOptions o;
  o.tol = 1e-13;
  const SteadyResult fs = solve_f1(mesh, op, walls, o);
  const SlabField g(12, op.size());
  const SlabField next = step_linear(mesh, op, fs.f, g, f1_boundary(op.grid(), walls), 0.1);
  double d = 0.0, s = 0.0;
  for (std::size_t k = 0; k < next.cells().size(); ++k) {
    d = std::max(d, std::abs(next.cells()[k] - fs.f.cells()[k]));
    s = std::max(s, std::abs(fs.f.cells()[k]));
  }
  CHECK(d <= 1e-10 * s);
}

TEST_CASE("linear step conserves mass")
{
  const auto& op = small_bgk();
  const SlabMesh mesh{10, 1.0};
  const SlabField zero(10, op.size());
  const SlabField f0 = perturb_state(mesh, op, zero, 1.0, 11);
  CHECK(std::abs(slab_mass(op.grid(), mesh, f0)) < 1e-13);
  SlabField f = f0;
  for (int s = 0; s < 5; ++s) f = step_linear(mesh, op, f, zero, BoundarySource::zero(op.size()), 0.05);
  CHECK(std::abs(slab_mass(op.grid(), mesh, f)) < 1e-12);
}

TEST_CASE("perturbation relaxes exponentially")
{
  const auto& op = small_bgk();
  const SlabMesh mesh{12, 1.0};
  const WallSpec walls{0.05, -1.0, 1.0};
  const SteadyResult fs = solve_f1(mesh, op, walls, SteadyOptions{});
  const SlabField f0 = perturb_state(mesh, op, fs.f, 0.5, 3);
  const RelaxResult r = relax_to_steady(mesh, op, walls, f0, 0.1, 8.0, SteadyOptions{}, fs);
  REQUIRE(r.lambda.has_value());
  CHECK(*r.lambda > 0.0);
  CHECK_FALSE(r.non_decay);
  CHECK(r.series.sup_norms.back() < 0.1 * r.series.sup_norms.front());
  CHECK(r.series.times.size() == 81u);
  for (std::size_t k = 1; k < r.series.l2_norms.size(); ++k) CHECK(r.series.l2_norms[k] <= r.series.l2_norms[k - 1] * (1 + 1e-12));
}

TEST_CASE("decay fit recovers a known rate")
{
  std::vector<double> t, v;
  for (int k = 0; k <= 40; ++k) {
    t.push_back(0.25 * k);
    v.push_back(3.0 * std::exp(-0.8 * t.back()));
  }
  const auto lam = fit_decay_rate(t, v, 5.0, 0.0);
  REQUIRE(lam.has_value());
  CHECK(*lam == doctest::Approx(0.8).epsilon(1e-12));
  CHECK_FALSE(fit_decay_rate(t, v, 20.0, 0.0).has_value());
}

TEST_CASE("local maxwellian keeps the cell mass")
{
  const auto& g = small_bgk().grid();
  std::vector<double> F(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) F[i] = std::exp(-0.4 * g.speed2(i) + 0.3 * g.v1(i));
  const auto M = local_maxwellian(g, F);
  double mf = 0.0, mm = 0.0, pf = 0.0, pm = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    mf += g.weight(i) * F[i];
    mm += g.weight(i) * M[i];
    pf += g.weight(i) * g.v1(i) * F[i];
    pm += g.weight(i) * g.v1(i) * M[i];
    CHECK(M[i] >= 0.0);
  }
  CHECK(mm == doctest::Approx(mf).epsilon(1e-13));
  CHECK(pm == doctest::Approx(pf).epsilon(1e-3));
}

TEST_CASE("positive scheme keeps nonnegative states nonnegative")
{
  const auto& op = small_bgk();
  const SlabMesh mesh{6, 0.3};
  const WallSpec walls{0.2, -1.0, 1.0};
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    SlabField F(6, op.size());
    for (auto& v : F.cells()) v = trial % 3 == 0 ? (u(rng) < 0.7 ? 0.0 : u(rng)) : u(rng);
    const SlabField next = step_nonlinear_positive(mesh, op, F, walls, 0.01 + u(rng));
    for (double v : next.cells()) REQUIRE(v >= 0.0);
    for (double v : next.faces()) REQUIRE(v >= 0.0);
  }
  SlabField bad(6, op.size());
  bad.cells()[0] = -1e-3;
  CHECK_THROWS_AS(step_nonlinear_positive(mesh, op, bad, walls, 0.1), InvalidArgument);
}

TEST_CASE("positive scheme conserves mass through the walls")
{
  const auto& op = small_bgk();
  const auto& g = op.grid();
  const SlabMesh mesh{8, 0.5};
  const WallSpec walls{0.1, -1.0, 1.0};
  SlabField F(8, op.size());
  for (std::size_t j = 0; j < 8; ++j)
    for (std::size_t i = 0; i < g.size(); ++i) F.at(j, i) = (1.0 + 0.1 * j) * g.sqrt_mu(i) * g.sqrt_mu(i);
  auto mass = [&](const SlabField& s) {
    double m = 0.0;
    for (std::size_t j = 0; j < 8; ++j)
      for (std::size_t i = 0; i < g.size(); ++i) m += g.weight(i) * s.at(j, i);
    return m;
  };
  const SlabField next = step_nonlinear_positive(mesh, op, F, walls, 0.05);
  // balance: no net flux across the walls for diffuse reflection
  CHECK(mass(next) == doctest::Approx(mass(F)).epsilon(1e-12));
}
