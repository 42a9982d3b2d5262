#include "oracles.hpp"
#include "slabkin/diagnostics.hpp"
#include "slabkin/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace slabkin;

namespace {

const CollisionOperator& small_bgk()
{
  static const CollisionOperator op = assemble(CollisionModel{}, build_grid({12, 8, 8}, 7.0, GridKind::gauss));
  return op;
}

std::vector<double> centers(int n)
{
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) x[j] = SlabMesh{n, 1.0}.center(j);
  return x;
}

} // namespace

TEST_CASE("linear fit of a line is exact")
{
  const auto x = centers(40);
  std::vector<double> y;
  for (double v : x) y.push_back(0.3 - 2.0 * v);
  const LinearityReport r = linearity_test(x, y, -0.3, 0.3);
  CHECK(r.slope == doctest::Approx(-2.0));
  CHECK(r.intercept == doctest::Approx(0.3));
  CHECK(r.max_residual < 1e-14);
  CHECK(r.points == 24);
}

TEST_CASE("least-squares line of x^2 over the whole slab")
{
  // continuum fit is x^2 - 1/12, so the worst residual is 1/4 - 1/12 = 1/6 at the ends
  std::vector<double> x, y;
  for (int j = 0; j < 20000; ++j) {
    x.push_back(-0.5 + (j + 0.5) / 20000.0);
    y.push_back(x.back() * x.back());
  }
  const LinearityReport r = linearity_test(x, y, -0.5, 0.5);
  CHECK(r.intercept == doctest::Approx(1.0 / 12.0).epsilon(1e-6));
  // the outermost sample sits h/2 inside the wall, which costs about h/2 absolute
  CHECK(r.max_residual == doctest::Approx(1.0 / 6.0).epsilon(1e-4));
}

TEST_CASE("linear fit of an even function")
{
  // symmetric samples: slope 0, intercept mean(x^2)
  const auto x = centers(40);
  std::vector<double> y;
  for (double v : x) y.push_back(v * v);
  const LinearityReport r = linearity_test(x, y, -0.3, 0.3);
  double mean = 0.0, lo = 1e9, hi = -1e9;
  int n = 0;
  for (double v : x)
    if (std::abs(v) <= 0.3 + 1e-12) {
      mean += v * v;
      lo = std::min(lo, v * v);
      hi = std::max(hi, v * v);
      ++n;
    }
  mean /= n;
  CHECK(std::abs(r.slope) < 1e-14);
  CHECK(r.intercept == doctest::Approx(mean));
  CHECK(r.max_residual == doctest::Approx(std::max(mean - lo, hi - mean)));
  CHECK(r.rel_residual == doctest::Approx(r.max_residual / (hi - lo)));
  CHECK_THROWS_AS(linearity_test(x, y, -0.01, 0.01), InvalidArgument);
}

TEST_CASE("flux constancy skips the wall cells")
{
  CHECK(flux_constancy(std::vector<double>{9.0, 2.0, 2.0, 2.0, -4.0}) == 0.0);
  CHECK(flux_constancy(std::vector<double>{0.0, 1.0, 1.1, 0.9, 0.0}) == doctest::Approx(0.1));
}

TEST_CASE("moments of the equilibrium")
{
  // mu_theta / mu is not polynomial, so the grid rule is only accurate to tol_quad here
  const VelocityGrid g = default_grid();
  const SlabMesh mesh{3, 1.0};
  std::vector<double> F(3 * g.size());
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < g.size(); ++i) F[j * g.size() + i] = (1.0 + j) * maxwellian(1.0 + 0.1 * j, g.speed2(i));
  const MomentProfile p = moments(g, mesh, F);
  for (std::size_t j = 0; j < 3; ++j) {
    const double th = 1.0 + 0.1 * j;
    // mass of the flux-normalized mu_theta is sqrt(2 pi / theta)
    CHECK(p.rho[j] == doctest::Approx((1.0 + j) * std::sqrt(2.0 * oracle::pi / th)).epsilon(tol_quad));
    CHECK(std::abs(p.u[j][0]) < 1e-14);
    CHECK(p.theta[j] == doctest::Approx(th).epsilon(tol_quad));
    CHECK(std::abs(p.q[j][0]) < 1e-13);
  }
}

TEST_CASE("theta1 reads the temperature coefficient")
{
  const auto& g = small_bgk().grid();
  SlabField f(2, g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    f.at(0, i) = 0.8 * (0.5 * g.speed2(i) - 2.0) * g.sqrt_mu(i);
    f.at(1, i) = 3.0 * g.sqrt_mu(i) + 0.5 * g.v1(i) * g.sqrt_mu(i);
  }
  const auto th = theta1_profile(g, f);
  // tail cut at v_max = 7 leaves about 1e-9
  CHECK(th[0] == doctest::Approx(0.8).epsilon(1e-8));
  CHECK(std::abs(th[1]) < 1e-8);
}

TEST_CASE("conductivity extrapolation")
{
  std::vector<double> kn{0.1, 0.05, 0.02, 0.01}, kappa;
  for (double k : kn) kappa.push_back(2.5 + 3.0 * k);
  const ConductivityEstimate e = conductivity_estimate(kn, kappa);
  CHECK(e.extrapolated == doctest::Approx(2.5).epsilon(1e-12));
  CHECK_FALSE(e.non_monotone);
  CHECK(e.final_change == doctest::Approx(0.03 / 2.53));
  CHECK_THROWS_AS(conductivity_estimate({0.3, 0.1, 0.01}, {1, 1, 1}), InvalidArgument);
  CHECK_THROWS_AS(conductivity_estimate({0.1, 0.05, 0.02}, {1, 1, 1}), InvalidArgument);
  const ConductivityEstimate z = conductivity_estimate({0.1, 0.05, 0.01}, {2.0, 2.2, 2.1});
  CHECK(z.non_monotone);
}

TEST_CASE("kappa estimate approaches the BGK conductivity")
{
  const auto& op = small_bgk();
  const SlabMesh mesh{48, 0.05};
  const SteadyResult r = solve_f1(mesh, op, WallSpec{0.05, -1.0, 1.0}, SteadyOptions{});
  const double k = kappa_hat(mesh, op.grid(), r.f);
  CHECK(k == doctest::Approx(oracle::bgk_conductivity(1.0)).epsilon(0.08));
  const MomentProfile p = perturbation_profile(mesh, op, r.f, 0.05);
  CHECK(p.size() == 48u);
  CHECK(p.theta1 == theta1_profile(op.grid(), r.f));
  // theta = 1 + delta theta1 up to O(delta^2)
  for (std::size_t j = 0; j < 48; ++j) CHECK(p.theta[j] == doctest::Approx(1.0 + 0.05 * p.theta1[j]).epsilon(5e-3));
}

TEST_CASE("weighted sup norm")
{
  const auto& g = small_bgk().grid();
  std::vector<double> f(g.size(), 0.0);
  f[5] = -2.0;
  WeightParams w;
  CHECK(weighted_sup_norm(g, f, w) == doctest::Approx(2.0 * std::pow(1.0 + g.speed2(5), 2.5)));
}
