#include "oracles.hpp"
#include "slabkin/collision.hpp"
#include "slabkin/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace slabkin;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

double wdot(const VelocityGrid& g, std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.weight(i) * a[i] * b[i];
  return s;
}

std::vector<double> invariant(const VelocityGrid& g, int k)
{
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double p = k == 0 ? 1.0 : k <= 3 ? g.node(i)[k - 1] : 0.5 * (g.speed2(i) - 3.0);
    v[i] = p * g.sqrt_mu(i);
  }
  return v;
}

double sup(std::span<const double> v)
{
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

const CollisionOperator& hard_sphere_op()
{
  static const CollisionOperator op = [] {
    CollisionModel m;
    m.kind = CollisionKind::hard_sphere;
    m.quadratic_quadrature = true;
    return assemble(m, build_grid({8, 8, 8}, 6.0, GridKind::gauss));
  }();
  return op;
}

// E|v - Z| for Z ~ N(0, I) by a 2D trapezoid in (z along v, transverse radius).
double mean_distance_oracle(double s)
{
  const auto inner = [s](double z) {
    return oracle::simpson(
        [s, z](double r) { return std::sqrt((s - z) * (s - z) + r * r) * r * std::exp(-0.5 * r * r); }, 0.0, 10.0,
        800);
  };
  return oracle::simpson([&](double z) { return inner(z) * std::exp(-0.5 * z * z); }, -10.0, 10.0, 800) /
         std::sqrt(2.0 * oracle::pi);
}

} // namespace

TEST_CASE("sphere rule integrates low-order angular functions")
{
  const SphereRule r = sphere_rule(8);
  double w = 0.0, ac = 0.0, c2 = 0.0;
  for (std::size_t k = 0; k < r.weights.size(); ++k) {
    w += r.weights[k];
    ac += r.weights[k] * std::abs(r.directions[k][2]);
    c2 += r.weights[k] * r.directions[k][0] * r.directions[k][0];
  }
  CHECK(w == doctest::Approx(4.0 * oracle::pi));
  CHECK(ac == doctest::Approx(2.0 * oracle::pi));
  CHECK(c2 == doctest::Approx(4.0 * oracle::pi / 3.0));
}

TEST_CASE("collision model names and validation")
{
  CHECK(collision_kind_from_string("bgk-linearized") == CollisionKind::bgk_linearized);
  CHECK(collision_kind_from_string("hard-sphere") == CollisionKind::hard_sphere);
  CHECK_THROWS_AS(collision_kind_from_string("maxwell"), InvalidArgument);
  CollisionModel m;
  m.nu0 = -1.0;
  CHECK_THROWS_AS(m.validate(), InvalidArgument);
  CollisionModel hs;
  hs.kind = CollisionKind::hard_sphere;
  hs.angular_nodes = 4;
  CHECK_THROWS_AS(hs.validate(), InvalidArgument);
  CollisionModel a, b;
  b.nu0 = 2.0;
  CHECK(a.hash() != b.hash());
}

TEST_CASE("BGK operator properties")
{
  const VelocityGrid g = build_grid({12, 10, 10}, 7.0, GridKind::gauss);
  const CollisionOperator op = assemble(CollisionModel{}, g);
  for (int k = 0; k < 5; ++k) CHECK(sup(apply_L(op, invariant(g, k))) <= tol_null_bgk);
  const auto f = random_vector(g.size(), 1), h = random_vector(g.size(), 2);
  const auto Kf = apply_K(op, f), Kh = apply_K(op, h);
  CHECK(std::abs(wdot(g, Kf, h) - wdot(g, f, Kh)) <= tol_sym * std::abs(wdot(g, Kf, h)) + 1e-12);
  const auto pf = project_P(op, f).pf;
  const auto ppf = project_P(op, pf).pf;
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(ppf[i] - pf[i]) <= 1e-10);
  CHECK(spectral_gap(op) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("projection coordinates recover the raw basis")
{
  const VelocityGrid g = build_grid({12, 10, 10}, 7.0, GridKind::gauss);
  const CollisionOperator op = assemble(CollisionModel{}, g);
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& v = g.node(i);
    f[i] = (0.3 - 0.7 * v[0] + 0.2 * v[2] + 1.1 * 0.5 * (g.speed2(i) - 3.0)) * g.sqrt_mu(i);
  }
  const Projection p = project_P(op, f);
  CHECK(p.a == doctest::Approx(0.3));
  CHECK(p.b[0] == doctest::Approx(-0.7));
  CHECK(std::abs(p.b[1]) < 1e-12);
  CHECK(p.b[2] == doctest::Approx(0.2));
  CHECK(p.c == doctest::Approx(1.1));
  // the orthonormal basis is orthonormal under the grid weights
  const auto& q = op.p_basis();
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) s += g.weight(i) * q(i, a) * q(i, b);
      CHECK(std::abs(s - (a == b ? 1.0 : 0.0)) < 1e-13);
    }
}

TEST_CASE("BGK Gamma matches finite differences of the nonlinear operator")
{
  const VelocityGrid g = build_grid({12, 10, 10}, 7.0, GridKind::gauss);
  const CollisionOperator op = assemble(CollisionModel{}, g);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d;
  std::vector<double> h(g.size());
  const double c[5] = {d(rng), d(rng), d(rng), d(rng), d(rng)};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& v = g.node(i);
    // a smooth non-hydrodynamic perturbation plus invariant parts
    h[i] = (c[0] + c[1] * v[0] + c[2] * v[1] * v[2] + c[3] * g.speed2(i) + c[4] * v[0] * v[0]) * g.sqrt_mu(i);
  }
  const auto gamma = apply_Gamma(op, h, h);
  const auto fd = oracle::bgk_gamma_fd(g, h, 1.0);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(gamma[i] - fd[i]));
  // the oracle is limited by cancellation in the differences, near 1e-8
  CHECK(err <= 1e-7 * sup(fd));
  // conservation holds up to the quadrature tail cut
  for (int k = 0; k < 5; ++k) CHECK(std::abs(wdot(g, gamma, invariant(g, k))) < tol_quad * sup(fd));
  // polarization: symmetric and bilinear
  const auto h2 = random_vector(g.size(), 9);
  const auto ab = apply_Gamma(op, h, h2), ba = apply_Gamma(op, h2, h);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(ab[i] == doctest::Approx(ba[i]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("hard-sphere collision frequency")
{
  for (double s : {0.0, 0.5, 1.3, 3.0, 6.0}) {
    CHECK(hard_sphere_nu(s) == doctest::Approx(2.0 * oracle::pi * oracle::rho0 * mean_distance_oracle(s)).epsilon(1e-7));
  }
  // monotone increasing with linear growth
  CHECK(hard_sphere_nu(5.0) > hard_sphere_nu(1.0));
  CHECK(hard_sphere_nu(40.0) / 40.0 == doctest::Approx(2.0 * oracle::pi * oracle::rho0).epsilon(1e-3));
}

TEST_CASE("hard-sphere operator properties")
{
  const CollisionOperator& op = hard_sphere_op();
  const VelocityGrid& g = op.grid();
  REQUIRE(op.has_dense_k());
  for (int k = 0; k < 5; ++k) CHECK(sup(apply_L(op, invariant(g, k))) <= tol_null_hard_sphere);
  const auto f = random_vector(g.size(), 3), h = random_vector(g.size(), 4);
  const auto Lf = apply_L(op, f), Lh = apply_L(op, h);
  CHECK(std::abs(wdot(g, Lf, h) - wdot(g, f, Lh)) <= 1e-6 * std::sqrt(wdot(g, Lf, Lf) * wdot(g, h, h)));
  const double gap = spectral_gap(op);
  CHECK(gap > 0.0);
  CHECK(gap < 1.0);
  // L is nonnegative
  CHECK(wdot(g, Lf, f) >= 0.0);
}

TEST_CASE("hard-sphere Gamma is consistent with the assembled L")
{
  // Gamma(sqrt(mu), f) + Gamma(f, sqrt(mu)) = -L f. The quadrature interpolates
  // multilinearly between Gauss nodes, so agreement is first order in the node
  // spacing: about 9% at this size, 6% at Nv = 2304.
  const CollisionOperator& op = hard_sphere_op();
  const VelocityGrid& g = op.grid();
  const auto sm = invariant(g, 0);
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = g.v1(i) * g.node(i)[1] * g.sqrt_mu(i);
  const auto a = apply_Gamma(op, sm, f), b = apply_Gamma(op, f, sm), Lf = apply_L(op, f);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(a[i] + b[i] + Lf[i]));
  CHECK(err < 0.15 * sup(Lf));
  // Q(mu, mu) = 0 up to the same interpolation error
  const auto gmm = apply_Gamma(op, sm, sm);
  double scale = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) scale = std::max(scale, op.nu()[i] * g.sqrt_mu(i));
  CHECK(sup(gmm) < 0.1 * scale);
  CollisionModel no_quad;
  no_quad.kind = CollisionKind::hard_sphere;
  const CollisionOperator plain(no_quad, g, op.nu(), op.k_matrix());
  CHECK_THROWS_AS(apply_Gamma(plain, sm, sm), InvalidArgument);
}
