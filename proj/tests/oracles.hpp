#pragma once

// Reference values computed independently of the library: fine 1D trapezoid
// sums over a long interval (spectrally accurate for Gaussian integrands that
// decay at both ends), composite Simpson sums for half-line integrals, closed
// forms, and finite differences of the nonlinear BGK operator.

#include "slabkin/velocity.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;
inline const double rho0 = std::sqrt(2.0 * pi);

/// Composite Simpson rule with m (even) panels on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, int m)
{
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int k = 1; k < m; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + h * k);
  return s * h / 3.0;
}

/// E[Z^n] for Z ~ N(0, 1) by a 4097-point trapezoid sum on [-14, 14].
inline double normal_moment(int n)
{
  const int m = 4096;
  const double a = 14.0, h = 2.0 * a / m;
  double s = 0.0;
  for (int k = 0; k <= m; ++k) {
    const double t = -a + h * k;
    const double w = (k == 0 || k == m) ? 0.5 : 1.0;
    s += w * std::pow(t, n) * std::exp(-0.5 * t * t);
  }
  return s * h / std::sqrt(2.0 * pi);
}

/// (n-1)!! for even n, 0 for odd n.
inline double normal_moment_exact(int n)
{
  if (n % 2) return 0.0;
  double p = 1.0;
  for (int k = n - 1; k > 0; k -= 2) p *= k;
  return p;
}

/// Integral of v1^a v2^b v3^c mu(v) over R^3 with mu = exp(-|v|^2/2)/(2 pi).
inline double mu_monomial(int a, int b, int c)
{
  return rho0 * normal_moment(a) * normal_moment(b) * normal_moment(c);
}

/// Integral of poly(v) mu(v), term by term through the 1D oracle.
inline double mu_moment(const slabkin::Polynomial& p)
{
  double s = 0.0;
  for (const auto& [e, coef] : p.terms()) s += coef * mu_monomial(e[0], e[1], e[2]);
  return s;
}

/// Half-space flux of mu_theta: integral over v1 > 0 of v1 mu_theta, by a 1D
/// trapezoid in v1 times the exact transverse Gaussian integral.
inline double half_flux_mu_theta(double theta)
{
  const double s = simpson([theta](double t) { return t * std::exp(-0.5 * t * t / theta); }, 0.0,
                           14.0 * std::sqrt(theta), 20000);
  // transverse: 2 pi theta; prefactor (2 pi theta^2)^-1
  return s * (2.0 * pi * theta) / (2.0 * pi * theta * theta);
}

/// BGK conductivity in the flux normalization: 5 / (2 nu0).
inline double bgk_conductivity(double nu0) { return 2.5 / nu0; }

/// E[1/v1] under the flux measure v1 exp(-v1^2/2) on v1 > 0.
inline double mean_bounce_time() { return std::sqrt(pi / 2.0); }

/// Nonlinear BGK operator nu0 (M[F] - F) with moments taken by the given
/// quadrature nodes and weights.
inline std::vector<double> bgk_q(const slabkin::VelocityGrid& g, std::span<const double> F, double nu0)
{
  double n = 0.0;
  slabkin::Vec3 m{0, 0, 0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    n += g.weight(i) * F[i];
    for (int a = 0; a < 3; ++a) m[a] += g.weight(i) * g.node(i)[a] * F[i];
  }
  slabkin::Vec3 u{m[0] / n, m[1] / n, m[2] / n};
  double e = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double d2 = 0.0;
    for (int a = 0; a < 3; ++a) d2 += (g.node(i)[a] - u[a]) * (g.node(i)[a] - u[a]);
    e += g.weight(i) * d2 * F[i];
  }
  const double theta = e / (3.0 * n);
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double d2 = 0.0;
    for (int a = 0; a < 3; ++a) d2 += (g.node(i)[a] - u[a]) * (g.node(i)[a] - u[a]);
    const double M = n * std::pow(2.0 * pi * theta, -1.5) * std::exp(-0.5 * d2 / theta);
    out[i] = nu0 * (M - F[i]);
  }
  return out;
}

/// Gamma(h, h) from second central differences of Q(mu + e sqrt(mu) h) / sqrt(mu),
/// Richardson-extrapolated over e and e/2 to remove the O(e^2) term.
inline std::vector<double> bgk_gamma_fd(const slabkin::VelocityGrid& g, std::span<const double> h, double nu0,
                                        double e = 2e-3)
{
  const std::size_t n = g.size();
  auto second_difference = [&](double step) {
    std::vector<double> fp(n), fm(n), f0(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double mu = g.sqrt_mu(i) * g.sqrt_mu(i);
      f0[i] = mu;
      fp[i] = mu + step * g.sqrt_mu(i) * h[i];
      fm[i] = mu - step * g.sqrt_mu(i) * h[i];
    }
    const auto qp = bgk_q(g, fp, nu0), qm = bgk_q(g, fm, nu0), q0 = bgk_q(g, f0, nu0);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = (qp[i] + qm[i] - 2.0 * q0[i]) / (2.0 * step * step * g.sqrt_mu(i));
    return out;
  };
  const auto coarse = second_difference(e), fine = second_difference(0.5 * e);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
  return out;
}

} // namespace oracle
