#include "slabkin/diagnostics.hpp"

#include "slabkin/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace slabkin {

namespace {

const double kRho0 = std::sqrt(2.0 * std::numbers::pi);

/// Face values averaged to cell j.
void face_average(const SlabField& f, std::size_t j, std::vector<double>& out)
{
  const auto lo = f.face(j);
  const auto hi = f.face(j + 1);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (lo[i] + hi[i]);
}

void cell_moments(const VelocityGrid& grid, std::span<const double> F, std::span<const double> flux_F,
                  MomentProfile& p, std::size_t j)
{
  const std::size_t nv = grid.size();
  double rho = 0.0;
  double rho_f = 0.0;
  Vec3 m{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < nv; ++i) {
    rho += grid.weight(i) * F[i];
    rho_f += grid.weight(i) * flux_F[i];
    for (int a = 0; a < 3; ++a) m[a] += grid.weight(i) * grid.node(i)[a] * flux_F[i];
  }
  if (!(rho > 0.0) || !(rho_f > 0.0)) {
    throw InvalidArgument("diagnostics.moments", "nonpositive density in cell " + std::to_string(j));
  }
  const Vec3 u{m[0] / rho_f, m[1] / rho_f, m[2] / rho_f};
  double e = 0.0;
  Vec3 q{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < nv; ++i) {
    const auto& v = grid.node(i);
    const Vec3 d{v[0] - u[0], v[1] - u[1], v[2] - u[2]};
    const double d2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    e += grid.weight(i) * d2 * F[i];
    for (int a = 0; a < 3; ++a) q[a] += 0.5 * grid.weight(i) * d[a] * d2 * flux_F[i];
  }
  p.rho[j] = rho;
  p.u[j] = u;
  p.theta[j] = e / (3.0 * rho);
  p.q[j] = q;
}

} // namespace

void MomentProfile::resize(std::size_t n)
{
  x.assign(n, 0.0);
  rho.assign(n, 0.0);
  u.assign(n, Vec3{0.0, 0.0, 0.0});
  theta.assign(n, 0.0);
  q.assign(n, Vec3{0.0, 0.0, 0.0});
  a.assign(n, 0.0);
  b.assign(n, Vec3{0.0, 0.0, 0.0});
  c.assign(n, 0.0);
  theta1.assign(n, 0.0);
}

MomentProfile moments(const VelocityGrid& grid, const SlabMesh& mesh, std::span<const double> F)
{
  const std::size_t nv = grid.size();
  const auto n = static_cast<std::size_t>(mesh.n_cells);
  require(F.size() == n * nv, "diagnostics.moments", "F must have n_cells * Nv entries");
  MomentProfile p;
  p.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    p.x[j] = mesh.center(static_cast<int>(j));
    const auto cell = F.subspan(j * nv, nv);
    for (double v : cell) require(std::isfinite(v), "diagnostics.moments", "F must be finite");
    cell_moments(grid, cell, cell, p, j);
  }
  return p;
}

MomentProfile perturbation_profile(const SlabMesh& mesh, const CollisionOperator& op, const SlabField& f,
                                   double delta)
{
  const auto& grid = op.grid();
  const std::size_t nv = grid.size();
  const std::size_t n = f.n_cells();
  MomentProfile p;
  p.resize(n);
  std::vector<double> F(nv), flux_F(nv), avg(nv);
  const auto th1 = theta1_profile(grid, f);
  for (std::size_t j = 0; j < n; ++j) {
    p.x[j] = mesh.center(static_cast<int>(j));
    face_average(f, j, avg);
    for (std::size_t i = 0; i < nv; ++i) {
      const double s = grid.sqrt_mu(i);
      F[i] = s * s + delta * s * f.at(j, i);
      flux_F[i] = s * s + delta * s * avg[i];
    }
    cell_moments(grid, F, flux_F, p, j);
    const Projection pr = project_P(op, f.cell(j));
    p.a[j] = pr.a;
    p.b[j] = pr.b;
    p.c[j] = pr.c;
    p.theta1[j] = th1[j];
  }
  return p;
}

std::vector<double> theta1_profile(const VelocityGrid& grid, const SlabField& f1)
{
  std::vector<double> out(f1.n_cells());
  for (std::size_t j = 0; j < f1.n_cells(); ++j) {
    const auto c = f1.cell(j);
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) s += grid.weight(i) * (grid.speed2(i) - 3.0) * grid.sqrt_mu(i) * c[i];
    out[j] = s / (3.0 * kRho0);
  }
  return out;
}

std::vector<double> heat_flux_linear(const VelocityGrid& grid, const SlabField& f1)
{
  std::vector<double> out(f1.n_cells());
  std::vector<double> avg(grid.size());
  for (std::size_t j = 0; j < f1.n_cells(); ++j) {
    face_average(f1, j, avg);
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      s += grid.weight(i) * grid.v1(i) * (0.5 * grid.speed2(i) - 2.5) * grid.sqrt_mu(i) * avg[i];
    }
    out[j] = s;
  }
  return out;
}

std::vector<double> mass_flux_linear(const VelocityGrid& grid, const SlabField& f1)
{
  std::vector<double> out(f1.n_cells());
  std::vector<double> avg(grid.size());
  for (std::size_t j = 0; j < f1.n_cells(); ++j) {
    face_average(f1, j, avg);
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) s += grid.weight(i) * grid.v1(i) * grid.sqrt_mu(i) * avg[i];
    out[j] = s;
  }
  return out;
}

LinearityReport linearity_test(const std::vector<double>& x, const std::vector<double>& values, double lo,
                               double hi)
{
  require(x.size() == values.size(), "diagnostics.linearity_test", "x and values differ in length");
  require(lo < hi && lo >= -0.5 - 1e-12 && hi <= 0.5 + 1e-12, "diagnostics.linearity_test",
          "fit window must be a sub-interval of [-1/2, 1/2]");
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] >= lo - 1e-12 && x[k] <= hi + 1e-12) idx.push_back(k);
  }
  require(idx.size() >= 4, "diagnostics.linearity_test", "fit window must contain at least 4 cells");
  const double n = static_cast<double>(idx.size());
  double mx = 0.0, my = 0.0;
  for (auto k : idx) {
    mx += x[k];
    my += values[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (auto k : idx) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (values[k] - my);
  }
  LinearityReport r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double vmin = values[idx.front()], vmax = vmin;
  for (auto k : idx) {
    r.max_residual = std::max(r.max_residual, std::abs(values[k] - (r.intercept + r.slope * x[k])));
    vmin = std::min(vmin, values[k]);
    vmax = std::max(vmax, values[k]);
  }
  const double range = vmax - vmin;
  r.rel_residual = range > relative_floor ? r.max_residual / range : r.max_residual;
  r.window_lo = lo;
  r.window_hi = hi;
  r.points = static_cast<int>(idx.size());
  return r;
}

double flux_constancy(const std::vector<double>& q)
{
  if (q.empty()) return 0.0;
  // Interior cells only: the first and last cell touch the walls.
  const std::size_t lo = q.size() > 2 ? 1 : 0;
  const std::size_t hi = q.size() > 2 ? q.size() - 1 : q.size();
  double mean = 0.0;
  for (std::size_t k = lo; k < hi; ++k) mean += q[k];
  mean /= static_cast<double>(hi - lo);
  double dev = 0.0;
  for (std::size_t k = lo; k < hi; ++k) dev = std::max(dev, std::abs(q[k] - mean));
  return std::abs(mean) > relative_floor ? dev / std::abs(mean) : dev;
}

double flux_constancy(const MomentProfile& profile)
{
  std::vector<double> q1(profile.size());
  for (std::size_t k = 0; k < q1.size(); ++k) q1[k] = profile.q[k][0];
  return flux_constancy(q1);
}

double weighted_sup_norm(const VelocityGrid& grid, std::span<const double> f, const WeightParams& w)
{
  w.validate();
  require(f.size() % grid.size() == 0, "diagnostics.weighted_sup_norm", "field length is not a multiple of Nv");
  std::vector<double> wt(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) wt[i] = w(grid.speed2(i));
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) s = std::max(s, wt[k % grid.size()] * std::abs(f[k]));
  return s;
}

double kappa_hat(const SlabMesh& mesh, const VelocityGrid& grid, const SlabField& f1)
{
  const auto th = theta1_profile(grid, f1);
  std::vector<double> x(th.size());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = mesh.center(static_cast<int>(j));
  const LinearityReport fit = linearity_test(x, th, -interior_window, interior_window);
  const auto q = heat_flux_linear(grid, f1);
  double mean = 0.0;
  for (double v : q) mean += v;
  mean /= static_cast<double>(q.size());
  require(std::abs(fit.slope) > relative_floor, "diagnostics.kappa_hat", "temperature gradient vanishes");
  return -mean / (kRho0 * mesh.knudsen * fit.slope);
}

ConductivityEstimate conductivity_estimate(std::vector<double> knudsen, std::vector<double> kappa)
{
  require(knudsen.size() == kappa.size(), "diagnostics.conductivity_estimate", "length mismatch");
  require(knudsen.size() >= 3, "diagnostics.conductivity_estimate", "need at least three Kn values");
  std::vector<std::size_t> order(knudsen.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return knudsen[a] > knudsen[b]; });
  ConductivityEstimate est;
  for (auto k : order) {
    est.knudsen.push_back(knudsen[k]);
    est.kappa.push_back(kappa[k]);
  }
  const auto n = est.knudsen.size();
  require(est.knudsen.front() < 0.2, "diagnostics.conductivity_estimate", "Kn values must lie below 0.2");
  require(est.knudsen.front() >= 10.0 * est.knudsen.back() * (1.0 - 1e-12), "diagnostics.conductivity_estimate",
          "Kn values must span a decade");
  int sign = 0;
  for (std::size_t k = 1; k < n; ++k) {
    const double change = std::abs(est.kappa[k] - est.kappa[k - 1]) / std::abs(est.kappa[k]);
    est.max_successive_change = std::max(est.max_successive_change, change);
    const int s = est.kappa[k] > est.kappa[k - 1] ? 1 : (est.kappa[k] < est.kappa[k - 1] ? -1 : 0);
    if (s != 0 && sign != 0 && s != sign) est.non_monotone = true;
    if (s != 0) sign = s;
  }
  est.final_change = std::abs(est.kappa[n - 1] - est.kappa[n - 2]) / std::abs(est.kappa[n - 1]);
  const double k1 = est.knudsen[n - 2], k2 = est.knudsen[n - 1];
  const double y1 = est.kappa[n - 2], y2 = est.kappa[n - 1];
  est.extrapolated = y2 - k2 * (y1 - y2) / (k1 - k2);
  return est;
}

} // namespace slabkin
