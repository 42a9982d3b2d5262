#include "slabkin/dynamics.hpp"

#include "slabkin/error.hpp"
#include "slabkin/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace slabkin {

namespace {

std::vector<double> node_v1(const VelocityGrid& grid)
{
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = grid.v1(i);
  return v;
}

/// Wall coupling for an affine sweep. `run(zl, zr, homogeneous, out)` sweeps
/// with incoming shape profiles scaled by zl, zr and returns the field; the
/// outgoing fluxes of the result must be affine in (zl, zr).
template <typename Run, typename Flux>
SlabField solve_walls(Run run, Flux flux_of)
{
  SlabField base = run(0.0, 0.0, false);
  const auto [a0, b0] = flux_of(base);
  const SlabField left_unit = run(1.0, 0.0, true);
  const SlabField right_unit = run(0.0, 1.0, true);
  // outgoing_left = a0 + c_rl zr, outgoing_right = b0 + c_lr zl
  const double c_lr = flux_of(left_unit).second;
  const double c_rl = flux_of(right_unit).first;
  const double det = 1.0 - c_lr * c_rl;
  require(det > 0.0, "dynamics", "wall coupling is singular");
  const double zl = (a0 + c_rl * b0) / det;
  const double zr = (b0 + c_lr * a0) / det;
  SlabField out = run(zl, zr, false);
  return out;
}

} // namespace

SlabField step_linear(const SlabMesh& mesh, const CollisionOperator& op, const SlabField& f, const SlabField& g,
                      const BoundarySource& r, double dt, double epsilon, bool parallel)
{
  mesh.validate();
  require(dt > 0.0, "dynamics.step_linear", "dt must be positive");
  require(epsilon >= 0.0, "dynamics.step_linear", "epsilon must be nonnegative");
  const auto& grid = op.grid();
  const std::size_t nv = grid.size();
  const auto n = static_cast<std::size_t>(mesh.n_cells);
  require(f.n_cells() == n && f.nv() == nv && g.n_cells() == n && g.nv() == nv, "dynamics.step_linear",
          "field shapes do not match mesh and grid");

  std::vector<double> sigma(nv);
  for (std::size_t i = 0; i < nv; ++i) sigma[i] = epsilon + op.nu()[i] / mesh.knudsen;
  const auto v1 = node_v1(grid);
  std::vector<double> source(n * nv);
  std::vector<double> kf(n * nv);
  if (parallel) {
    kernels::apply_k_cells_parallel(op, n, f.cells(), kf);
  } else {
    kernels::apply_k_cells_serial(op, n, f.cells(), kf);
  }
  for (std::size_t k = 0; k < n * nv; ++k) source[k] = kf[k] / mesh.knudsen + g.cells()[k];
  const std::vector<double> zeros(n * nv, 0.0);
  const double phi_wall = discrete_wall_flux(grid);
  const double inv_dt = 1.0 / dt;

  auto run = [&](double zl, double zr, bool homogeneous) {
    std::vector<double> incoming(nv);
    for (std::size_t i = 0; i < nv; ++i) {
      const bool left = v1[i] > 0.0;
      const double z = left ? zl : zr;
      const double rr = homogeneous ? 0.0 : (left ? r.r_minus[i] : r.r_plus[i]);
      incoming[i] = grid.sqrt_mu(i) * z / phi_wall + rr;
    }
    SlabField out(n, nv);
    const std::span<const double> src = homogeneous ? std::span<const double>(zeros) : std::span<const double>(source);
    const std::span<const double> prev = homogeneous ? std::span<const double>(zeros) : std::span<const double>(f.cells());
    kernels::SweepProblem p{n, nv, mesh.cell_width(), v1, sigma, src, incoming};
    if (parallel) {
      kernels::closure_step_parallel(p, inv_dt, prev, out.cells(), out.faces());
    } else {
      kernels::closure_step_serial(p, inv_dt, prev, out.cells(), out.faces());
    }
    return out;
  };
  auto flux_of = [&](const SlabField& s) {
    return std::pair{outgoing_flux(grid, s.face(0), WallSide::left), outgoing_flux(grid, s.face(n), WallSide::right)};
  };
  return solve_walls(run, flux_of);
}

SlabField perturb_state(const SlabMesh& mesh, const CollisionOperator& op, const SlabField& f_s, double amplitude,
                        std::uint64_t seed)
{
  const auto& grid = op.grid();
  const std::size_t nv = grid.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const double c1 = coef(rng);
  const double c2 = coef(rng);
  const double c3 = coef(rng);
  SlabField f = f_s;
  std::vector<double> bump(nv);
  for (std::size_t j = 0; j < f.n_cells(); ++j) {
    const double x = mesh.center(static_cast<int>(j));
    const double shape = std::cos(std::numbers::pi * x);
    for (std::size_t i = 0; i < nv; ++i) {
      const double v = grid.v1(i);
      bump[i] = shape * (1.0 + c1 * v + c2 * v * v + c3 * grid.speed2(i)) * grid.sqrt_mu(i);
    }
    const Projection p = project_P(op, bump);
    auto c = f.cell(j);
    for (std::size_t i = 0; i < nv; ++i) c[i] += amplitude * (bump[i] - p.pf[i]);
  }
  return f;
}

std::optional<double> fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values,
                                     double t_from, double floor)
{
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  int count = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < t_from || !(values[k] > floor)) continue;
    const double y = std::log(values[k]);
    st += times[k];
    sy += y;
    stt += times[k] * times[k];
    sty += times[k] * y;
    ++count;
  }
  if (count < 3) return std::nullopt;
  const double denom = count * stt - st * st;
  if (denom <= 0.0) return std::nullopt;
  return -(count * sty - st * sy) / denom;
}

namespace {

void record(TimeSeries& ts, double t, const SlabMesh& mesh, const VelocityGrid& grid, const SlabField& f,
            const SlabField& fs, const std::vector<double>& weights, double delta)
{
  double sup = 0.0;
  double l2 = 0.0;
  double min_f = std::numeric_limits<double>::infinity();
  const std::size_t nv = grid.size();
  for (std::size_t j = 0; j < f.n_cells(); ++j) {
    for (std::size_t i = 0; i < nv; ++i) {
      const double d = f.at(j, i) - fs.at(j, i);
      sup = std::max(sup, weights[i] * std::abs(d));
      l2 += grid.weight(i) * d * d;
      const double sm = grid.sqrt_mu(i);
      min_f = std::min(min_f, sm * sm + delta * sm * f.at(j, i));
    }
  }
  ts.times.push_back(t);
  ts.sup_norms.push_back(sup);
  ts.l2_norms.push_back(std::sqrt(l2 * mesh.cell_width()));
  ts.min_F.push_back(min_f);
}

} // namespace

RelaxResult relax_to_steady(const SlabMesh& mesh, const CollisionOperator& op, const WallSpec& walls,
                            const SlabField& f0, double dt, double t_end, const SteadyOptions& steady)
{
  return relax_to_steady(mesh, op, walls, f0, dt, t_end, steady, solve_f1(mesh, op, walls, steady));
}

RelaxResult relax_to_steady(const SlabMesh& mesh, const CollisionOperator& op, const WallSpec& walls,
                            const SlabField& f0, double dt, double t_end, const SteadyOptions& steady,
                            const SteadyResult& f_s)
{
  require(dt > 0.0 && t_end > dt, "dynamics.relax_to_steady", "need 0 < dt < t_end");
  const auto& grid = op.grid();
  require(f0.n_cells() == static_cast<std::size_t>(mesh.n_cells) && f0.nv() == grid.size(),
          "dynamics.relax_to_steady", "f0 shape does not match mesh and grid");
  RelaxResult res;
  res.steady = f_s.f;
  res.steady_residual = f_s.report.residual;
  std::vector<double> weights(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) weights[i] = steady.weight(grid.speed2(i));

  const SlabField g(f0.n_cells(), f0.nv());
  const BoundarySource r = f1_boundary(grid, walls);
  SlabField f = f0;
  record(res.series, 0.0, mesh, grid, f, res.steady, weights, walls.delta);
  const auto steps = static_cast<long>(std::llround(t_end / dt));
  for (long s = 1; s <= steps; ++s) {
    f = step_linear(mesh, op, f, g, r, dt, steady.epsilon, steady.parallel);
    record(res.series, static_cast<double>(s) * dt, mesh, grid, f, res.steady, weights, walls.delta);
  }
  res.final_state = f;
  const double floor = std::max(1e-13 * res.series.sup_norms.front(), 100.0 * res.steady_residual);
  res.lambda = fit_decay_rate(res.series.times, res.series.sup_norms, 0.5 * t_end, floor);
  res.non_decay = !res.lambda || *res.lambda <= 0.0;
  return res;
}

std::vector<double> local_maxwellian(const VelocityGrid& grid, std::span<const double> F)
{
  const std::size_t nv = grid.size();
  double rho = 0.0;
  Vec3 m{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < nv; ++i) {
    const double w = grid.weight(i) * F[i];
    rho += w;
    for (int a = 0; a < 3; ++a) m[a] += grid.node(i)[a] * w;
  }
  std::vector<double> out(nv, 0.0);
  if (!(rho > 0.0)) return out;
  const Vec3 u{m[0] / rho, m[1] / rho, m[2] / rho};
  double e = 0.0;
  for (std::size_t i = 0; i < nv; ++i) {
    const auto& v = grid.node(i);
    const double d2 = (v[0] - u[0]) * (v[0] - u[0]) + (v[1] - u[1]) * (v[1] - u[1]) + (v[2] - u[2]) * (v[2] - u[2]);
    e += grid.weight(i) * F[i] * d2;
  }
  const double theta = e / (3.0 * rho);
  if (!(theta > 0.0)) return out;
  double mass = 0.0;
  for (std::size_t i = 0; i < nv; ++i) {
    const auto& v = grid.node(i);
    const double d2 = (v[0] - u[0]) * (v[0] - u[0]) + (v[1] - u[1]) * (v[1] - u[1]) + (v[2] - u[2]) * (v[2] - u[2]);
    out[i] = std::exp(-0.5 * d2 / theta);
    mass += grid.weight(i) * out[i];
  }
  if (!(mass > 0.0)) return std::vector<double>(nv, 0.0);
  for (auto& v : out) v *= rho / mass;
  return out;
}

SlabField step_nonlinear_positive(const SlabMesh& mesh, const CollisionOperator& op, const SlabField& F,
                                  const WallSpec& walls, double dt, bool parallel)
{
  mesh.validate();
  walls.validate();
  require(dt > 0.0, "dynamics.step_nonlinear_positive", "dt must be positive");
  require(op.model().kind == CollisionKind::bgk_linearized, "dynamics.step_nonlinear_positive",
          "the positivity-preserving step is defined for the BGK model");
  const auto& grid = op.grid();
  const std::size_t nv = grid.size();
  const auto n = static_cast<std::size_t>(mesh.n_cells);
  require(F.n_cells() == n && F.nv() == nv, "dynamics.step_nonlinear_positive", "F shape does not match");
  for (double v : F.cells()) {
    require(v >= 0.0 && std::isfinite(v), "dynamics.step_nonlinear_positive", "F must be nonnegative and finite");
  }

  const double inv_dt = 1.0 / dt;
  std::vector<double> sigma(nv);
  for (std::size_t i = 0; i < nv; ++i) sigma[i] = inv_dt + op.nu()[i] / mesh.knudsen;
  const auto v1 = node_v1(grid);
  std::vector<double> source(n * nv);
  for (std::size_t j = 0; j < n; ++j) {
    const auto m = local_maxwellian(grid, F.cell(j));
    for (std::size_t i = 0; i < nv; ++i) {
      source[j * nv + i] = F.at(j, i) * inv_dt + op.nu()[i] * m[i] / mesh.knudsen;
    }
  }
  const std::vector<double> zeros(n * nv, 0.0);

  // Wall Maxwellian shapes, normalized to unit discrete flux.
  std::vector<double> shape_l(nv, 0.0), shape_r(nv, 0.0);
  double flux_l = 0.0, flux_r = 0.0;
  for (std::size_t i : grid.half(HalfSpace::positive)) {
    shape_l[i] = maxwellian(walls.theta_minus(), grid.speed2(i));
    flux_l += grid.weight(i) * grid.v1(i) * shape_l[i];
  }
  for (std::size_t i : grid.half(HalfSpace::negative)) {
    shape_r[i] = maxwellian(walls.theta_plus(), grid.speed2(i));
    flux_r += grid.weight(i) * std::abs(grid.v1(i)) * shape_r[i];
  }
  for (auto& v : shape_l) v /= flux_l;
  for (auto& v : shape_r) v /= flux_r;

  auto run = [&](double zl, double zr, bool homogeneous) {
    std::vector<double> incoming(nv);
    for (std::size_t i = 0; i < nv; ++i) incoming[i] = v1[i] > 0.0 ? zl * shape_l[i] : zr * shape_r[i];
    SlabField out(n, nv);
    const std::span<const double> src = homogeneous ? std::span<const double>(zeros) : std::span<const double>(source);
    kernels::SweepProblem p{n, nv, mesh.cell_width(), v1, sigma, src, incoming};
    if (parallel) {
      kernels::sweep_parallel(p, out.cells(), out.faces());
    } else {
      kernels::sweep_serial(p, out.cells(), out.faces());
    }
    return out;
  };
  // Mass flux of F itself (not of sqrt(mu) f).
  auto flux_of = [&](const SlabField& s) {
    double left = 0.0, right = 0.0;
    for (std::size_t i : grid.half(HalfSpace::negative)) left += grid.weight(i) * std::abs(grid.v1(i)) * s.face(0)[i];
    for (std::size_t i : grid.half(HalfSpace::positive)) right += grid.weight(i) * grid.v1(i) * s.face(n)[i];
    return std::pair{left, right};
  };
  // a + (in - a) e and a + (in - a) phi stay >= 0 in floating point for a, in >= 0
  // and 0 <= e, phi <= 1, and the 2x2 wall solve only adds nonnegative terms.
  return solve_walls(run, flux_of);
}

} // namespace slabkin
