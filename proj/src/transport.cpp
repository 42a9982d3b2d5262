#include "slabkin/transport.hpp"

#include "slabkin/error.hpp"
#include "slabkin/kernels.hpp"
#include "slabkin/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace slabkin {

void SlabMesh::validate() const
{
  require(n_cells >= 2, "SlabMesh", "n_cells must be at least 2");
  require(knudsen > 0.0 && std::isfinite(knudsen), "SlabMesh", "knudsen must be positive");
}

SlabField::SlabField(std::size_t n_cells, std::size_t nv)
    : n_cells_(n_cells)
    , nv_(nv)
    , cells_(n_cells * nv, 0.0)
    , faces_((n_cells + 1) * nv, 0.0)
{}

void SlabField::check_finite(const char* where) const
{
  for (double v : cells_) require(std::isfinite(v), where, "SlabField has a non-finite entry");
  for (double v : faces_) require(std::isfinite(v), where, "SlabField has a non-finite face entry");
}

BoundarySource BoundarySource::zero(std::size_t nv)
{
  return {std::vector<double>(nv, 0.0), std::vector<double>(nv, 0.0)};
}

void BoundarySource::validate(const VelocityGrid& grid) const
{
  require(r_minus.size() == grid.size() && r_plus.size() == grid.size(), "BoundarySource",
          "r vectors must have one entry per node");
  std::vector<double> h(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) h[i] = r_minus[i] * grid.sqrt_mu(i);
  const double left = half_space_flux(grid, h, HalfSpace::positive);
  for (std::size_t i = 0; i < grid.size(); ++i) h[i] = r_plus[i] * grid.sqrt_mu(i);
  const double right = half_space_flux(grid, h, HalfSpace::negative);
  require(std::abs(left) <= tol_quad && std::abs(right) <= tol_quad, "BoundarySource",
          "incoming flux of r sqrt(mu) must vanish at each wall");
}

double WeightParams::operator()(double speed2) const
{
  return std::pow(1.0 + rho_scale * rho_scale * speed2, 0.5 * beta) * std::exp(zeta * speed2);
}

void WeightParams::validate() const
{
  require(zeta >= 0.0 && zeta < 0.25, "WeightParams", "zeta must lie in [0, 1/4)");
  require(rho_scale > 0.0, "WeightParams", "rho_scale must be positive");
}

namespace {

std::vector<double> absorption(const SlabMesh& mesh, const CollisionOperator& op, double epsilon)
{
  std::vector<double> sigma(op.size());
  for (std::size_t i = 0; i < op.size(); ++i) sigma[i] = epsilon + op.nu()[i] / mesh.knudsen;
  return sigma;
}

std::vector<double> node_v1(const VelocityGrid& grid)
{
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = grid.v1(i);
  return v;
}

} // namespace

SlabField sweep(const SlabMesh& mesh, const CollisionOperator& op, std::span<const double> incoming,
                const SlabField& source, double epsilon)
{
  mesh.validate();
  require(epsilon >= 0.0, "transport.sweep", "epsilon must be nonnegative");
  const std::size_t nv = op.size();
  const auto n = static_cast<std::size_t>(mesh.n_cells);
  require(incoming.size() == nv, "transport.sweep", "incoming must have one entry per node");
  require(source.n_cells() == n && source.nv() == nv, "transport.sweep", "source shape does not match");
  const auto sigma = absorption(mesh, op, epsilon);
  const auto v1 = node_v1(op.grid());
  SlabField out(n, nv);
  kernels::SweepProblem p{n, nv, mesh.cell_width(), v1, sigma, source.cells(), incoming};
  kernels::sweep_parallel(p, out.cells(), out.faces());
  return out;
}

double outgoing_flux(const VelocityGrid& grid, std::span<const double> wall_values, WallSide side)
{
  // Outgoing at the left wall means v1 < 0.
  const auto& nodes = grid.half(side == WallSide::left ? HalfSpace::negative : HalfSpace::positive);
  double z = 0.0;
  for (std::size_t i : nodes) z += grid.weight(i) * std::abs(grid.v1(i)) * grid.sqrt_mu(i) * wall_values[i];
  return z;
}

double discrete_wall_flux(const VelocityGrid& grid)
{
  double s = 0.0;
  for (std::size_t i : grid.half(HalfSpace::positive)) {
    s += grid.weight(i) * grid.v1(i) * grid.sqrt_mu(i) * grid.sqrt_mu(i);
  }
  return s;
}

std::vector<double> diffuse_reflect(const VelocityGrid& grid, std::span<const double> outgoing, WallSide side,
                                    std::span<const double> r, double factor)
{
  require(outgoing.size() == grid.size() && r.size() == grid.size(), "transport.diffuse_reflect",
          "wall vectors must have one entry per node");
  const double z = factor * outgoing_flux(grid, outgoing, side) / discrete_wall_flux(grid);
  std::vector<double> in(grid.size(), 0.0);
  for (std::size_t i : grid.half(side == WallSide::left ? HalfSpace::positive : HalfSpace::negative)) {
    in[i] = grid.sqrt_mu(i) * z + r[i];
  }
  return in;
}

double slab_mass(const VelocityGrid& grid, const SlabMesh& mesh, const SlabField& f)
{
  double s = 0.0;
  for (std::size_t j = 0; j < f.n_cells(); ++j) {
    const auto c = f.cell(j);
    for (std::size_t i = 0; i < grid.size(); ++i) s += grid.weight(i) * grid.sqrt_mu(i) * c[i];
  }
  return s * mesh.cell_width();
}

std::string to_string(SteadyMethod method)
{
  return method == SteadyMethod::gmres ? "gmres" : "source-iteration";
}

SteadyMethod steady_method_from_string(const std::string& name)
{
  if (name == "gmres") return SteadyMethod::gmres;
  if (name == "source-iteration") return SteadyMethod::source_iteration;
  throw InvalidArgument("SteadyOptions.method", "unknown method '" + name + "'");
}

void SteadyOptions::validate() const
{
  require(epsilon >= 0.0, "SteadyOptions", "epsilon must be nonnegative");
  require(tol > 0.0, "SteadyOptions", "tol must be positive");
  require(max_iter >= 1, "SteadyOptions", "max_iter must be positive");
  require(restart >= 2, "SteadyOptions", "restart must be at least 2");
  require(reflection_factor > 0.0 && reflection_factor <= 1.0, "SteadyOptions",
          "reflection_factor must lie in (0, 1]");
  weight.validate();
}

namespace {

/// The affine map T(x) = A x + b of one source iteration, on the state
/// x = (cell averages, z_left, z_right) where z are the outgoing wall fluxes.
class FixedPointMap
{
 public:
  FixedPointMap(const SlabMesh& mesh, const CollisionOperator& op, const SlabField& g, const BoundarySource& r,
                const SteadyOptions& opt)
      : mesh_(mesh)
      , op_(op)
      , grid_(op.grid())
      , g_(g)
      , r_(r)
      , opt_(opt)
      , n_(static_cast<std::size_t>(mesh.n_cells))
      , nv_(op.size())
      , sigma_(absorption(mesh, op, opt.epsilon))
      , v1_(node_v1(op.grid()))
      , phi_(discrete_wall_flux(op.grid()))
      , kf_(n_ * nv_)
      , source_(n_ * nv_)
      , incoming_(nv_)
      , field_(n_, nv_)
  {}

  std::size_t size() const { return n_ * nv_ + 2; }

  /// Evaluates T (or its linear part A) and leaves the swept field in field().
  void apply(std::span<const double> x, std::span<double> y, bool affine)
  {
    const std::size_t m = n_ * nv_;
    if (opt_.parallel) {
      kernels::apply_k_cells_parallel(op_, n_, x.first(m), kf_);
    } else {
      kernels::apply_k_cells_serial(op_, n_, x.first(m), kf_);
    }
    const double inv_kn = 1.0 / mesh_.knudsen;
    for (std::size_t k = 0; k < m; ++k) source_[k] = kf_[k] * inv_kn + (affine ? g_.cells()[k] : 0.0);
    const double zl = opt_.reflection_factor * x[m] / phi_;
    const double zr = opt_.reflection_factor * x[m + 1] / phi_;
    for (std::size_t i = 0; i < nv_; ++i) {
      if (v1_[i] > 0.0) {
        incoming_[i] = grid_.sqrt_mu(i) * zl + (affine ? r_.r_minus[i] : 0.0);
      } else {
        incoming_[i] = grid_.sqrt_mu(i) * zr + (affine ? r_.r_plus[i] : 0.0);
      }
    }
    kernels::SweepProblem p{n_, nv_, mesh_.cell_width(), v1_, sigma_, source_, incoming_};
    if (opt_.parallel) {
      kernels::sweep_parallel(p, field_.cells(), field_.faces());
    } else {
      kernels::sweep_serial(p, field_.cells(), field_.faces());
    }
    std::copy(field_.cells().begin(), field_.cells().end(), y.begin());
    y[m] = outgoing_flux(grid_, field_.face(0), WallSide::left);
    y[m + 1] = outgoing_flux(grid_, field_.face(n_), WallSide::right);
  }

  const SlabField& field() const { return field_; }

  /// The homogeneous solution: sqrt(mu) in every cell, wall fluxes Phi.
  std::vector<double> null_vector() const
  {
    std::vector<double> v(size());
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t i = 0; i < nv_; ++i) v[j * nv_ + i] = grid_.sqrt_mu(i);
    }
    v[n_ * nv_] = phi_;
    v[n_ * nv_ + 1] = phi_;
    return v;
  }

  double mass(std::span<const double> x) const
  {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t i = 0; i < nv_; ++i) s += grid_.weight(i) * grid_.sqrt_mu(i) * x[j * nv_ + i];
    }
    return s * mesh_.cell_width();
  }

  double weighted_sup(std::span<const double> d) const
  {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t i = 0; i < nv_; ++i) s = std::max(s, weights_[i] * std::abs(d[j * nv_ + i]));
    }
    s = std::max(s, std::abs(d[n_ * nv_]));
    return std::max(s, std::abs(d[n_ * nv_ + 1]));
  }

  void init_weights()
  {
    weights_.resize(nv_);
    for (std::size_t i = 0; i < nv_; ++i) weights_[i] = opt_.weight(grid_.speed2(i));
  }

  const std::vector<double>& weights() const { return weights_; }
  std::size_t cells_size() const { return n_ * nv_; }
  std::size_t nv() const { return nv_; }

 private:
  const SlabMesh& mesh_;
  const CollisionOperator& op_;
  const VelocityGrid& grid_;
  const SlabField& g_;
  const BoundarySource& r_;
  const SteadyOptions& opt_;
  std::size_t n_;
  std::size_t nv_;
  std::vector<double> sigma_;
  std::vector<double> v1_;
  double phi_;
  std::vector<double> kf_;
  std::vector<double> source_;
  std::vector<double> incoming_;
  SlabField field_;
  std::vector<double> weights_;
};

double tail_ratio(const std::vector<double>& h)
{
  if (h.size() < 3) return 0.0;
  const std::size_t k = std::min<std::size_t>(10, h.size() - 1);
  const double a = h[h.size() - 1 - k];
  const double b = h.back();
  if (a <= 0.0 || b <= 0.0) return 0.0;
  return std::pow(b / a, 1.0 / static_cast<double>(k));
}

void check_data(const SlabMesh& mesh, const CollisionOperator& op, const SlabField& g, const BoundarySource& r)
{
  const auto& grid = op.grid();
  require(g.n_cells() == static_cast<std::size_t>(mesh.n_cells) && g.nv() == grid.size(),
          "transport.solve_steady_linear", "g shape does not match mesh and grid");
  g.check_finite("transport.solve_steady_linear");
  r.validate(grid);
  double scale = 0.0;
  for (double v : g.cells()) scale = std::max(scale, std::abs(v));
  require(std::abs(slab_mass(grid, mesh, g)) <= tol_quad * std::max(1.0, scale), "transport.solve_steady_linear",
          "g must carry zero total mass against sqrt(mu)");
}

} // namespace

SteadyResult solve_steady_linear(const SlabMesh& mesh, const CollisionOperator& op, const SlabField& g,
                                 const BoundarySource& r, const SteadyOptions& options)
{
  mesh.validate();
  options.validate();
  check_data(mesh, op, g, r);

  FixedPointMap map(mesh, op, g, r, options);
  map.init_weights();
  const std::size_t size = map.size();
  const std::size_t m = map.cells_size();
  const std::size_t nv = map.nv();
  const bool limit = options.epsilon == 0.0;
  const std::vector<double> null = map.null_vector();
  const double null_mass = map.mass(null);

  auto remove_mass = [&](std::span<double> x) {
    const double alpha = map.mass(x) / null_mass;
    for (std::size_t k = 0; k < size; ++k) x[k] -= alpha * null[k];
  };

  std::vector<double> x(size, 0.0);
  std::vector<double> tx(size);
  SteadyReport report;
  report.method = to_string(options.method);
  report.epsilon = options.epsilon;

  auto true_residual = [&](std::span<const double> state) {
    map.apply(state, tx, true);
    std::vector<double> d(size);
    for (std::size_t k = 0; k < size; ++k) d[k] = tx[k] - state[k];
    return map.weighted_sup(d);
  };

  if (options.method == SteadyMethod::source_iteration) {
    bool done = false;
    for (int it = 0; it < options.max_iter; ++it) {
      map.apply(x, tx, true);
      if (limit) remove_mass(tx);
      std::vector<double> d(size);
      for (std::size_t k = 0; k < size; ++k) d[k] = tx[k] - x[k];
      const double diff = map.weighted_sup(d);
      report.history.push_back(diff);
      report.iterations = it + 1;
      x.swap(tx);
      if (!std::isfinite(diff)) break;
      if (diff < options.tol) {
        done = true;
        break;
      }
    }
    report.contraction_ratio = tail_ratio(report.history);
    if (!done) {
      throw DivergenceError("transport.solve_steady_linear: source iteration did not reach tol in " +
                                std::to_string(options.max_iter) + " iterations",
                            report.history);
    }
  } else {
    // Solve (I - A) x = b with b = T(0), in variables scaled by the weight so
    // that the 2-norm target tracks the weighted sup norm.
    std::vector<double> scale(size, 1.0);
    for (std::size_t k = 0; k < m; ++k) scale[k] = map.weights()[k % nv];
    std::vector<double> zero(size, 0.0);
    std::vector<double> b(size);
    map.apply(zero, b, true);
    for (std::size_t k = 0; k < size; ++k) b[k] *= scale[k];

    std::vector<double> xs(size), ax(size);
    LinearMap op_scaled = [&](std::span<const double> in, std::span<double> out) {
      for (std::size_t k = 0; k < size; ++k) xs[k] = in[k] / scale[k];
      map.apply(xs, ax, false);
      const double gauge = limit ? map.mass(xs) / null_mass : 0.0;
      for (std::size_t k = 0; k < size; ++k) out[k] = (xs[k] - ax[k] + gauge * null[k]) * scale[k];
    };
    std::vector<double> xs_sol(size, 0.0);
    GmresOptions go;
    go.restart = options.restart;
    go.max_iter = options.max_iter;
    go.tol = options.tol;
    std::vector<double> unscaled(size);
    auto accept = [&](std::span<const double> state) {
      for (std::size_t k = 0; k < size; ++k) unscaled[k] = state[k] / scale[k];
      if (limit) remove_mass(unscaled);
      return true_residual(unscaled) < options.tol;
    };
    const GmresResult gr = gmres(op_scaled, b, xs_sol, go, accept);
    report.iterations = gr.iterations;
    report.history = gr.history;
    report.contraction_ratio = tail_ratio(report.history);
    if (!gr.converged) {
      throw DivergenceError("transport.solve_steady_linear: GMRES did not reach tol in " +
                                std::to_string(options.max_iter) + " iterations",
                            report.history);
    }
    for (std::size_t k = 0; k < size; ++k) x[k] = xs_sol[k] / scale[k];
    if (limit) remove_mass(x);
  }

  // Final sweep from the converged state gives consistent cells and faces.
  report.residual = true_residual(x);
  SlabField f = map.field();
  if (limit) {
    const double alpha = slab_mass(op.grid(), mesh, f) / null_mass;
    for (std::size_t j = 0; j < f.n_cells(); ++j) {
      for (std::size_t i = 0; i < nv; ++i) f.at(j, i) -= alpha * op.grid().sqrt_mu(i);
    }
    for (std::size_t fi = 0; fi <= f.n_cells(); ++fi) {
      auto face = f.face(fi);
      for (std::size_t i = 0; i < nv; ++i) face[i] -= alpha * op.grid().sqrt_mu(i);
    }
  }
  report.mass = slab_mass(op.grid(), mesh, f);
  f.check_finite("transport.solve_steady_linear");
  return {std::move(f), std::move(report)};
}

namespace {

/// Removes the incoming flux of r sqrt(mu) at the discrete level.
void make_flux_free(const VelocityGrid& grid, std::vector<double>& r, HalfSpace side)
{
  double flux = 0.0;
  for (std::size_t i : grid.half(side)) flux += grid.weight(i) * std::abs(grid.v1(i)) * grid.sqrt_mu(i) * r[i];
  const double alpha = flux / discrete_wall_flux(grid);
  for (std::size_t i : grid.half(side)) r[i] -= alpha * grid.sqrt_mu(i);
}

} // namespace

BoundarySource f1_boundary(const VelocityGrid& grid, const WallSpec& walls)
{
  walls.validate();
  BoundarySource r = BoundarySource::zero(grid.size());
  for (std::size_t i : grid.half(HalfSpace::positive)) {
    r.r_minus[i] = walls.vartheta_minus * mu1_coefficient(grid.speed2(i)) / grid.sqrt_mu(i);
  }
  for (std::size_t i : grid.half(HalfSpace::negative)) {
    r.r_plus[i] = walls.vartheta_plus * mu1_coefficient(grid.speed2(i)) / grid.sqrt_mu(i);
  }
  make_flux_free(grid, r.r_minus, HalfSpace::positive);
  make_flux_free(grid, r.r_plus, HalfSpace::negative);
  return r;
}

BoundarySource f2_boundary(const VelocityGrid& grid, const WallSpec& walls, const SlabField& f1)
{
  walls.validate();
  require(f1.nv() == grid.size(), "transport.f2_boundary", "f1 does not match the grid");
  const double z_left = outgoing_flux(grid, f1.face(0), WallSide::left);
  const double z_right = outgoing_flux(grid, f1.face(f1.n_cells()), WallSide::right);
  BoundarySource r = BoundarySource::zero(grid.size());
  auto fill = [&](std::vector<double>& out, HalfSpace side, double vartheta, double z) {
    for (std::size_t i : grid.half(side)) {
      const double s2 = grid.speed2(i);
      out[i] = (vartheta * z * mu1_coefficient(s2) + vartheta * vartheta * mu2_coefficient(s2)) / grid.sqrt_mu(i);
    }
  };
  fill(r.r_minus, HalfSpace::positive, walls.vartheta_minus, z_left);
  fill(r.r_plus, HalfSpace::negative, walls.vartheta_plus, z_right);
  make_flux_free(grid, r.r_minus, HalfSpace::positive);
  make_flux_free(grid, r.r_plus, HalfSpace::negative);
  return r;
}

SlabField f2_source(const SlabMesh& mesh, const CollisionOperator& op, const SlabField& f1)
{
  SlabField g(f1.n_cells(), f1.nv());
  for (std::size_t j = 0; j < f1.n_cells(); ++j) {
    const auto gamma = apply_Gamma(op, f1.cell(j), f1.cell(j));
    // Gamma is orthogonal to the invariants; drop the quadrature leakage.
    const Projection p = project_P(op, gamma);
    auto out = g.cell(j);
    for (std::size_t i = 0; i < gamma.size(); ++i) out[i] = (gamma[i] - p.pf[i]) / mesh.knudsen;
  }
  return g;
}

SteadyResult solve_f1(const SlabMesh& mesh, const CollisionOperator& op, const WallSpec& walls,
                      const SteadyOptions& options)
{
  const SlabField g(static_cast<std::size_t>(mesh.n_cells), op.size());
  return solve_steady_linear(mesh, op, g, f1_boundary(op.grid(), walls), options);
}

SteadyResult solve_f2(const SlabMesh& mesh, const CollisionOperator& op, const WallSpec& walls,
                      const SlabField& f1, const SteadyOptions& options)
{
  require(f1.n_cells() == static_cast<std::size_t>(mesh.n_cells) && f1.nv() == op.size(), "transport.solve_f2",
          "f1 shape does not match mesh and grid");
  return solve_steady_linear(mesh, op, f2_source(mesh, op, f1), f2_boundary(op.grid(), walls, f1), options);
}

EnergyBalance discrete_energy_balance(const SlabMesh& mesh, const CollisionOperator& op, const SlabField& f,
                                      const SlabField& g, const BoundarySource& r, double epsilon)
{
  (void)r; // the incoming values already sit on the boundary faces of f
  const auto& grid = op.grid();
  const std::size_t nv = grid.size();
  const std::size_t n = f.n_cells();
  const double dx = mesh.cell_width();
  const auto sigma = absorption(mesh, op, epsilon);

  EnergyBalance e;
  double l2_exact = 0.0;
  double l2_avg = 0.0;
  double nu_exact = 0.0;
  double nu_avg = 0.0;
  double kff = 0.0;
  double gf = 0.0;
  std::vector<double> kf(nv);
  for (std::size_t j = 0; j < n; ++j) {
    const auto c = f.cell(j);
    op.apply_k(c, kf);
    for (std::size_t i = 0; i < nv; ++i) {
      const double w = grid.weight(i);
      const double v = std::abs(grid.v1(i));
      const double in = grid.v1(i) > 0.0 ? f.face(j)[i] : f.face(j + 1)[i];
      const double s = kf[i] / mesh.knudsen + g.cells()[j * nv + i];
      const double a = s / sigma[i];
      const double b = in - a;
      const double tau = sigma[i] * dx / v;
      const double om = -std::expm1(-tau);
      const double om2 = -std::expm1(-2.0 * tau);
      const double exact = a * a * dx + 2.0 * a * b * v * om / sigma[i] + b * b * v * om2 / (2.0 * sigma[i]);
      const double avg = dx * c[i] * c[i];
      l2_exact += w * exact;
      l2_avg += w * avg;
      nu_exact += w * op.nu()[i] * exact;
      nu_avg += w * op.nu()[i] * avg;
      kff += w * dx * kf[i] * c[i];
      gf += w * dx * g.cells()[j * nv + i] * c[i];
    }
  }
  for (std::size_t i = 0; i < nv; ++i) {
    const double w = grid.weight(i) * std::abs(grid.v1(i));
    const double left = f.face(0)[i];
    const double right = f.face(n)[i];
    if (grid.v1(i) > 0.0) {
      e.incoming += 0.5 * w * left * left;
      e.outgoing += 0.5 * w * right * right;
    } else {
      e.incoming += 0.5 * w * right * right;
      e.outgoing += 0.5 * w * left * left;
    }
  }
  e.penalty = epsilon * l2_exact;
  e.dissipation = (nu_exact - kff) / mesh.knudsen;
  e.source = gf;
  const double total = e.penalty + e.dissipation + e.outgoing - e.incoming - e.source;
  e.imbalance = std::abs(total);
  const double big = std::max({std::abs(e.penalty), std::abs(e.dissipation), e.outgoing, e.incoming,
                               std::abs(e.source), 1e-300});
  e.relative = e.imbalance / big;
  e.cell_average_imbalance = std::abs(epsilon * l2_avg + (nu_avg - kff) / mesh.knudsen + e.outgoing -
                                      e.incoming - e.source);
  return e;
}

} // namespace slabkin
