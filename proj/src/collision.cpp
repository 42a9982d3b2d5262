#include "slabkin/collision.hpp"

#include "slabkin/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace slabkin {

namespace {

constexpr double kPi = std::numbers::pi;
const double kRho0 = std::sqrt(2.0 * kPi); // mass of mu

void fnv_mix(std::uint64_t& h, const void* data, std::size_t bytes)
{
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
}

double weighted_dot(const VelocityGrid& grid, const double* a, const double* b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) s += grid.weight(i) * a[i] * b[i];
  return s;
}

/// E|v - Z| for Z ~ N(0, I_3) and |v| = r.
double mean_distance_to_gaussian(double r)
{
  if (r < 1e-8) return 2.0 * std::sqrt(2.0 / kPi);
  return std::sqrt(2.0 / kPi) * std::exp(-0.5 * r * r) + (r + 1.0 / r) * std::erf(r / std::sqrt(2.0));
}

} // namespace

std::string to_string(CollisionKind kind)
{
  return kind == CollisionKind::hard_sphere ? "hard-sphere" : "bgk-linearized";
}

CollisionKind collision_kind_from_string(const std::string& name)
{
  if (name == "bgk-linearized" || name == "bgk") return CollisionKind::bgk_linearized;
  if (name == "hard-sphere") return CollisionKind::hard_sphere;
  throw InvalidArgument("CollisionModel.kind", "unknown collision model '" + name + "'");
}

void CollisionModel::validate() const
{
  require(gamma_exponent >= 0.0 && gamma_exponent <= 1.0, "CollisionModel",
          "gamma_exponent must lie in [0, 1] (hard potentials)");
  require(nu0 > 0.0, "CollisionModel", "nu0 must be positive");
  if (kind == CollisionKind::hard_sphere) {
    require(angular_nodes >= 8, "CollisionModel",
            "hard-sphere assembly needs angular_nodes >= 8");
    require(gamma_exponent == 1.0, "CollisionModel",
            "the hard-sphere kernel is defined for gamma_exponent = 1");
  }
}

std::string CollisionModel::describe() const
{
  std::ostringstream os;
  os.precision(17);
  os << to_string(kind) << ";gamma=" << gamma_exponent << ";angular=" << angular_nodes
     << ";nu0=" << nu0 << ";quadratic=" << (quadratic_quadrature ? 1 : 0);
  return os.str();
}

std::uint64_t CollisionModel::hash() const
{
  const std::string d = describe();
  std::uint64_t h = 1469598103934665603ULL;
  fnv_mix(h, d.data(), d.size());
  return h;
}

double tol_null(const CollisionModel& model)
{
  return model.kind == CollisionKind::hard_sphere ? tol_null_hard_sphere : tol_null_bgk;
}

SphereRule sphere_rule(int angular_nodes)
{
  require(angular_nodes >= 2, "collision.sphere_rule", "need at least two angular nodes");
  const int n_az = angular_nodes;
  int n_pol = std::max(2, angular_nodes / 2);
  if (n_pol % 2 == 1) ++n_pol;
  const quadrature::Rule gl = quadrature::gauss_legendre(n_pol / 2);

  // Polar rule in cos(theta), Gauss-Legendre on [-1, 0] and [0, 1] separately.
  std::vector<double> c;
  std::vector<double> wc;
  for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
    c.push_back(0.5 * (gl.nodes[k] + 1.0));
    wc.push_back(0.5 * gl.weights[k]);
    c.push_back(-0.5 * (gl.nodes[k] + 1.0));
    wc.push_back(0.5 * gl.weights[k]);
  }

  SphereRule rule;
  for (int a = 0; a < n_az; ++a) {
    const double phi = 2.0 * kPi * (a + 0.5) / n_az;
    for (std::size_t p = 0; p < c.size(); ++p) {
      const double s = std::sqrt(std::max(0.0, 1.0 - c[p] * c[p]));
      rule.directions.push_back({s * std::cos(phi), s * std::sin(phi), c[p]});
      rule.weights.push_back(wc[p] * 2.0 * kPi / n_az);
    }
  }
  return rule;
}

CollisionOperator::CollisionOperator(CollisionModel model, VelocityGrid grid, std::vector<double> nu,
                                     std::optional<Eigen::MatrixXd> k_matrix)
    : model_(std::move(model))
    , grid_(std::move(grid))
    , nu_(std::move(nu))
    , k_matrix_(std::move(k_matrix))
{
  const std::size_t n = grid_.size();
  require(nu_.size() == n, "CollisionOperator", "nu length does not match the grid");
  if (k_matrix_) {
    require(static_cast<std::size_t>(k_matrix_->rows()) == n &&
                static_cast<std::size_t>(k_matrix_->cols()) == n,
            "CollisionOperator", "K matrix shape does not match the grid");
  }

  const auto ni = static_cast<Eigen::Index>(n);
  raw_basis_.resize(ni, 5);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = grid_.node(i);
    const double s = grid_.sqrt_mu(i);
    const auto r = static_cast<Eigen::Index>(i);
    raw_basis_(r, 0) = s;
    raw_basis_(r, 1) = v[0] * s;
    raw_basis_(r, 2) = v[1] * s;
    raw_basis_(r, 3) = v[2] * s;
    raw_basis_(r, 4) = 0.5 * (grid_.speed2(i) - 3.0) * s;
  }
  for (int k = 0; k < 5; ++k) {
    for (int l = 0; l < 5; ++l) {
      gram_(k, l) = weighted_dot(grid_, raw_basis_.col(k).data(), raw_basis_.col(l).data());
    }
  }

  p_basis_ = raw_basis_;
  for (int pass = 0; pass < 2; ++pass) {
    for (int k = 0; k < 5; ++k) {
      for (int l = 0; l < k; ++l) {
        const double proj = weighted_dot(grid_, p_basis_.col(k).data(), p_basis_.col(l).data());
        p_basis_.col(k) -= proj * p_basis_.col(l);
      }
      const double norm = std::sqrt(weighted_dot(grid_, p_basis_.col(k).data(), p_basis_.col(k).data()));
      p_basis_.col(k) /= norm;
    }
  }

  std::uint64_t h = 1469598103934665603ULL;
  const std::uint64_t gh = grid_.hash();
  const std::uint64_t mh = model_.hash();
  fnv_mix(h, &gh, sizeof(gh));
  fnv_mix(h, &mh, sizeof(mh));
  fnv_mix(h, nu_.data(), nu_.size() * sizeof(double));
  if (k_matrix_) fnv_mix(h, k_matrix_->data(), static_cast<std::size_t>(k_matrix_->size()) * sizeof(double));
  hash_ = h;
}

void CollisionOperator::apply_p(std::span<const double> in, std::span<double> out) const
{
  const std::size_t n = size();
  std::array<double, 5> coef{};
  for (int k = 0; k < 5; ++k) coef[k] = weighted_dot(grid_, p_basis_.col(k).data(), in.data());
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    double s = 0.0;
    for (int k = 0; k < 5; ++k) s += coef[k] * p_basis_(r, k);
    out[i] = s;
  }
}

void CollisionOperator::apply_k(std::span<const double> in, std::span<double> out) const
{
  const auto n = static_cast<Eigen::Index>(size());
  if (k_matrix_) {
    Eigen::Map<const Eigen::VectorXd> x(in.data(), n);
    Eigen::Map<Eigen::VectorXd> y(out.data(), n);
    y.noalias() = (*k_matrix_) * x;
    return;
  }
  apply_p(in, out);
  for (auto& v : out) v *= model_.nu0;
}

double hard_sphere_nu(double speed)
{
  return 2.0 * kPi * std::sqrt(2.0 * kPi) * mean_distance_to_gaussian(speed);
}

CollisionOperator assemble(const CollisionModel& model, const VelocityGrid& grid)
{
  model.validate();
  const std::size_t n = grid.size();

  if (model.kind == CollisionKind::bgk_linearized) {
    return CollisionOperator(model, grid, std::vector<double>(n, model.nu0), std::nullopt);
  }

  // Angular integral of q0 = |cos| by the product sphere rule.
  const SphereRule sphere = sphere_rule(model.angular_nodes);
  double angular = 0.0;
  for (std::size_t k = 0; k < sphere.directions.size(); ++k) {
    angular += sphere.weights[k] * std::abs(sphere.directions[k][2]);
  }

  std::vector<double> nu(n);
  for (std::size_t i = 0; i < n; ++i) {
    nu[i] = angular * kRho0 * mean_distance_to_gaussian(std::sqrt(grid.speed2(i)));
  }

  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd k_raw(ni, ni);
  const double k1_scale = angular / (2.0 * kPi);

#pragma omp parallel for schedule(static)
  for (Eigen::Index r = 0; r < ni; ++r) {
    const auto i = static_cast<std::size_t>(r);
    const Vec3& v = grid.node(i);
    const double sv = grid.speed2(i);
    double subtract = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const Vec3& eta = grid.node(j);
      const double d0 = v[0] - eta[0];
      const double d1 = v[1] - eta[1];
      const double d2 = v[2] - eta[2];
      const double dist2 = d0 * d0 + d1 * d1 + d2 * d2;
      const double dist = std::sqrt(dist2);
      const double se = grid.speed2(j);
      const double k1 = k1_scale * dist * std::exp(-0.25 * (sv + se));
      const double diff = sv - se;
      const double k2 = 4.0 / dist * std::exp(-0.125 * dist2 - 0.125 * diff * diff / dist2);
      const double wj = grid.weight(j);
      k_raw(r, static_cast<Eigen::Index>(j)) = (k2 - k1) * wj;
      subtract += k2 * wj * grid.sqrt_mu(j);
    }
    k_raw(r, r) = 2.0 * nu[i] - subtract / grid.sqrt_mu(i);
  }

  // L_raw = nu - K_raw, then L = (I - P) L_raw (I - P) and K = nu - L.
  CollisionOperator bgk_shape(model, grid, nu, std::nullopt);
  const Eigen::MatrixXd& psi = bgk_shape.p_basis();
  Eigen::VectorXd w(ni);
  for (Eigen::Index r = 0; r < ni; ++r) w(r) = grid.weight(static_cast<std::size_t>(r));
  // P = psi psi^T W.
  const Eigen::MatrixXd psi_t_w = psi.transpose() * w.asDiagonal();

  Eigen::MatrixXd l_raw = -k_raw;
  for (Eigen::Index r = 0; r < ni; ++r) l_raw(r, r) += nu[static_cast<std::size_t>(r)];
  // (I - P) L_raw
  Eigen::MatrixXd tmp = l_raw - psi * (psi_t_w * l_raw);
  // ... (I - P)
  Eigen::MatrixXd l_cons = tmp - (tmp * psi) * psi_t_w;

  Eigen::MatrixXd k_final = -l_cons;
  for (Eigen::Index r = 0; r < ni; ++r) k_final(r, r) += nu[static_cast<std::size_t>(r)];

  // Symmetrize in the weighted inner product: W K must be symmetric.
  for (Eigen::Index r = 0; r < ni; ++r) {
    for (Eigen::Index c = r + 1; c < ni; ++c) {
      const double sym = 0.5 * (w(r) * k_final(r, c) + w(c) * k_final(c, r));
      k_final(r, c) = sym / w(r);
      k_final(c, r) = sym / w(c);
    }
  }
  return CollisionOperator(model, grid, std::move(nu), std::move(k_final));
}

std::vector<double> apply_K(const CollisionOperator& op, std::span<const double> f)
{
  require(f.size() == op.size(), "collision.apply_K", "input length does not match the grid");
  std::vector<double> out(f.size());
  op.apply_k(f, out);
  return out;
}

std::vector<double> apply_L(const CollisionOperator& op, std::span<const double> f)
{
  require(f.size() == op.size(), "collision.apply_L", "input length does not match the grid");
  std::vector<double> out(f.size());
  op.apply_k(f, out);
  const auto& nu = op.nu();
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = nu[i] * f[i] - out[i];
  return out;
}

Projection project_P(const CollisionOperator& op, std::span<const double> f)
{
  require(f.size() == op.size(), "collision.project_P", "input length does not match the grid");
  const auto& grid = op.grid();
  Eigen::Matrix<double, 5, 1> rhs;
  for (int k = 0; k < 5; ++k) rhs(k) = weighted_dot(grid, op.raw_basis().col(k).data(), f.data());
  const Eigen::Matrix<double, 5, 1> coef = op.gram().ldlt().solve(rhs);

  Projection p;
  p.a = coef(0);
  p.b = {coef(1), coef(2), coef(3)};
  p.c = coef(4);
  p.pf.resize(f.size());
  op.apply_p(f, p.pf);
  return p;
}

double spectral_gap(const CollisionOperator& op)
{
  const auto& grid = op.grid();
  const auto n = static_cast<Eigen::Index>(op.size());
  const auto& nu = op.nu();

  // Work in g = D^{1/2} W^{1/2} f: the Rayleigh quotient <Lf,f>/<nu f,f>
  // becomes g^T C g / g^T g with C = D^{-1/2} W^{1/2} L W^{-1/2} D^{-1/2},
  // and f orthogonal to the invariants becomes g orthogonal to Y = D^{-1/2} W^{1/2} psi.
  Eigen::VectorXd sw(n);
  Eigen::VectorXd snu(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    sw(r) = std::sqrt(grid.weight(static_cast<std::size_t>(r)));
    snu(r) = std::sqrt(nu[static_cast<std::size_t>(r)]);
  }
  Eigen::MatrixXd y = op.p_basis();
  for (Eigen::Index r = 0; r < n; ++r) y.row(r) *= sw(r) / snu(r);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, 5);

  auto apply_c = [&](const Eigen::VectorXd& g) {
    std::vector<double> f(static_cast<std::size_t>(n));
    for (Eigen::Index r = 0; r < n; ++r) f[static_cast<std::size_t>(r)] = g(r) / (sw(r) * snu(r));
    const std::vector<double> lf = apply_L(op, f);
    Eigen::VectorXd out(n);
    for (Eigen::Index r = 0; r < n; ++r) out(r) = lf[static_cast<std::size_t>(r)] * sw(r) / snu(r);
    return out;
  };
  auto deflate = [&](Eigen::VectorXd g) {
    g -= q * (q.transpose() * g);
    return g;
  };

  if (op.has_dense_k()) {
    Eigen::MatrixXd c(n, n);
    const Eigen::MatrixXd& k = op.k_matrix();
    for (Eigen::Index col = 0; col < n; ++col) {
      for (Eigen::Index row = 0; row < n; ++row) {
        const double l = (row == col ? nu[static_cast<std::size_t>(row)] : 0.0) - k(row, col);
        c(row, col) = l * sw(row) / (snu(row) * sw(col) * snu(col));
      }
    }
    c = 0.5 * (c + c.transpose()).eval();
    // Restrict to the complement and lift the invariant directions out of the way.
    const Eigen::MatrixXd cq = c * q;
    c -= cq * q.transpose();
    c -= q * (q.transpose() * c);
    const double lift = 2.0 * c.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
    c += lift * q * q.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
  }

  // Matrix-free: power iteration on (s I - C) over the complement.
  Eigen::VectorXd g(n);
  for (Eigen::Index r = 0; r < n; ++r) g(r) = std::sin(1.0 + 0.37 * static_cast<double>(r));
  g = deflate(g);
  g.normalize();
  double s = 0.0;
  {
    // Upper bound for the spectrum of C via a few Rayleigh quotients.
    Eigen::VectorXd h = g;
    for (int it = 0; it < 20; ++it) {
      h = deflate(apply_c(h));
      const double nrm = h.norm();
      if (nrm == 0.0) break;
      s = std::max(s, nrm);
      h /= nrm;
    }
    s = 1.5 * s + 1.0;
  }
  double lambda = 0.0;
  for (int it = 0; it < 2000; ++it) {
    Eigen::VectorXd h = deflate(s * g - apply_c(g));
    const double next = g.dot(h);
    const double nrm = h.norm();
    g = h / nrm;
    if (it > 2 && std::abs(next - lambda) <= 1e-14 * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return s - lambda;
}

namespace {

struct MomentSet
{
  double alpha = 0.0; // m0 / rho0
  Vec3 beta{};        // m / rho0
  double energy = 0.0; // e / rho0
  double tau1 = 0.0;  // first-order temperature change
};

MomentSet moment_set(const VelocityGrid& grid, std::span<const double> f)
{
  double m0 = 0.0;
  Vec3 m{0.0, 0.0, 0.0};
  double e = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double h = grid.weight(i) * grid.sqrt_mu(i) * f[i];
    const auto& v = grid.node(i);
    m0 += h;
    m[0] += v[0] * h;
    m[1] += v[1] * h;
    m[2] += v[2] * h;
    e += grid.speed2(i) * h;
  }
  MomentSet s;
  s.alpha = m0 / kRho0;
  s.beta = {m[0] / kRho0, m[1] / kRho0, m[2] / kRho0};
  s.energy = e / kRho0;
  s.tau1 = s.energy / 3.0 - s.alpha;
  return s;
}

std::vector<double> bgk_gamma(const CollisionOperator& op, std::span<const double> f,
                              std::span<const double> g)
{
  const auto& grid = op.grid();
  const MomentSet a = moment_set(grid, f);
  const MomentSet b = moment_set(grid, g);
  const double beta_ab = a.beta[0] * b.beta[0] + a.beta[1] * b.beta[1] + a.beta[2] * b.beta[2];
  // Second-order temperature coefficient, polarized.
  const double tau2 = -(a.energy * b.alpha + b.energy * a.alpha) / 6.0 + a.alpha * b.alpha - beta_ab / 3.0;
  const double tau11 = a.tau1 * b.tau1;

  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& v = grid.node(i);
    const double s2 = grid.speed2(i);
    const double vb_a = v[0] * a.beta[0] + v[1] * a.beta[1] + v[2] * a.beta[2];
    const double vb_b = v[0] * b.beta[0] + v[1] * b.beta[1] + v[2] * b.beta[2];
    const double phi1_a = a.alpha - 1.5 * a.tau1 + vb_a + 0.5 * s2 * a.tau1;
    const double phi1_b = b.alpha - 1.5 * b.tau1 + vb_b + 0.5 * s2 * b.tau1;
    const double phi2 = -0.5 * a.alpha * b.alpha - 1.5 * tau2 + 0.75 * tau11 -
                        0.5 * (a.alpha * vb_b + b.alpha * vb_a) - 0.5 * beta_ab -
                        0.5 * (vb_a * b.tau1 + vb_b * a.tau1) - 0.5 * s2 * (tau11 - tau2);
    out[i] = op.model().nu0 * (phi2 + 0.5 * phi1_a * phi1_b) * grid.sqrt_mu(i);
  }
  return out;
}

/// Multilinear interpolation of node values on the tensor grid; zero outside.
class TensorInterpolator
{
 public:
  TensorInterpolator(const VelocityGrid& grid, std::span<const double> values)
      : grid_(grid)
      , values_(values)
  {}

  double operator()(const Vec3& p) const
  {
    std::array<int, 3> lo{};
    std::array<double, 3> t{};
    for (int a = 0; a < 3; ++a) {
      const auto& x = grid_.axis(a).nodes;
      if (p[a] < x.front() || p[a] > x.back()) return 0.0;
      auto it = std::upper_bound(x.begin(), x.end(), p[a]);
      int k = static_cast<int>(it - x.begin()) - 1;
      k = std::clamp(k, 0, static_cast<int>(x.size()) - 2);
      lo[a] = k;
      t[a] = (p[a] - x[k]) / (x[k + 1] - x[k]);
    }
    const auto counts = grid_.axis_counts();
    double sum = 0.0;
    for (int c = 0; c < 8; ++c) {
      const int d0 = c & 1;
      const int d1 = (c >> 1) & 1;
      const int d2 = (c >> 2) & 1;
      const double wt = (d0 ? t[0] : 1.0 - t[0]) * (d1 ? t[1] : 1.0 - t[1]) * (d2 ? t[2] : 1.0 - t[2]);
      const std::size_t idx =
          (static_cast<std::size_t>(lo[0] + d0) * counts[1] + static_cast<std::size_t>(lo[1] + d1)) * counts[2] +
          static_cast<std::size_t>(lo[2] + d2);
      sum += wt * values_[idx];
    }
    return sum;
  }

 private:
  const VelocityGrid& grid_;
  std::span<const double> values_;
};

std::vector<double> hard_sphere_gamma(const CollisionOperator& op, std::span<const double> f,
                                      std::span<const double> g)
{
  // Energy conservation gives sqrt(mu(v')) sqrt(mu(v*')) = sqrt(mu(v)) sqrt(mu(v*)), so
  // Gamma(f, g)(v) = int B sqrt(mu(v*)) [f(v*') g(v') - f(v*) g(v)]. Interpolating f and g
  // themselves avoids dividing interpolation error by sqrt(mu(v)).
  const auto& grid = op.grid();
  const std::size_t n = grid.size();
  const TensorInterpolator interp_f(grid, f);
  const TensorInterpolator interp_g(grid, g);
  const SphereRule sphere = sphere_rule(op.model().angular_nodes);

  std::vector<double> out(n);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& v = grid.node(i);
    double gain = 0.0;
    double loss = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const Vec3& vs = grid.node(j);
      const Vec3 u{v[0] - vs[0], v[1] - vs[1], v[2] - vs[2]};
      double gain_j = 0.0;
      double cross = 0.0;
      for (std::size_t k = 0; k < sphere.directions.size(); ++k) {
        const Vec3& w = sphere.directions[k];
        const double uw = u[0] * w[0] + u[1] * w[1] + u[2] * w[2];
        const double b = std::abs(uw) * sphere.weights[k];
        cross += b;
        if (b == 0.0) continue;
        const Vec3 vp{v[0] - uw * w[0], v[1] - uw * w[1], v[2] - uw * w[2]};
        const Vec3 vsp{vs[0] + uw * w[0], vs[1] + uw * w[1], vs[2] + uw * w[2]};
        gain_j += b * interp_f(vsp) * interp_g(vp);
      }
      const double wj = grid.weight(j) * grid.sqrt_mu(j);
      gain += wj * gain_j;
      loss += wj * cross * f[j];
    }
    out[i] = gain - loss * g[i];
  }
  return out;
}

} // namespace

std::vector<double> apply_Gamma(const CollisionOperator& op, std::span<const double> f,
                                std::span<const double> g)
{
  require(f.size() == op.size() && g.size() == op.size(), "collision.apply_Gamma",
          "input length does not match the grid");
  if (op.model().kind == CollisionKind::bgk_linearized) return bgk_gamma(op, f, g);
  require(op.model().quadratic_quadrature, "collision.apply_Gamma",
          "hard-sphere Gamma needs quadratic_quadrature enabled in the collision model");
  return hard_sphere_gamma(op, f, g);
}

} // namespace slabkin
