#include "slabkin/velocity.hpp"

#include "slabkin/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

namespace slabkin {

namespace quadrature {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights the
// squared first eigenvector components times the total mass.
Rule from_recurrence(const std::vector<double>& alpha, const std::vector<double>& beta,
                     double mass)
{
  const auto n = static_cast<Eigen::Index>(alpha.size());
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max<Eigen::Index>(n - 1, 0));
  for (Eigen::Index k = 0; k < n; ++k) diag(k) = alpha[k];
  for (Eigen::Index k = 0; k + 1 < n; ++k) sub(k) = std::sqrt(beta[k + 1]);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);

  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    rule.nodes[k] = solver.eigenvalues()(k);
    const double first = solver.eigenvectors()(0, k);
    rule.weights[k] = mass * first * first;
  }
  return rule;
}

} // namespace

Rule gauss_legendre(int n)
{
  require(n >= 1, "quadrature", "Gauss-Legendre needs at least one point");
  std::vector<double> alpha(n, 0.0);
  std::vector<double> beta(n, 0.0);
  for (int k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    beta[k] = kk * kk / (4.0 * kk * kk - 1.0);
  }
  Rule rule = from_recurrence(alpha, beta, 2.0);
  // Enforce exact symmetry of the node set.
  for (int k = 0; k < n / 2; ++k) {
    const double x = 0.5 * (rule.nodes[n - 1 - k] - rule.nodes[k]);
    const double w = 0.5 * (rule.weights[n - 1 - k] + rule.weights[k]);
    rule.nodes[k] = -x;
    rule.nodes[n - 1 - k] = x;
    rule.weights[k] = rule.weights[n - 1 - k] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

Rule truncated_gaussian(int m, double upper)
{
  require(m >= 1, "quadrature", "truncated Gaussian rule needs at least one point");
  require(upper > 0.0, "quadrature", "upper limit must be positive");

  // Discretized Stieltjes procedure on a fine composite Gauss-Legendre measure.
  constexpr int panels = 96;
  constexpr int per_panel = 24;
  const Rule base = gauss_legendre(per_panel);
  std::vector<double> t;
  std::vector<double> w;
  t.reserve(panels * per_panel);
  w.reserve(panels * per_panel);
  const double h = upper / panels;
  for (int p = 0; p < panels; ++p) {
    const double left = p * h;
    for (int k = 0; k < per_panel; ++k) {
      const double x = left + 0.5 * h * (base.nodes[k] + 1.0);
      t.push_back(x);
      w.push_back(0.5 * h * base.weights[k] * std::exp(-0.5 * x * x));
    }
  }

  // Orthonormal three-term recurrence (Lanczos form of Stieltjes).
  const std::size_t n = t.size();
  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) mass += w[i];
  std::vector<double> q_prev(n, 0.0);
  std::vector<double> q_cur(n, 1.0 / std::sqrt(mass));
  std::vector<double> r(n);
  std::vector<double> alpha(m);
  std::vector<double> beta(m, 0.0);
  double b_prev = 0.0;
  for (int k = 0; k < m; ++k) {
    double a = 0.0;
    for (std::size_t i = 0; i < n; ++i) a += w[i] * t[i] * q_cur[i] * q_cur[i];
    alpha[k] = a;
    double norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = (t[i] - a) * q_cur[i] - b_prev * q_prev[i];
      norm2 += w[i] * r[i] * r[i];
    }
    const double b = std::sqrt(norm2);
    if (k + 1 < m) beta[k + 1] = norm2;
    for (std::size_t i = 0; i < n; ++i) {
      q_prev[i] = q_cur[i];
      q_cur[i] = r[i] / b;
    }
    b_prev = b;
  }
  return from_recurrence(alpha, beta, mass);
}

} // namespace quadrature

std::string to_string(GridKind kind)
{
  return kind == GridKind::gauss ? "gauss" : "uniform-midpoint";
}

GridKind grid_kind_from_string(const std::string& name)
{
  if (name == "gauss") return GridKind::gauss;
  if (name == "uniform-midpoint") return GridKind::uniform_midpoint;
  throw InvalidArgument("VelocityGrid.kind", "unknown grid kind '" + name + "'");
}

namespace {

constexpr const char* kGridWhere = "VelocityGrid";

void fnv_mix(std::uint64_t& h, const void* data, std::size_t bytes)
{
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
}

quadrature::Rule axis_rule(int count, double v_max, GridKind kind)
{
  quadrature::Rule rule;
  rule.nodes.resize(count);
  rule.weights.resize(count);
  if (kind == GridKind::uniform_midpoint) {
    const double h = 2.0 * v_max / count;
    for (int k = 0; k < count; ++k) {
      rule.nodes[k] = -v_max + (k + 0.5) * h;
      rule.weights[k] = h;
    }
    // Exact mirror symmetry.
    for (int k = 0; k < count / 2; ++k) rule.nodes[count - 1 - k] = -rule.nodes[k];
    return rule;
  }
  const int m = count / 2;
  const quadrature::Rule half = quadrature::truncated_gaussian(m, v_max);
  for (int k = 0; k < m; ++k) {
    const double t = half.nodes[k];
    const double w = half.weights[k] * std::exp(0.5 * t * t);
    rule.nodes[m + k] = t;
    rule.weights[m + k] = w;
    rule.nodes[m - 1 - k] = -t;
    rule.weights[m - 1 - k] = w;
  }
  return rule;
}

} // namespace

VelocityGrid::VelocityGrid(std::array<int, 3> counts, double v_max, GridKind kind,
                           std::array<quadrature::Rule, 3> axes)
    : counts_(counts)
    , v_max_(v_max)
    , kind_(kind)
    , axes_(std::move(axes))
{
  const std::size_t total = static_cast<std::size_t>(counts[0]) * counts[1] * counts[2];
  nodes_.reserve(total);
  weights_.reserve(total);
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  for (int i1 = 0; i1 < counts[0]; ++i1) {
    for (int i2 = 0; i2 < counts[1]; ++i2) {
      for (int i3 = 0; i3 < counts[2]; ++i3) {
        const Vec3 v{axes_[0].nodes[i1], axes_[1].nodes[i2], axes_[2].nodes[i3]};
        nodes_.push_back(v);
        weights_.push_back(axes_[0].weights[i1] * axes_[1].weights[i2] * axes_[2].weights[i3]);
        const double s2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        speed2_.push_back(s2);
        sqrt_mu_.push_back(inv_sqrt_2pi * std::exp(-0.25 * s2));
        if (v[0] > 0.0) positive_.push_back(nodes_.size() - 1);
        else negative_.push_back(nodes_.size() - 1);
      }
    }
  }

  std::uint64_t h = 1469598103934665603ULL;
  fnv_mix(h, counts_.data(), sizeof(counts_));
  fnv_mix(h, &v_max_, sizeof(v_max_));
  const int k = static_cast<int>(kind_);
  fnv_mix(h, &k, sizeof(k));
  fnv_mix(h, nodes_.data(), nodes_.size() * sizeof(Vec3));
  fnv_mix(h, weights_.data(), weights_.size() * sizeof(double));
  hash_ = h;
}

std::size_t VelocityGrid::reflect_all(std::size_t i) const
{
  const std::size_t n2 = counts_[1];
  const std::size_t n3 = counts_[2];
  const std::size_t i3 = i % n3;
  const std::size_t i2 = (i / n3) % n2;
  const std::size_t i1 = i / (n2 * n3);
  return ((counts_[0] - 1 - i1) * n2 + (n2 - 1 - i2)) * n3 + (n3 - 1 - i3);
}

std::size_t VelocityGrid::reflect_v1(std::size_t i) const
{
  const std::size_t block = static_cast<std::size_t>(counts_[1]) * counts_[2];
  const std::size_t i1 = i / block;
  return (counts_[0] - 1 - i1) * block + i % block;
}

std::size_t VelocityGrid::swap_v2_v3(std::size_t i) const
{
  const std::size_t n2 = counts_[1];
  const std::size_t n3 = counts_[2];
  const std::size_t i3 = i % n3;
  const std::size_t i2 = (i / n3) % n2;
  const std::size_t i1 = i / (n2 * n3);
  return (i1 * n2 + i3) * n3 + i2;
}

VelocityGrid build_grid(std::array<int, 3> counts, double v_max, GridKind kind)
{
  for (int a = 0; a < 3; ++a) {
    require(counts[a] >= 4, kGridWhere,
            "axis count " + std::to_string(counts[a]) + " below the minimum of 4");
    require(counts[a] % 2 == 0, kGridWhere,
            "odd axis count " + std::to_string(counts[a]) +
                " would place a node on the grazing set v1 = 0");
  }
  require(counts[1] == counts[2], kGridWhere,
          "v2 and v3 axis counts must match to keep the v2 <-> v3 symmetry");
  require(v_max >= 5.0, kGridWhere, "v_max below 5 loses Gaussian mass above tolerance");

  std::array<quadrature::Rule, 3> axes{axis_rule(counts[0], v_max, kind),
                                       axis_rule(counts[1], v_max, kind),
                                       axis_rule(counts[2], v_max, kind)};
  return VelocityGrid(counts, v_max, kind, std::move(axes));
}

VelocityGrid default_grid() { return build_grid({24, 16, 16}, 7.0, GridKind::gauss); }

double integrate(const VelocityGrid& grid, std::span<const double> values)
{
  require(values.size() == grid.size(), "velocity.integrate",
          "values length does not match the grid");
  double sum = 0.0;
  const auto& w = grid.weights();
  for (std::size_t i = 0; i < values.size(); ++i) sum += w[i] * values[i];
  return sum;
}

double half_space_flux(const VelocityGrid& grid, std::span<const double> values, HalfSpace side)
{
  require(values.size() == grid.size(), "velocity.half_space_flux",
          "values length does not match the grid");
  double sum = 0.0;
  for (std::size_t i : grid.half(side)) {
    sum += grid.weight(i) * std::abs(grid.v1(i)) * values[i];
  }
  return sum;
}

Polynomial Polynomial::constant(double c) { return monomial(0, 0, 0, c); }

Polynomial Polynomial::monomial(int e1, int e2, int e3, double coef)
{
  Polynomial p;
  p.terms_[{e1, e2, e3}] = coef;
  p.prune();
  return p;
}

Polynomial Polynomial::component(int axis)
{
  Exponents e{0, 0, 0};
  e[axis] = 1;
  return monomial(e[0], e[1], e[2]);
}

Polynomial Polynomial::speed2()
{
  return monomial(2, 0, 0) + monomial(0, 2, 0) + monomial(0, 0, 2);
}

int Polynomial::degree() const
{
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2]);
  return d;
}

double Polynomial::operator()(const Vec3& v) const
{
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    sum += c * std::pow(v[0], e[0]) * std::pow(v[1], e[1]) * std::pow(v[2], e[2]);
  }
  return sum;
}

Polynomial& Polynomial::operator+=(const Polynomial& other)
{
  for (const auto& [e, c] : other.terms_) terms_[e] += c;
  prune();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other)
{
  for (const auto& [e, c] : other.terms_) terms_[e] -= c;
  prune();
  return *this;
}

Polynomial& Polynomial::operator*=(double s)
{
  for (auto& [e, c] : terms_) c *= s;
  prune();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b)
{
  Polynomial out;
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      out.terms_[{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}] += ca * cb;
    }
  }
  out.prune();
  return out;
}

void Polynomial::prune()
{
  std::erase_if(terms_, [](const auto& kv) { return kv.second == 0.0; });
}

double gaussian_moment(const VelocityGrid& grid, const Polynomial& poly)
{
  require(poly.degree() <= max_moment_degree, "velocity.gaussian_moment",
          "polynomial degree " + std::to_string(poly.degree()) +
              " exceeds the supported degree 8");
  // mu = sqrt_mu^2, evaluated per node.
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = grid.sqrt_mu(i);
    values[i] = poly(grid.node(i)) * s * s;
  }
  return integrate(grid, values);
}

} // namespace slabkin
