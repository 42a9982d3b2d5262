#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace slabkin {

using Vec3 = std::array<double, 3>;

/// Default quadrature tolerance for Gaussian moments on the default grid.
inline constexpr double tol_quad = 1e-6;

namespace quadrature {

struct Rule
{
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
Rule gauss_legendre(int n);

/// m-point Gauss rule for the weight exp(-t^2/2) restricted to [0, upper].
/// Weights integrate against that weight (not against dt).
Rule truncated_gaussian(int m, double upper);

} // namespace quadrature

enum class GridKind
{
  uniform_midpoint,
  gauss,
};

std::string to_string(GridKind kind);
GridKind grid_kind_from_string(const std::string& name);

enum class HalfSpace
{
  positive, // v1 > 0
  negative, // v1 < 0
};

/// Tensor-product velocity grid over R^3 in thermal-speed units.
///
/// Nodes are stored with the v1 index slowest, so node (i1, i2, i3) sits at
/// position (i1 * n2 + i2) * n3 + i3. Every axis rule is symmetric about zero
/// and has an even number of points, which keeps v1 = 0 off the grid.
/// Immutable after construction.
class VelocityGrid
{
 public:
  VelocityGrid(std::array<int, 3> counts, double v_max, GridKind kind,
               std::array<quadrature::Rule, 3> axes);

  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<Vec3>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double v_max() const noexcept { return v_max_; }
  std::array<int, 3> axis_counts() const noexcept { return counts_; }
  GridKind kind() const noexcept { return kind_; }

  const Vec3& node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  double v1(std::size_t i) const { return nodes_[i][0]; }
  double speed2(std::size_t i) const { return speed2_[i]; }
  /// sqrt(mu(v_i)) with mu the unit-temperature Maxwellian.
  double sqrt_mu(std::size_t i) const { return sqrt_mu_[i]; }
  std::span<const double> sqrt_mu() const { return sqrt_mu_; }

  /// Nodes with v1 > 0 (incoming at x = -1/2) or v1 < 0 (incoming at x = +1/2).
  const std::vector<std::size_t>& half(HalfSpace side) const
  {
    return side == HalfSpace::positive ? positive_ : negative_;
  }

  /// Index of the node at -v.
  std::size_t reflect_all(std::size_t i) const;
  /// Index of the node at (-v1, v2, v3).
  std::size_t reflect_v1(std::size_t i) const;
  /// Index of the node at (v1, v3, v2).
  std::size_t swap_v2_v3(std::size_t i) const;

  const quadrature::Rule& axis(int a) const { return axes_[a]; }

  /// FNV-1a hash over the grid definition and node data.
  std::uint64_t hash() const noexcept { return hash_; }

 private:
  std::array<int, 3> counts_;
  double v_max_;
  GridKind kind_;
  std::array<quadrature::Rule, 3> axes_;
  std::vector<Vec3> nodes_;
  std::vector<double> weights_;
  std::vector<double> speed2_;
  std::vector<double> sqrt_mu_;
  std::vector<std::size_t> positive_;
  std::vector<std::size_t> negative_;
  std::uint64_t hash_ = 0;
};

/// Builds a tensor grid. Axis counts must be even and >= 4, counts for v2 and
/// v3 must agree, and v_max >= 5.
///
/// `uniform_midpoint` places midpoints of equal cells on [-v_max, v_max].
/// `gauss` mirrors a Gauss rule for exp(-t^2/2) on [0, v_max] onto both
/// half-lines; that rule integrates half-space flux moments to round-off,
/// which the midpoint rule cannot (its error at the v1 = 0 kink is O(h^2)).
VelocityGrid build_grid(std::array<int, 3> counts, double v_max, GridKind kind);

/// The grid used when nothing else is requested: (24,16,16), v_max = 7, gauss.
VelocityGrid default_grid();

/// Sum of weight_i * values_i in node order.
double integrate(const VelocityGrid& grid, std::span<const double> values);

/// Sum over nodes with sign*v1 > 0 of weight_i * |v1_i| * values_i.
double half_space_flux(const VelocityGrid& grid, std::span<const double> values,
                       HalfSpace side);

/// Polynomial in (v1, v2, v3) with real coefficients, keyed by exponents.
class Polynomial
{
 public:
  using Exponents = std::array<int, 3>;

  Polynomial() = default;
  static Polynomial constant(double c);
  static Polynomial monomial(int e1, int e2, int e3, double coef = 1.0);
  static Polynomial component(int axis); // v_axis, axis in {0,1,2}
  static Polynomial speed2();            // |v|^2

  int degree() const;
  double operator()(const Vec3& v) const;
  const std::map<Exponents, double>& terms() const { return terms_; }

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

 private:
  void prune();
  std::map<Exponents, double> terms_;
};

inline constexpr int max_moment_degree = 8;

/// Integral of poly(v) * mu(v) over R^3 by grid quadrature (degree <= 8).
double gaussian_moment(const VelocityGrid& grid, const Polynomial& poly);

} // namespace slabkin
