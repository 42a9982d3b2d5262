#pragma once

#include "slabkin/velocity.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace slabkin {

enum class CollisionKind
{
  bgk_linearized,
  hard_sphere,
};

std::string to_string(CollisionKind kind);
CollisionKind collision_kind_from_string(const std::string& name);

struct CollisionModel
{
  CollisionKind kind = CollisionKind::bgk_linearized;
  /// Exponent in B = |v|^gamma q0; the hard-sphere kernel is the gamma = 1 case.
  double gamma_exponent = 1.0;
  /// Sphere quadrature resolution: angular_nodes azimuthal x angular_nodes/2 polar.
  int angular_nodes = 8;
  /// BGK collision frequency.
  double nu0 = 1.0;
  /// Enables the direct quadrature of the hard-sphere quadratic term.
  bool quadratic_quadrature = false;

  void validate() const;
  std::string describe() const;
  std::uint64_t hash() const;
};

/// Tolerances by model.
inline constexpr double tol_null_bgk = 1e-10;
inline constexpr double tol_null_hard_sphere = 1e-6;
inline constexpr double tol_sym = 1e-8;

double tol_null(const CollisionModel& model);

/// L = nu - K on a velocity grid.
///
/// Functions are stored as node values of the sqrt(mu)-weighted perturbation.
/// The inner product is the grid quadrature <f, g> = sum_i w_i f_i g_i, and
/// `k_matrix` holds K with the weights folded in, so (K f)_i = sum_j K_ij f_j.
/// The BGK operator keeps K implicit (K = nu0 P).
class CollisionOperator
{
 public:
  CollisionOperator(CollisionModel model, VelocityGrid grid, std::vector<double> nu,
                    std::optional<Eigen::MatrixXd> k_matrix);

  const CollisionModel& model() const noexcept { return model_; }
  const VelocityGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return grid_.size(); }
  const std::vector<double>& nu() const noexcept { return nu_; }
  bool has_dense_k() const noexcept { return k_matrix_.has_value(); }
  const Eigen::MatrixXd& k_matrix() const { return *k_matrix_; }

  /// Nv x 5 basis of the collision invariants, orthonormal under the grid
  /// quadrature (modified Gram-Schmidt, two passes).
  const Eigen::MatrixXd& p_basis() const noexcept { return p_basis_; }
  /// Nv x 5 raw basis {1, v1, v2, v3, (|v|^2 - 3)/2} sqrt(mu).
  const Eigen::MatrixXd& raw_basis() const noexcept { return raw_basis_; }
  /// Gram matrix of the raw basis under the grid quadrature.
  const Eigen::Matrix<double, 5, 5>& gram() const noexcept { return gram_; }

  /// K applied to one velocity vector; `out` must not alias `in`.
  void apply_k(std::span<const double> in, std::span<double> out) const;
  /// P applied to one velocity vector.
  void apply_p(std::span<const double> in, std::span<double> out) const;

  std::uint64_t hash() const noexcept { return hash_; }

 private:
  CollisionModel model_;
  VelocityGrid grid_;
  std::vector<double> nu_;
  std::optional<Eigen::MatrixXd> k_matrix_;
  Eigen::MatrixXd raw_basis_;
  Eigen::MatrixXd p_basis_;
  Eigen::Matrix<double, 5, 5> gram_;
  std::uint64_t hash_ = 0;
};

/// Assembles L for the model on the grid.
///
/// BGK: nu = nu0 and K = nu0 P, so L = nu0 (I - P).
///
/// Hard sphere (q0 = |cos|): nu(v) = A * sqrt(2 pi) E|v - Z| in closed form,
/// where A is the sphere-quadrature value of the angular integral of q0. K uses
/// the Hilbert-Grad kernels k2 - k1, with the 1/|v - v*| singularity of k2
/// handled by subtracting K2 sqrt(mu) = 2 nu sqrt(mu) on the diagonal. The
/// result is then restricted to the complement of the collision invariants,
/// L <- (I - P) L (I - P), which makes conservation exact on the grid and keeps
/// L symmetric.
CollisionOperator assemble(const CollisionModel& model, const VelocityGrid& grid);

/// nu(v) for hard spheres with q0 = |cos|: 2 pi sqrt(2 pi) E|v - Z|, Z ~ N(0, I).
double hard_sphere_nu(double speed);

std::vector<double> apply_L(const CollisionOperator& op, std::span<const double> f);
std::vector<double> apply_K(const CollisionOperator& op, std::span<const double> f);

struct Projection
{
  double a = 0.0;
  Vec3 b{0.0, 0.0, 0.0};
  double c = 0.0;
  std::vector<double> pf;
};

/// Orthogonal projection onto the collision invariants, with coordinates in
/// the raw basis {1, v, (|v|^2 - 3)/2} sqrt(mu).
Projection project_P(const CollisionOperator& op, std::span<const double> f);

/// Smallest <Lf, f> / <nu f, f> over f orthogonal to the invariants.
double spectral_gap(const CollisionOperator& op);

/// Gamma(f, g) = Q(sqrt(mu) f, sqrt(mu) g) / sqrt(mu).
///
/// BGK: the second-order term of nu0 M[mu + sqrt(mu) h] in h, polarized to a
/// symmetric bilinear form; it conserves mass, momentum and energy.
/// Hard sphere: direct (v*, omega) quadrature with multilinear interpolation
/// of sqrt(mu) f at post-collision velocities; needs quadratic_quadrature.
std::vector<double> apply_Gamma(const CollisionOperator& op, std::span<const double> f,
                                std::span<const double> g);

/// Product sphere rule: azimuthal uniform x polar Gauss-Legendre split at the
/// equator. Returns unit vectors and weights summing to 4 pi.
struct SphereRule
{
  std::vector<Vec3> directions;
  std::vector<double> weights;
};
SphereRule sphere_rule(int angular_nodes);

} // namespace slabkin
