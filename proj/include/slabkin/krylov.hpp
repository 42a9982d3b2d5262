#pragma once

#include <functional>
#include <span>
#include <vector>

namespace slabkin {

using LinearMap = std::function<void(std::span<const double> in, std::span<double> out)>;

struct GmresOptions
{
  int restart = 60;
  int max_iter = 3000;
  /// Target for the 2-norm of b - A x.
  double tol = 1e-10;
};

struct GmresResult
{
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;
  /// 2-norm residual estimate after every inner iteration.
  std::vector<double> history;
};

/// Restarted GMRES(m) with modified Gram-Schmidt Arnoldi and Givens rotations.
/// `x` holds the initial guess on entry. When `accept` is given it is asked at
/// every point where the 2-norm target is met; returning false tightens the
/// target by 10x and continues. All reductions run serially in index order.
GmresResult gmres(const LinearMap& a, std::span<const double> b, std::span<double> x, const GmresOptions& options,
                  const std::function<bool(std::span<const double>)>& accept = {});

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

} // namespace slabkin
