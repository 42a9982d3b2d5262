#include "slabkin/krylov.hpp"

#include <cmath>

namespace slabkin {

double dot(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

GmresResult gmres(const LinearMap& a, std::span<const double> b, std::span<double> x, const GmresOptions& options,
                  const std::function<bool(std::span<const double>)>& accept)
{
  const std::size_t n = b.size();
  const int m = options.restart;
  double target = options.tol;
  GmresResult result;

  std::vector<std::vector<double>> basis(static_cast<std::size_t>(m) + 1, std::vector<double>(n));
  std::vector<double> h(static_cast<std::size_t>((m + 1) * m), 0.0);
  auto hij = [&](int i, int j) -> double& { return h[static_cast<std::size_t>(j * (m + 1) + i)]; };
  std::vector<double> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m));
  std::vector<double> g(static_cast<std::size_t>(m) + 1);
  std::vector<double> w(n);

  while (true) {
    a(x, w);
    auto& v0 = basis[0];
    for (std::size_t i = 0; i < n; ++i) v0[i] = b[i] - w[i];
    double beta = norm2(v0);
    result.residual = beta;
    if (beta <= target) {
      if (!accept || accept(x)) {
        result.converged = true;
        return result;
      }
      target *= 0.1;
      continue;
    }
    if (result.iterations >= options.max_iter) return result;

    for (auto& v : v0) v /= beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int k = 0;
    for (; k < m && result.iterations < options.max_iter; ++k) {
      ++result.iterations;
      auto& vk1 = basis[static_cast<std::size_t>(k) + 1];
      a(basis[static_cast<std::size_t>(k)], vk1);
      for (int j = 0; j <= k; ++j) {
        const double hj = dot(vk1, basis[static_cast<std::size_t>(j)]);
        hij(j, k) = hj;
        const auto& vj = basis[static_cast<std::size_t>(j)];
        for (std::size_t i = 0; i < n; ++i) vk1[i] -= hj * vj[i];
      }
      const double hn = norm2(vk1);
      hij(k + 1, k) = hn;
      if (hn > 0.0) {
        for (auto& v : vk1) v /= hn;
      }
      for (int j = 0; j < k; ++j) {
        const double t = cs[j] * hij(j, k) + sn[j] * hij(j + 1, k);
        hij(j + 1, k) = -sn[j] * hij(j, k) + cs[j] * hij(j + 1, k);
        hij(j, k) = t;
      }
      const double r = std::hypot(hij(k, k), hij(k + 1, k));
      cs[k] = hij(k, k) / r;
      sn[k] = hij(k + 1, k) / r;
      hij(k, k) = r;
      hij(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      const double est = std::abs(g[k + 1]);
      result.history.push_back(est);
      if (est <= target || hn == 0.0) {
        ++k;
        break;
      }
    }
    // Back substitution and update.
    std::vector<double> y(static_cast<std::size_t>(k));
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= hij(i, j) * y[j];
      y[i] = s / hij(i, i);
    }
    for (int j = 0; j < k; ++j) {
      const auto& vj = basis[static_cast<std::size_t>(j)];
      for (std::size_t i = 0; i < n; ++i) x[i] += y[j] * vj[i];
    }
  }
}

} // namespace slabkin
