#include "slabkin/kernels.hpp"

#include <cmath>

namespace slabkin::kernels {

double phi(double tau)
{
  if (tau < 1e-8) return 1.0 - 0.5 * tau;
  return -std::expm1(-tau) / tau;
}

double closure_ratio(double tau)
{
  if (tau < 1e-3) {
    // Series of (1 - e^-t) / (1 - phi(t)); avoids the cancellation in 1 - phi.
    const double one_minus_e = tau * (1.0 - tau / 2.0 + tau * tau / 6.0 - tau * tau * tau / 24.0);
    const double one_minus_phi = tau * (0.5 - tau / 6.0 + tau * tau / 24.0 - tau * tau * tau / 120.0);
    return one_minus_e / one_minus_phi;
  }
  return -std::expm1(-tau) / (1.0 - phi(tau));
}

namespace {

inline void sweep_node(const SweepProblem& p, std::size_t i, double* cells, double* faces)
{
  const std::size_t nv = p.nv;
  const std::size_t n = p.n_cells;
  const double v = p.v1[i];
  const double sigma = p.sigma[i];
  const double tau = sigma * p.dx / std::abs(v);
  const double e = std::exp(-tau);
  const double ph = phi(tau);
  double in = p.incoming[i];
  if (v > 0.0) {
    faces[i] = in;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = p.source[j * nv + i] / sigma;
      cells[j * nv + i] = a + (in - a) * ph;
      in = a + (in - a) * e;
      faces[(j + 1) * nv + i] = in;
    }
  } else {
    faces[n * nv + i] = in;
    for (std::size_t jj = n; jj-- > 0;) {
      const double a = p.source[jj * nv + i] / sigma;
      cells[jj * nv + i] = a + (in - a) * ph;
      in = a + (in - a) * e;
      faces[jj * nv + i] = in;
    }
  }
}

inline void closure_node(const SweepProblem& p, double inv_dt, const double* previous, std::size_t i,
                         double* cells, double* faces)
{
  const std::size_t nv = p.nv;
  const std::size_t n = p.n_cells;
  const double v = p.v1[i];
  const double speed = std::abs(v) / p.dx;
  const double sigma = p.sigma[i];
  const double tau = sigma * p.dx / std::abs(v);
  const double e = std::exp(-tau);
  const double ph = phi(tau);
  const double rho = closure_ratio(tau);
  const double k_in = speed * (1.0 + rho * ph - e);
  const double diag = inv_dt + sigma + rho * speed;
  const double pass = e - rho * ph;
  double in = p.incoming[i];
  auto cell = [&](std::size_t j) {
    const std::size_t idx = j * nv + i;
    const double avg = (p.source[idx] + previous[idx] * inv_dt + k_in * in) / diag;
    cells[idx] = avg;
    in = in * pass + rho * avg;
  };
  if (v > 0.0) {
    faces[i] = in;
    for (std::size_t j = 0; j < n; ++j) {
      cell(j);
      faces[(j + 1) * nv + i] = in;
    }
  } else {
    faces[n * nv + i] = in;
    for (std::size_t jj = n; jj-- > 0;) {
      cell(jj);
      faces[jj * nv + i] = in;
    }
  }
}

} // namespace

void sweep_serial(const SweepProblem& p, std::span<double> cells, std::span<double> faces)
{
  for (std::size_t i = 0; i < p.nv; ++i) sweep_node(p, i, cells.data(), faces.data());
}

void sweep_parallel(const SweepProblem& p, std::span<double> cells, std::span<double> faces)
{
  const auto nv = static_cast<long>(p.nv);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < nv; ++i) sweep_node(p, static_cast<std::size_t>(i), cells.data(), faces.data());
}

void closure_step_serial(const SweepProblem& p, double inv_dt, std::span<const double> previous,
                         std::span<double> cells, std::span<double> faces)
{
  for (std::size_t i = 0; i < p.nv; ++i) closure_node(p, inv_dt, previous.data(), i, cells.data(), faces.data());
}

void closure_step_parallel(const SweepProblem& p, double inv_dt, std::span<const double> previous,
                           std::span<double> cells, std::span<double> faces)
{
  const auto nv = static_cast<long>(p.nv);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < nv; ++i) {
    closure_node(p, inv_dt, previous.data(), static_cast<std::size_t>(i), cells.data(), faces.data());
  }
}

void apply_k_cells_serial(const CollisionOperator& op, std::size_t n_cells, std::span<const double> in,
                          std::span<double> out)
{
  const std::size_t nv = op.size();
  for (std::size_t j = 0; j < n_cells; ++j) {
    op.apply_k(in.subspan(j * nv, nv), out.subspan(j * nv, nv));
  }
}

void apply_k_cells_parallel(const CollisionOperator& op, std::size_t n_cells, std::span<const double> in,
                            std::span<double> out)
{
  const std::size_t nv = op.size();
  const auto n = static_cast<long>(n_cells);
#pragma omp parallel for schedule(static)
  for (long j = 0; j < n; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    op.apply_k(in.subspan(jj * nv, nv), out.subspan(jj * nv, nv));
  }
}

} // namespace slabkin::kernels
