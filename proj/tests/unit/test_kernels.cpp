#include "slabkin/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <omp.h>
#include <random>

using namespace slabkin;

namespace {

struct Problem
{
  std::vector<double> v1, sigma, source, incoming, prev;
  kernels::SweepProblem view(std::size_t n) const
  {
    return {n, v1.size(), 1.0 / n, v1, sigma, source, incoming};
  }
};

Problem random_problem(std::size_t n, std::size_t nv, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Problem p;
  for (std::size_t i = 0; i < nv; ++i) {
    double v = u(rng);
    if (std::abs(v) < 1e-3) v = 0.5;
    p.v1.push_back(v);
    p.sigma.push_back(0.1 + 3.0 * std::abs(u(rng)));
    p.incoming.push_back(u(rng));
  }
  for (std::size_t k = 0; k < n * nv; ++k) {
    p.source.push_back(u(rng));
    p.prev.push_back(u(rng));
  }
  return p;
}

} // namespace

TEST_CASE("phi and closure ratio are smooth across the series switch")
{
  for (double t : {1e-9, 1e-6, 9.99e-4, 1.001e-3, 0.1, 1.0, 30.0}) {
    // long double keeps the reference free of cancellation down to t = 1e-9
    const long double tl = t;
    CHECK(kernels::phi(t) == doctest::Approx(static_cast<double>((1.0L - std::exp(-tl)) / tl)).epsilon(1e-8));
  }
  CHECK(kernels::closure_ratio(0.999e-3) == doctest::Approx(kernels::closure_ratio(1.001e-3)).epsilon(1e-5));
  CHECK(kernels::closure_ratio(1e-10) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("sweep matches the exact exponential solution on one cell")
{
  Problem p;
  p.v1 = {0.7, -0.4};
  p.sigma = {2.0, 1.5};
  p.source = {3.0, -1.0};
  p.incoming = {0.25, 2.0};
  std::vector<double> cells(2), faces(4);
  kernels::sweep_serial(p.view(1), cells, faces);
  for (int i = 0; i < 2; ++i) {
    const double tau = p.sigma[i] / std::abs(p.v1[i]);
    const double a = p.source[i] / p.sigma[i];
    const double out = a + (p.incoming[i] - a) * std::exp(-tau);
    // average of the exact solution over the cell
    const double avg = a + (p.incoming[i] - a) * (1.0 - std::exp(-tau)) / tau;
    CHECK(cells[i] == doctest::Approx(avg).epsilon(1e-14));
    CHECK(faces[i == 0 ? 2 : 1] == doctest::Approx(out).epsilon(1e-14));
  }
}

TEST_CASE("parallel kernels equal the serial references bit for bit")
{
  const std::size_t n = 17, nv = 203;
  const Problem p = random_problem(n, nv, 42);
  std::vector<double> c1(n * nv), f1((n + 1) * nv), c2(n * nv), f2((n + 1) * nv);
  for (int threads : {1, 2, 4}) {
    omp_set_num_threads(threads);
    kernels::sweep_serial(p.view(n), c1, f1);
    kernels::sweep_parallel(p.view(n), c2, f2);
    CHECK(c1 == c2);
    CHECK(f1 == f2);
    kernels::closure_step_serial(p.view(n), 10.0, p.prev, c1, f1);
    kernels::closure_step_parallel(p.view(n), 10.0, p.prev, c2, f2);
    CHECK(c1 == c2);
    CHECK(f1 == f2);
  }
  omp_set_num_threads(1);
}

TEST_CASE("closure step has the steady sweep as a fixed point")
{
  const std::size_t n = 9, nv = 31;
  Problem p = random_problem(n, nv, 3);
  std::vector<double> cs(n * nv), fs((n + 1) * nv), cc(n * nv), fc((n + 1) * nv);
  kernels::sweep_serial(p.view(n), cs, fs);
  kernels::closure_step_serial(p.view(n), 7.0, cs, cc, fc);
  for (std::size_t k = 0; k < cs.size(); ++k) CHECK(cc[k] == doctest::Approx(cs[k]).epsilon(1e-12));
  for (std::size_t k = 0; k < fs.size(); ++k) CHECK(fc[k] == doctest::Approx(fs[k]).epsilon(1e-12));
}
