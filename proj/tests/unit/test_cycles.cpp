#include "oracles.hpp"
#include "slabkin/cycles.hpp"

#include <doctest.h>

#include <cmath>
#include <omp.h>

using namespace slabkin;

TEST_CASE("wall velocities follow the flux measure")
{
  CycleRng rng(123);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0, t2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const Vec3 v = sample_wall_velocity(rng);
    REQUIRE(v[0] > 0.0);
    s1 += v[0];
    s2 += v[0] * v[0];
    t2 += v[1] * v[1];
  }
  // Rayleigh: E v1 = sqrt(pi/2), E v1^2 = 2
  CHECK(s1 / n == doctest::Approx(std::sqrt(oracle::pi / 2.0)).epsilon(5e-3));
  CHECK(s2 / n == doctest::Approx(2.0).epsilon(5e-3));
  CHECK(t2 / n == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("cycle record structure")
{
  CycleRng rng(5);
  const CycleRecord r = run_cycle(3.0, WallSide::left, 50, rng);
  REQUIRE(r.bounce_times.size() >= 2);
  CHECK(r.bounce_times.front() == 3.0);
  for (std::size_t k = 1; k < r.bounce_times.size(); ++k) {
    CHECK(r.bounce_times[k] < r.bounce_times[k - 1]);
    CHECK(r.walls[k] != r.walls[k - 1]);
    CHECK(r.bounce_times[k] == doctest::Approx(r.bounce_times[k - 1] - 1.0 / std::abs(r.velocities[k - 1][0])));
  }
  if (r.reached_zero_at) {
    const int l = *r.reached_zero_at;
    CHECK(r.bounce_times[l] > 0.0);
    CHECK(r.bounce_times[l + 1] <= 0.0);
  }
}

TEST_CASE("nonreach probabilities are nested and shrink")
{
  const auto curve = nonreach_curve(5.0, 20, 40000, 9);
  REQUIRE(curve.size() == 20u);
  for (std::size_t k = 1; k < curve.size(); ++k) {
    CHECK(curve[k].hits <= curve[k - 1].hits);
    CHECK(curve[k].lo <= curve[k].p);
    CHECK(curve[k].p <= curve[k].hi);
  }
  // one bounce never reaches t = 0 from T0 = 5 unless v1 < 1/5
  CHECK(curve.front().p == doctest::Approx(std::exp(-0.5 / 25.0)).epsilon(5e-3));
  CHECK(curve.back().p < 0.05);
  CHECK(nonreach_probability(5.0, 7, 40000, 9).hits == curve[6].hits);
}

TEST_CASE("estimates do not depend on the thread count")
{
  omp_set_num_threads(1);
  const auto a = nonreach_curve(4.0, 10, 20000, 77);
  const auto ma = mean_bounce_time(20000, 77);
  omp_set_num_threads(4);
  const auto b = nonreach_curve(4.0, 10, 20000, 77);
  const auto mb = mean_bounce_time(20000, 77);
  omp_set_num_threads(1);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].hits == b[k].hits);
  CHECK(ma.mean == mb.mean);
  CHECK(ma.std_error == mb.std_error);
  CHECK(substream_seed(1, 2) != substream_seed(1, 3));
  CHECK(substream_seed(1, 2) != substream_seed(2, 2));
}

TEST_CASE("mean bounce time")
{
  const auto s = mean_bounce_time(200000, 4);
  CHECK(std::abs(s.mean - oracle::mean_bounce_time()) < 4.0 * s.std_error);
  CHECK(s.samples == 200000u);
}
