#include "slabkin/cycles.hpp"

#include "slabkin/error.hpp"

#include <cmath>

namespace slabkin {

namespace {

/// Uniform on (0, 1].
double open_uniform(CycleRng& rng) { return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53; }

double standard_normal(CycleRng& rng)
{
  // Box-Muller on two fresh uniforms keeps the stream position explicit.
  const double u1 = open_uniform(rng);
  const double u2 = open_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

ProbabilityEstimate wilson(int k, std::size_t hits, std::size_t n)
{
  const double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double denom = 1.0 + z * z / nn;
  const double centre = (p + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
  return {k, p, std::max(0.0, centre - half), std::min(1.0, centre + half), hits, n};
}

} // namespace

Vec3 sample_wall_velocity(CycleRng& rng)
{
  double v1 = 0.0;
  while (v1 == 0.0) v1 = std::sqrt(-2.0 * std::log(open_uniform(rng)));
  const double v2 = standard_normal(rng);
  const double v3 = standard_normal(rng);
  return {v1, v2, v3};
}

CycleRecord run_cycle(double t0, WallSide x0, int k_max, CycleRng& rng)
{
  require(t0 > 0.0, "cycles.run_cycle", "t0 must be positive");
  require(k_max >= 1, "cycles.run_cycle", "k_max must be positive");
  CycleRecord rec;
  double t = t0;
  WallSide wall = x0;
  rec.bounce_times.push_back(t);
  rec.walls.push_back(wall);
  for (int k = 0; k < k_max; ++k) {
    Vec3 v = sample_wall_velocity(rng);
    // Leaving the right wall backwards in time means arriving from the left.
    if (wall == WallSide::right) v[0] = -v[0];
    rec.velocities.push_back(v);
    t -= 1.0 / std::abs(v[0]);
    wall = wall == WallSide::left ? WallSide::right : WallSide::left;
    rec.bounce_times.push_back(t);
    rec.walls.push_back(wall);
    if (t <= 0.0) {
      rec.reached_zero_at = k;
      break;
    }
  }
  return rec;
}

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index)
{
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<ProbabilityEstimate> nonreach_curve(double T0, int k_max, std::size_t n_samples, std::uint64_t seed)
{
  require(T0 > 0.0, "cycles.nonreach_probability", "T0 must be positive");
  require(k_max >= 1, "cycles.nonreach_probability", "k must be positive");
  require(n_samples >= 1000, "cycles.nonreach_probability", "n_samples must be at least 1000");
  const std::size_t blocks = (n_samples + cycle_block - 1) / cycle_block;
  const auto kk = static_cast<std::size_t>(k_max);
  // hits[b * k_max + k - 1]: samples in block b with t_k > 0.
  std::vector<std::size_t> hits(blocks * kk, 0);
  const auto nb = static_cast<long>(blocks);
#pragma omp parallel for schedule(dynamic)
  for (long b = 0; b < nb; ++b) {
    const auto bb = static_cast<std::size_t>(b);
    const std::size_t begin = bb * cycle_block;
    const std::size_t end = std::min(n_samples, begin + cycle_block);
    for (std::size_t s = begin; s < end; ++s) {
      // One stream per sample: sample s sees the same velocities for every k_max.
      CycleRng rng(substream_seed(seed, s));
      double t = T0;
      for (std::size_t k = 0; k < kk; ++k) {
        t -= 1.0 / sample_wall_velocity(rng)[0];
        if (t <= 0.0) break;
        ++hits[bb * kk + k];
      }
    }
  }
  std::vector<ProbabilityEstimate> out;
  for (std::size_t k = 0; k < kk; ++k) {
    std::size_t total = 0;
    for (std::size_t b = 0; b < blocks; ++b) total += hits[b * kk + k];
    out.push_back(wilson(static_cast<int>(k + 1), total, n_samples));
  }
  return out;
}

ProbabilityEstimate nonreach_probability(double T0, int k, std::size_t n_samples, std::uint64_t seed)
{
  return nonreach_curve(T0, k, n_samples, seed).back();
}

BounceStatistics mean_bounce_time(std::size_t n_samples, std::uint64_t seed)
{
  require(n_samples >= 2, "cycles.mean_bounce_time", "need at least two samples");
  const std::size_t blocks = (n_samples + cycle_block - 1) / cycle_block;
  std::vector<double> sum(blocks, 0.0), sum2(blocks, 0.0);
  const auto nb = static_cast<long>(blocks);
#pragma omp parallel for schedule(dynamic)
  for (long b = 0; b < nb; ++b) {
    const auto bb = static_cast<std::size_t>(b);
    CycleRng rng(substream_seed(seed, bb));
    const std::size_t begin = bb * cycle_block;
    const std::size_t end = std::min(n_samples, begin + cycle_block);
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double tb = 1.0 / sample_wall_velocity(rng)[0];
      s += tb;
      s2 += tb * tb;
    }
    sum[bb] = s;
    sum2[bb] = s2;
  }
  double s = 0.0, s2 = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    s += sum[b];
    s2 += sum2[b];
  }
  const double n = static_cast<double>(n_samples);
  BounceStatistics st;
  st.samples = n_samples;
  st.mean = s / n;
  const double var = std::max(0.0, (s2 - n * st.mean * st.mean) / (n - 1.0));
  st.std_error = std::sqrt(var / n);
  return st;
}

} // namespace slabkin
