#pragma once

#include "slabkin/transport.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace slabkin {

/// One back-time cycle in the unit slab: t_{k+1} = t_k - 1/|v1_k|, walls alternate.
struct CycleRecord
{
  std::vector<double> bounce_times; // t_0 > t_1 > ..., ends at the first value <= 0 if reached
  std::vector<WallSide> walls;      // wall of each bounce time
  std::vector<Vec3> velocities;     // velocity drawn at each bounce before the last time
  std::optional<int> reached_zero_at; // l with t_{l+1} <= 0 < t_l
};

using CycleRng = std::mt19937_64;

/// Draws from the normalized wall flux measure mu(v) |v1| dv:
/// v1 = sqrt(-2 ln U) (Rayleigh), v2 and v3 standard normal.
Vec3 sample_wall_velocity(CycleRng& rng);

CycleRecord run_cycle(double t0, WallSide x0, int k_max, CycleRng& rng);

/// splitmix64 of (master, index): seeds of independent substreams.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index);

/// Samples are split into fixed blocks of this size and partial sums are merged
/// in block order, so estimates do not depend on the thread count.
inline constexpr std::size_t cycle_block = 4096;

struct ProbabilityEstimate
{
  int k = 0;
  double p = 0.0;
  double lo = 0.0; // Wilson 95% interval
  double hi = 0.0;
  std::size_t hits = 0;
  std::size_t samples = 0;
};

/// P(t_k > 0) from t = T0 for k = 1..k_max on one set of samples. Sample s
/// draws from its own substream, so the same seed gives common random numbers
/// across k and across k_max, and the estimates are nested.
std::vector<ProbabilityEstimate> nonreach_curve(double T0, int k_max, std::size_t n_samples, std::uint64_t seed);

ProbabilityEstimate nonreach_probability(double T0, int k, std::size_t n_samples, std::uint64_t seed);

struct BounceStatistics
{
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Mean of 1/v1 under the flux measure; the exact value is sqrt(pi/2).
BounceStatistics mean_bounce_time(std::size_t n_samples, std::uint64_t seed);

} // namespace slabkin
