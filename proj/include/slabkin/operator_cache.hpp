#pragma once

#include "slabkin/collision.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace slabkin {

inline constexpr std::uint32_t operator_cache_version = 1;

/// Header of a binary operator cache file.
///
/// Layout (little-endian): 8-byte magic "SLKOPMAT", u32 version, u64 grid hash,
/// u64 model hash, u32 descriptor length + descriptor bytes, u64 node count,
/// u8 has_k, then nu (node count doubles) and, if has_k, K row-major.
struct CacheHeader
{
  std::uint32_t version = 0;
  std::uint64_t grid_hash = 0;
  std::uint64_t model_hash = 0;
  std::string descriptor;
  std::uint64_t size = 0;
  bool has_k = false;
};

void write_operator_cache(const CollisionOperator& op, const std::filesystem::path& path);
CacheHeader inspect_operator_cache(const std::filesystem::path& path);

/// Loads a cache and checks it against the requested model and grid.
/// Throws InvalidArgument on a key mismatch and IoError on a damaged file.
CollisionOperator read_operator_cache(const std::filesystem::path& path, const CollisionModel& model,
                                      const VelocityGrid& grid);

/// File name keyed by (grid hash, model hash).
std::string operator_cache_name(const CollisionModel& model, const VelocityGrid& grid);

/// Reads the cache from `dir` when present and valid, otherwise assembles and
/// (if `dir` is set) writes it. `loaded` reports which path was taken.
CollisionOperator assemble_cached(const CollisionModel& model, const VelocityGrid& grid,
                                  const std::optional<std::filesystem::path>& dir, bool* loaded = nullptr);

} // namespace slabkin
