#pragma once

#include "slabkin/collision.hpp"
#include "slabkin/equilibria.hpp"
#include "slabkin/transport.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace slabkin {

struct GridConfig
{
  std::array<int, 3> axis_counts{24, 16, 16};
  double v_max = 7.0;
  GridKind kind = GridKind::gauss;
};

struct StagesConfig
{
  bool f2 = false;
  bool energy_balance = true;
  /// Kn -> 0 extrapolation of the conductivity over the Kn list.
  bool conductivity = false;
};

struct DynamicsConfig
{
  double dt = 0.05;
  double t_end = 10.0;
  double amplitude = 0.1;
  std::uint64_t seed = 1;
};

struct CyclesConfig
{
  std::vector<double> T0{5.0};
  int k_max = 16;
  std::size_t n_samples = 100000;
  std::uint64_t seed = 1;
};

struct OutputConfig
{
  std::string directory = "out";
  bool csv = true;
  bool json = true;
  bool svg = true;
  std::optional<std::string> cache_dir;
};

struct RunConfig
{
  CollisionModel model;
  GridConfig grid;
  int n_cells = 64;
  std::vector<double> knudsen{1.0};
  WallSpec walls{0.05, -1.0, 1.0};
  SteadyOptions solver;
  StagesConfig stages;
  std::optional<DynamicsConfig> dynamics;
  std::optional<CyclesConfig> cycles;
  OutputConfig output;

  /// Checks every sub-invariant; throws InvalidArgument naming the first violation.
  void validate() const;
};

/// Strict parse: unknown keys and wrong types are rejected.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

/// Reads and parses a config file. IoError if unreadable, InvalidArgument if malformed.
RunConfig load_config(const std::filesystem::path& path);

/// FNV-1a over the canonical JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& c);

std::string hex64(std::uint64_t v);

} // namespace slabkin
