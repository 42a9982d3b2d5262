#include "slabkin/operator_cache.hpp"

#include "slabkin/error.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace slabkin {

namespace {

constexpr char kMagic[8] = {'S', 'L', 'K', 'O', 'P', 'M', 'A', 'T'};

template <typename T>
void put(std::ofstream& os, const T& v)
{
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is, const std::filesystem::path& path)
{
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw IoError("operator cache truncated: " + path.string());
  return v;
}

CacheHeader read_header(std::ifstream& is, const std::filesystem::path& path)
{
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0) {
    throw IoError("not an operator cache file: " + path.string());
  }
  CacheHeader h;
  h.version = get<std::uint32_t>(is, path);
  if (h.version != operator_cache_version) {
    throw IoError("unsupported operator cache version " + std::to_string(h.version) + ": " + path.string());
  }
  h.grid_hash = get<std::uint64_t>(is, path);
  h.model_hash = get<std::uint64_t>(is, path);
  const auto len = get<std::uint32_t>(is, path);
  if (len > (1u << 16)) throw IoError("operator cache descriptor too long: " + path.string());
  h.descriptor.resize(len);
  is.read(h.descriptor.data(), len);
  h.size = get<std::uint64_t>(is, path);
  h.has_k = get<std::uint8_t>(is, path) != 0;
  if (!is) throw IoError("operator cache truncated: " + path.string());
  return h;
}

} // namespace

void write_operator_cache(const CollisionOperator& op, const std::filesystem::path& path)
{
  // Write to a sibling temp file, then rename, so readers never see a partial file.
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open operator cache for writing: " + tmp.string());
    os.write(kMagic, 8);
    put(os, operator_cache_version);
    put(os, op.grid().hash());
    put(os, op.model().hash());
    const std::string d = op.model().describe();
    put(os, static_cast<std::uint32_t>(d.size()));
    os.write(d.data(), static_cast<std::streamsize>(d.size()));
    put(os, static_cast<std::uint64_t>(op.size()));
    put(os, static_cast<std::uint8_t>(op.has_dense_k() ? 1 : 0));
    os.write(reinterpret_cast<const char*>(op.nu().data()),
             static_cast<std::streamsize>(op.size() * sizeof(double)));
    if (op.has_dense_k()) {
      // Eigen stores column-major; the file is row-major.
      const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = op.k_matrix();
      os.write(reinterpret_cast<const char*>(rm.data()), static_cast<std::streamsize>(rm.size() * sizeof(double)));
    }
    if (!os) throw IoError("failed writing operator cache: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move operator cache into place: " + path.string());
}

CacheHeader inspect_operator_cache(const std::filesystem::path& path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open operator cache: " + path.string());
  return read_header(is, path);
}

CollisionOperator read_operator_cache(const std::filesystem::path& path, const CollisionModel& model,
                                      const VelocityGrid& grid)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open operator cache: " + path.string());
  const CacheHeader h = read_header(is, path);
  require(h.grid_hash == grid.hash(), "operator_cache", "grid hash does not match the requested grid");
  require(h.model_hash == model.hash() && h.descriptor == model.describe(), "operator_cache",
          "model descriptor does not match the requested model");
  require(h.size == grid.size(), "operator_cache", "node count does not match the grid");

  std::vector<double> nu(grid.size());
  is.read(reinterpret_cast<char*>(nu.data()), static_cast<std::streamsize>(nu.size() * sizeof(double)));
  std::optional<Eigen::MatrixXd> k;
  if (h.has_k) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(n, n);
    is.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(rm.size() * sizeof(double)));
    k = Eigen::MatrixXd(rm);
  }
  if (!is) throw IoError("operator cache truncated: " + path.string());
  return CollisionOperator(model, grid, std::move(nu), std::move(k));
}

std::string operator_cache_name(const CollisionModel& model, const VelocityGrid& grid)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "op_%016llx_%016llx.bin", static_cast<unsigned long long>(grid.hash()),
                static_cast<unsigned long long>(model.hash()));
  return buf;
}

CollisionOperator assemble_cached(const CollisionModel& model, const VelocityGrid& grid,
                                  const std::optional<std::filesystem::path>& dir, bool* loaded)
{
  if (loaded) *loaded = false;
  if (dir) {
    const auto path = *dir / operator_cache_name(model, grid);
    if (std::filesystem::exists(path)) {
      try {
        auto op = read_operator_cache(path, model, grid);
        if (loaded) *loaded = true;
        return op;
      } catch (const IoError&) {
        // damaged file: fall through and rebuild
      }
    }
  }
  CollisionOperator op = assemble(model, grid);
  if (dir) {
    std::filesystem::create_directories(*dir);
    write_operator_cache(op, *dir / operator_cache_name(model, grid));
  }
  return op;
}

} // namespace slabkin
