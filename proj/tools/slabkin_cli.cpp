#include "slabkin/config.hpp"
#include "slabkin/error.hpp"
#include "slabkin/operator_cache.hpp"
#include "slabkin/runner.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <iostream>
#include <sstream>

namespace {

using namespace slabkin;

struct Flags
{
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string format;
};

void add_flags(CLI::App* app, Flags& f)
{
  app->add_option("--config", f.config, "Config file (JSON)")->required();
  app->add_option("--out", f.out, "Output directory, overrides output.directory");
  app->add_option("--seed", f.seed, "Seed for dynamics and cycles");
  app->add_option("--threads", f.threads, "OpenMP threads (0 keeps the default)")->check(CLI::NonNegativeNumber);
  app->add_option("--format", f.format, "Comma-separated subset of csv,json,svg");
}

RunConfig load(const Flags& f)
{
  RunConfig c = load_config(f.config);
  if (!f.out.empty()) c.output.directory = f.out;
  if (f.seed) {
    if (c.dynamics) c.dynamics->seed = *f.seed;
    if (c.cycles) c.cycles->seed = *f.seed;
  }
  if (!f.format.empty()) {
    c.output.csv = c.output.json = c.output.svg = false;
    std::stringstream ss(f.format);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item == "csv") c.output.csv = true;
      else if (item == "json") c.output.json = true;
      else if (item == "svg") c.output.svg = true;
      else throw InvalidArgument("OutputConfig.formats", "unknown format '" + item + "'");
    }
  }
  if (f.threads > 0) omp_set_num_threads(f.threads);
  c.validate();
  return c;
}

int report(const std::exception& e)
{
  const int code = exit_code_for(e);
  const char* kind = code == 2 ? "invalid configuration" : code == 3 ? "solver divergence" : code == 4 ? "I/O failure" : "error";
  std::cerr << "slabkin: " << kind << ": " << e.what() << "\n";
  if (const auto* d = dynamic_cast<const DivergenceError*>(&e); d && !d->history().empty()) {
    std::cerr << "  iterations: " << d->history().size() << ", last residual: " << d->history().back() << "\n";
  }
  return code;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Slab kinetic heat-transfer solver"};
  app.require_subcommand(1);

  Flags run_flags, sweep_flags, validate_flags, cache_flags;
  auto* run = app.add_subcommand("run", "Run the configured stages");
  add_flags(run, run_flags);
  auto* sweep = app.add_subcommand("sweep", "Run over the configured Knudsen list");
  add_flags(sweep, sweep_flags);
  auto* validate = app.add_subcommand("validate", "Parse and validate a config");
  add_flags(validate, validate_flags);
  auto* cache_ops = app.add_subcommand("cache-ops", "Assemble or inspect the operator cache");
  add_flags(cache_ops, cache_flags);
  std::string action;
  std::string cache_file;
  cache_ops->add_option("action", action, "assemble | inspect")->required()->check(CLI::IsMember({"assemble", "inspect"}));
  cache_ops->add_option("--file", cache_file, "Cache file to inspect (default: derived from the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run || *sweep) {
      const Flags& f = *run ? run_flags : sweep_flags;
      const RunConfig c = load(f);
      if (*sweep) require(c.knudsen.size() >= 2, "RunConfig.mesh", "sweep needs a list of at least two knudsen values");
      const auto summary = run_experiment(c);
      std::cout << "wrote " << c.output.directory << " (config " << summary["config_hash"].get<std::string>() << ")\n";
      for (const auto& r : summary["runs"]) {
        std::cout << "  Kn=" << r["knudsen"].get<double>() << " rel_residual=" << r["linearity"]["rel_residual"].get<double>()
                  << " iterations=" << r["solver"]["iterations"].get<int>() << "\n";
      }
      return 0;
    }
    if (*validate) {
      const RunConfig c = load(validate_flags);
      std::cout << "config valid, hash " << config_hash(c) << "\n";
      return 0;
    }
    if (*cache_ops) {
      const RunConfig c = load(cache_flags);
      const VelocityGrid grid = build_grid(c.grid.axis_counts, c.grid.v_max, c.grid.kind);
      const std::filesystem::path dir = c.output.cache_dir ? std::filesystem::path(*c.output.cache_dir) : std::filesystem::path(c.output.directory);
      if (action == "assemble") {
        std::filesystem::create_directories(dir);
        bool loaded = false;
        const CollisionOperator op = assemble_cached(c.model, grid, dir, &loaded);
        std::cout << (loaded ? "cache hit " : "assembled ") << (dir / operator_cache_name(c.model, grid)).string()
                  << " (operator " << hex64(op.hash()) << ")\n";
        return 0;
      }
      const std::filesystem::path file = cache_file.empty() ? dir / operator_cache_name(c.model, grid) : std::filesystem::path(cache_file);
      const CacheHeader h = inspect_operator_cache(file);
      nlohmann::json j = {{"file", file.string()},           {"version", h.version},
                          {"grid_hash", hex64(h.grid_hash)}, {"model_hash", hex64(h.model_hash)},
                          {"descriptor", h.descriptor},      {"size", h.size},
                          {"has_k", h.has_k},
                          {"matches_config", h.grid_hash == grid.hash() && h.model_hash == c.model.hash()}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    return report(e);
  }
  return 0;
}
