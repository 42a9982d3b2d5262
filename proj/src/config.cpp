#include "slabkin/config.hpp"

#include "slabkin/error.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace slabkin {

using nlohmann::json;

namespace {

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed)
{
  if (!j.is_object()) throw InvalidArgument(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key())) throw InvalidArgument(where, "unknown key '" + it.key() + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const char* where)
{
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidArgument(where, std::string("wrong type for '") + key + "'");
  }
}

std::vector<std::string> formats_of(const OutputConfig& o)
{
  std::vector<std::string> f;
  if (o.csv) f.emplace_back("csv");
  if (o.json) f.emplace_back("json");
  if (o.svg) f.emplace_back("svg");
  return f;
}

} // namespace

void RunConfig::validate() const
{
  model.validate();
  // The grid constructor owns the VelocityGrid invariants and their messages.
  (void)build_grid(grid.axis_counts, grid.v_max, grid.kind);
  require(n_cells >= 2, "SlabMesh", "n_cells must be at least 2");
  require(!knudsen.empty(), "SlabMesh", "at least one knudsen value is required");
  for (double kn : knudsen) SlabMesh{n_cells, kn}.validate();
  walls.validate();
  solver.validate();
  if (stages.f2 && model.kind == CollisionKind::hard_sphere) {
    require(model.quadratic_quadrature, "RunConfig.stages",
            "f2 with the hard-sphere model needs model.quadratic_quadrature = true");
  }
  if (dynamics) {
    require(dynamics->dt > 0.0 && dynamics->t_end > dynamics->dt, "DynamicsConfig", "need 0 < dt < t_end");
    require(dynamics->amplitude >= 0.0, "DynamicsConfig", "amplitude must be nonnegative");
  }
  if (cycles) {
    require(!cycles->T0.empty(), "CyclesConfig", "T0 list must not be empty");
    for (double t : cycles->T0) require(t > 0.0, "CyclesConfig", "T0 values must be positive");
    require(cycles->k_max >= 1, "CyclesConfig", "k_max must be positive");
    require(cycles->n_samples >= 1000, "CyclesConfig", "n_samples must be at least 1000");
  }
  require(!output.directory.empty(), "OutputConfig", "directory must not be empty");
}

RunConfig config_from_json(const json& j)
{
  RunConfig c;
  check_keys(j, "RunConfig", {"model", "grid", "mesh", "walls", "solver", "stages", "dynamics", "cycles", "output"});

  if (j.contains("model")) {
    const auto& m = j["model"];
    check_keys(m, "CollisionModel", {"kind", "gamma_exponent", "angular_nodes", "nu0", "quadratic_quadrature"});
    std::string kind = to_string(c.model.kind);
    read(m, "kind", kind, "CollisionModel");
    c.model.kind = collision_kind_from_string(kind);
    read(m, "gamma_exponent", c.model.gamma_exponent, "CollisionModel");
    read(m, "angular_nodes", c.model.angular_nodes, "CollisionModel");
    read(m, "nu0", c.model.nu0, "CollisionModel");
    read(m, "quadratic_quadrature", c.model.quadratic_quadrature, "CollisionModel");
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    check_keys(g, "VelocityGrid", {"axis_counts", "v_max", "kind"});
    read(g, "axis_counts", c.grid.axis_counts, "VelocityGrid");
    read(g, "v_max", c.grid.v_max, "VelocityGrid");
    std::string kind = to_string(c.grid.kind);
    read(g, "kind", kind, "VelocityGrid");
    c.grid.kind = grid_kind_from_string(kind);
  }
  if (j.contains("mesh")) {
    const auto& m = j["mesh"];
    check_keys(m, "SlabMesh", {"n_cells", "knudsen"});
    read(m, "n_cells", c.n_cells, "SlabMesh");
    if (m.contains("knudsen")) {
      if (m["knudsen"].is_number()) {
        c.knudsen = {m["knudsen"].get<double>()};
      } else {
        read(m, "knudsen", c.knudsen, "SlabMesh");
      }
    }
  }
  if (j.contains("walls")) {
    const auto& w = j["walls"];
    check_keys(w, "WallSpec", {"delta", "vartheta_minus", "vartheta_plus"});
    read(w, "delta", c.walls.delta, "WallSpec");
    read(w, "vartheta_minus", c.walls.vartheta_minus, "WallSpec");
    read(w, "vartheta_plus", c.walls.vartheta_plus, "WallSpec");
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    check_keys(s, "SteadyOptions",
               {"method", "epsilon", "tol", "max_iter", "restart", "reflection_factor", "weight"});
    std::string method = to_string(c.solver.method);
    read(s, "method", method, "SteadyOptions");
    c.solver.method = steady_method_from_string(method);
    read(s, "epsilon", c.solver.epsilon, "SteadyOptions");
    read(s, "tol", c.solver.tol, "SteadyOptions");
    read(s, "max_iter", c.solver.max_iter, "SteadyOptions");
    read(s, "restart", c.solver.restart, "SteadyOptions");
    read(s, "reflection_factor", c.solver.reflection_factor, "SteadyOptions");
    if (s.contains("weight")) {
      const auto& w = s["weight"];
      check_keys(w, "WeightParams", {"beta", "zeta", "rho_scale"});
      read(w, "beta", c.solver.weight.beta, "WeightParams");
      read(w, "zeta", c.solver.weight.zeta, "WeightParams");
      read(w, "rho_scale", c.solver.weight.rho_scale, "WeightParams");
    }
  }
  if (j.contains("stages")) {
    const auto& s = j["stages"];
    check_keys(s, "RunConfig.stages", {"f2", "energy_balance", "conductivity"});
    read(s, "f2", c.stages.f2, "RunConfig.stages");
    read(s, "energy_balance", c.stages.energy_balance, "RunConfig.stages");
    read(s, "conductivity", c.stages.conductivity, "RunConfig.stages");
  }
  if (j.contains("dynamics") && !j["dynamics"].is_null()) {
    const auto& d = j["dynamics"];
    check_keys(d, "DynamicsConfig", {"dt", "t_end", "amplitude", "seed"});
    DynamicsConfig dc;
    read(d, "dt", dc.dt, "DynamicsConfig");
    read(d, "t_end", dc.t_end, "DynamicsConfig");
    read(d, "amplitude", dc.amplitude, "DynamicsConfig");
    read(d, "seed", dc.seed, "DynamicsConfig");
    c.dynamics = dc;
  }
  if (j.contains("cycles") && !j["cycles"].is_null()) {
    const auto& d = j["cycles"];
    check_keys(d, "CyclesConfig", {"T0", "k_max", "n_samples", "seed"});
    CyclesConfig cc;
    if (d.contains("T0") && d["T0"].is_number()) {
      cc.T0 = {d["T0"].get<double>()};
    } else {
      read(d, "T0", cc.T0, "CyclesConfig");
    }
    read(d, "k_max", cc.k_max, "CyclesConfig");
    read(d, "n_samples", cc.n_samples, "CyclesConfig");
    read(d, "seed", cc.seed, "CyclesConfig");
    c.cycles = cc;
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    check_keys(o, "OutputConfig", {"directory", "formats", "cache_dir"});
    read(o, "directory", c.output.directory, "OutputConfig");
    if (o.contains("formats")) {
      std::vector<std::string> f;
      read(o, "formats", f, "OutputConfig");
      c.output.csv = c.output.json = c.output.svg = false;
      for (const auto& s : f) {
        if (s == "csv") c.output.csv = true;
        else if (s == "json") c.output.json = true;
        else if (s == "svg") c.output.svg = true;
        else throw InvalidArgument("OutputConfig", "unknown format '" + s + "'");
      }
    }
    if (o.contains("cache_dir") && !o["cache_dir"].is_null()) {
      std::string d;
      read(o, "cache_dir", d, "OutputConfig");
      c.output.cache_dir = d;
    }
  }
  return c;
}

json config_to_json(const RunConfig& c)
{
  json j;
  j["model"] = {{"kind", to_string(c.model.kind)},
                {"gamma_exponent", c.model.gamma_exponent},
                {"angular_nodes", c.model.angular_nodes},
                {"nu0", c.model.nu0},
                {"quadratic_quadrature", c.model.quadratic_quadrature}};
  j["grid"] = {{"axis_counts", c.grid.axis_counts}, {"v_max", c.grid.v_max}, {"kind", to_string(c.grid.kind)}};
  j["mesh"] = {{"n_cells", c.n_cells}, {"knudsen", c.knudsen}};
  j["walls"] = {{"delta", c.walls.delta},
                {"vartheta_minus", c.walls.vartheta_minus},
                {"vartheta_plus", c.walls.vartheta_plus}};
  j["solver"] = {{"method", to_string(c.solver.method)},
                 {"epsilon", c.solver.epsilon},
                 {"tol", c.solver.tol},
                 {"max_iter", c.solver.max_iter},
                 {"restart", c.solver.restart},
                 {"reflection_factor", c.solver.reflection_factor},
                 {"weight",
                  {{"beta", c.solver.weight.beta},
                   {"zeta", c.solver.weight.zeta},
                   {"rho_scale", c.solver.weight.rho_scale}}}};
  j["stages"] = {{"f2", c.stages.f2}, {"energy_balance", c.stages.energy_balance},
                 {"conductivity", c.stages.conductivity}};
  if (c.dynamics) {
    j["dynamics"] = {{"dt", c.dynamics->dt},
                     {"t_end", c.dynamics->t_end},
                     {"amplitude", c.dynamics->amplitude},
                     {"seed", c.dynamics->seed}};
  } else {
    j["dynamics"] = nullptr;
  }
  if (c.cycles) {
    j["cycles"] = {{"T0", c.cycles->T0},
                   {"k_max", c.cycles->k_max},
                   {"n_samples", c.cycles->n_samples},
                   {"seed", c.cycles->seed}};
  } else {
    j["cycles"] = nullptr;
  }
  j["output"] = {{"directory", c.output.directory}, {"formats", formats_of(c.output)}};
  j["output"]["cache_dir"] = c.output.cache_dir ? json(*c.output.cache_dir) : json(nullptr);
  return j;
}

RunConfig load_config(const std::filesystem::path& path)
{
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config file: " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw InvalidArgument("RunConfig", std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

std::string hex64(std::uint64_t v)
{
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string config_hash(const RunConfig& c)
{
  // Output location does not change results, so it is left out of the hash.
  json j = config_to_json(c);
  j.erase("output");
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return hex64(h);
}

} // namespace slabkin
