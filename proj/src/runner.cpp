#include "slabkin/runner.hpp"

#include "slabkin/cycles.hpp"
#include "slabkin/diagnostics.hpp"
#include "slabkin/dynamics.hpp"
#include "slabkin/error.hpp"
#include "slabkin/operator_cache.hpp"
#include "slabkin/output.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace slabkin {

using nlohmann::json;

namespace fs = std::filesystem;

std::string profile_file_name(double knudsen) { return "profile_kn" + format_double(knudsen) + ".csv"; }

json version_info()
{
  return {{"slabkin", version_string},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"compiler", __VERSION__},
          {"operator_cache_format", operator_cache_version}};
}

int exit_code_for(const std::exception& e)
{
  if (dynamic_cast<const InvalidArgument*>(&e)) return 2;
  if (dynamic_cast<const DivergenceError*>(&e)) return 3;
  if (dynamic_cast<const IoError*>(&e)) return 4;
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return 4;
  return 1;
}

namespace {

json linearity_json(const LinearityReport& r)
{
  return {{"slope", r.slope},
          {"intercept", r.intercept},
          {"max_residual", r.max_residual},
          {"rel_residual", r.rel_residual},
          {"window", {r.window_lo, r.window_hi}},
          {"points", r.points}};
}

json report_json(const SteadyReport& r)
{
  return {{"method", r.method},
          {"iterations", r.iterations},
          {"residual", r.residual},
          {"contraction_ratio", r.contraction_ratio},
          {"mass", r.mass},
          {"epsilon", r.epsilon}};
}

json energy_json(const EnergyBalance& e)
{
  return {{"penalty", e.penalty},
          {"dissipation", e.dissipation},
          {"outgoing", e.outgoing},
          {"incoming", e.incoming},
          {"source", e.source},
          {"imbalance", e.imbalance},
          {"relative", e.relative},
          {"cell_average_imbalance", e.cell_average_imbalance}};
}

json moments_json(const MomentProfile& p, const std::vector<double>& q1)
{
  double u_max = 0.0;
  for (const auto& u : p.u) u_max = std::max(u_max, std::abs(u[0]));
  double q_mean = 0.0;
  for (double q : q1) q_mean += q;
  q_mean /= static_cast<double>(q1.size());
  const auto [rho_lo, rho_hi] = std::minmax_element(p.rho.begin(), p.rho.end());
  const auto [th_lo, th_hi] = std::minmax_element(p.theta.begin(), p.theta.end());
  return {{"max_abs_u1", u_max},
          {"mean_q1_linear", q_mean},
          {"q1_constancy", flux_constancy(q1)},
          {"rho_min", *rho_lo},
          {"rho_max", *rho_hi},
          {"theta_min", *th_lo},
          {"theta_max", *th_hi},
          {"theta1_first_cell", p.theta1.front()},
          {"theta1_last_cell", p.theta1.back()}};
}

struct KnRun
{
  double knudsen = 0.0;
  SteadyResult f1;
  MomentProfile profile;
  LinearityReport interior;
  json entry;
};

KnRun run_one(const RunConfig& c, const CollisionOperator& op, double kn, const fs::path& out)
{
  KnRun run;
  run.knudsen = kn;
  const SlabMesh mesh{c.n_cells, kn};
  run.f1 = solve_f1(mesh, op, c.walls, c.solver);
  run.profile = perturbation_profile(mesh, op, run.f1.f, c.walls.delta);
  run.interior = linearity_test(run.profile.x, run.profile.theta1, -interior_window, interior_window);
  const LinearityReport full = linearity_test(run.profile.x, run.profile.theta1, -0.5, 0.5);
  const std::vector<double> q1 = heat_flux_linear(op.grid(), run.f1.f);

  json& e = run.entry;
  e["knudsen"] = kn;
  e["profile"] = profile_file_name(kn);
  e["solver"] = report_json(run.f1.report);
  e["linearity"] = linearity_json(run.interior);
  e["linearity_full"] = linearity_json(full);
  e["moments_summary"] = moments_json(run.profile, q1);
  e["kappa_hat"] = std::abs(run.interior.slope) > relative_floor ? json(kappa_hat(mesh, op.grid(), run.f1.f)) : json();

  if (c.stages.energy_balance) {
    const SlabField g(mesh.n_cells, op.size());
    e["energy_balance"] =
        energy_json(discrete_energy_balance(mesh, op, run.f1.f, g, f1_boundary(op.grid(), c.walls), c.solver.epsilon));
  } else {
    e["energy_balance"] = nullptr;
  }

  if (c.stages.f2) {
    const SteadyResult f2 = solve_f2(mesh, op, c.walls, run.f1.f, c.solver);
    const std::vector<double> th2 = theta1_profile(op.grid(), f2.f);
    const auto [lo, hi] = std::minmax_element(th2.begin(), th2.end());
    e["f2"] = {{"solver", report_json(f2.report)}, {"theta2_min", *lo}, {"theta2_max", *hi}};
  } else {
    e["f2"] = nullptr;
  }

  if (c.output.csv) write_profile_csv(out / profile_file_name(kn), run.profile);
  return run;
}

json cycles_json(const CyclesConfig& cc)
{
  json curves = json::array();
  for (double t0 : cc.T0) {
    const auto curve = nonreach_curve(t0, cc.k_max, cc.n_samples, cc.seed);
    json pts = json::array();
    for (const auto& p : curve) {
      pts.push_back({{"k", p.k}, {"p", p.p}, {"lo", p.lo}, {"hi", p.hi}, {"hits", p.hits}});
    }
    curves.push_back({{"T0", t0},
                      {"k_threshold", 4 * static_cast<int>(std::ceil(t0 / std::sqrt(std::numbers::pi / 2.0)))},
                      {"samples", cc.n_samples},
                      {"estimates", pts}});
  }
  const BounceStatistics b = mean_bounce_time(cc.n_samples, cc.seed);
  return {{"nonreach", curves},
          {"mean_bounce_time",
           {{"mean", b.mean}, {"std_error", b.std_error}, {"samples", b.samples},
            {"exact", std::sqrt(std::numbers::pi / 2.0)}}}};
}

} // namespace

json run_experiment(const RunConfig& c)
{
  c.validate();
  const fs::path out(c.output.directory);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory " + out.string() + ": " + ec.message());

  const VelocityGrid grid = build_grid(c.grid.axis_counts, c.grid.v_max, c.grid.kind);
  std::optional<fs::path> cache;
  if (c.output.cache_dir) cache = fs::path(*c.output.cache_dir);
  bool loaded = false;
  const CollisionOperator op = assemble_cached(c.model, grid, cache, &loaded);

  std::vector<KnRun> runs;
  for (double kn : c.knudsen) runs.push_back(run_one(c, op, kn, out));

  json summary;
  const std::string chash = config_hash(c);
  summary["config_hash"] = chash;
  summary["linearity"] = linearity_json(runs.front().interior);
  summary["moments_summary"] = runs.front().entry["moments_summary"];
  summary["energy_balance"] = runs.front().entry["energy_balance"];
  summary["kappa_hat"] = runs.front().entry["kappa_hat"];

  json runs_json = json::array();
  for (const auto& r : runs) runs_json.push_back(r.entry);
  summary["runs"] = runs_json;

  if (c.stages.conductivity) {
    std::vector<double> kn, kappa;
    for (const auto& r : runs) {
      require(!r.entry["kappa_hat"].is_null(), "RunConfig.stages",
              "conductivity needs a nonzero temperature gradient (vartheta_minus != vartheta_plus)");
      kn.push_back(r.knudsen);
      kappa.push_back(r.entry["kappa_hat"].get<double>());
    }
    const ConductivityEstimate est = conductivity_estimate(kn, kappa);
    summary["conductivity"] = {{"knudsen", est.knudsen},
                               {"kappa", est.kappa},
                               {"extrapolated", est.extrapolated},
                               {"max_successive_change", est.max_successive_change},
                               {"final_change", est.final_change},
                               {"non_monotone", est.non_monotone},
                               {"bgk_reference", c.model.kind == CollisionKind::bgk_linearized
                                                     ? json(2.5 / c.model.nu0)
                                                     : json()}};
  } else {
    summary["conductivity"] = nullptr;
  }

  summary["decay_lambda"] = nullptr;
  summary["dynamics"] = nullptr;
  if (c.dynamics) {
    const DynamicsConfig& d = *c.dynamics;
    const KnRun& base = runs.front();
    const SlabMesh mesh{c.n_cells, base.knudsen};
    const SlabField f0 = perturb_state(mesh, op, base.f1.f, d.amplitude, d.seed);
    const RelaxResult rr = relax_to_steady(mesh, op, c.walls, f0, d.dt, d.t_end, c.solver, base.f1);
    if (rr.lambda) summary["decay_lambda"] = *rr.lambda;
    summary["dynamics"] = {{"knudsen", base.knudsen},
                           {"dt", d.dt},
                           {"t_end", d.t_end},
                           {"steps", rr.series.times.size() - 1},
                           {"final_sup_norm", rr.series.sup_norms.back()},
                           {"min_F", *std::min_element(rr.series.min_F.begin(), rr.series.min_F.end())},
                           {"non_decay", rr.non_decay}};
    if (c.output.csv) write_timeseries_csv(out / "timeseries.csv", rr.series);
    if (c.output.svg) {
      PlotSeries s{"Kn = " + format_double(base.knudsen), rr.series.times, {}};
      for (double v : rr.series.sup_norms) s.y.push_back(std::log10(std::max(v, 1e-300)));
      write_text(out / "decay.svg", render_svg("Relaxation to the steady state", "t", "log10 sup norm", {s}));
    }
  }

  summary["cycles"] = c.cycles ? cycles_json(*c.cycles) : json();

  summary["provenance"] = {{"config_hash", chash},
                           {"grid_hash", hex64(grid.hash())},
                           {"operator_cache_hash", hex64(op.hash())},
                           {"operator_cache_file", operator_cache_name(c.model, grid)},
                           {"versions", version_info()}};

  if (c.output.csv && runs.size() > 1) {
    std::string s = "knudsen,slope,intercept,max_residual,rel_residual,kappa_hat\n";
    for (const auto& r : runs) {
      const json& k = r.entry["kappa_hat"];
      s += format_csv(r.knudsen) + ',' + format_csv(r.interior.slope) + ',' + format_csv(r.interior.intercept) + ',' +
           format_csv(r.interior.max_residual) + ',' + format_csv(r.interior.rel_residual) + ',' +
           (k.is_null() ? std::string("nan") : format_csv(k.get<double>())) + '\n';
    }
    write_text(out / "sweep.csv", s);
  }
  if (c.output.svg) {
    std::vector<PlotSeries> series;
    for (const auto& r : runs) series.push_back({"Kn = " + format_double(r.knudsen), r.profile.x, r.profile.theta1});
    write_text(out / "theta1.svg", render_svg("First-order temperature", "x", "theta1", series));
  }
  if (c.output.json) write_json(out / "summary.json", summary);
  return summary;
}

} // namespace slabkin
