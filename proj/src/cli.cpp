#include "fracsync/cli.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracsync/config.hpp"
#include "fracsync/errors.hpp"
#include "fracsync/fbm.hpp"
#include "fracsync/fou.hpp"
#include "fracsync/halton.hpp"
#include "fracsync/integrator.hpp"
#include "fracsync/lyapunov.hpp"
#include "fracsync/noise_validation.hpp"
#include "fracsync/output.hpp"
#include "fracsync/parallel.hpp"
#include "fracsync/pushout.hpp"
#include "fracsync/rng.hpp"
#include "fracsync/synchronization.hpp"

namespace fracsync {
namespace {

using nlohmann::json;

struct Context {
  const ExperimentConfig& config;
  std::shared_ptr<const DriftModel> drift;
  DiffusionMatrix sigma;
  int threads;
  const RunDirectory& dir;
  std::ostream& out;
  std::ostream& err;
};

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vec to_state(const std::vector<double>& x, int dim) {
  return x.empty() ? Vec::Zero(dim) : to_vec(x);
}

std::vector<std::string> coordinate_header(const std::string& first, int dim) {
  std::vector<std::string> h{first};
  for (int c = 1; c <= dim; ++c) h.push_back("x_" + std::to_string(c));
  return h;
}

LyapunovConfig lyapunov_config(const ExperimentConfig& c, int threads) {
  LyapunovConfig lc;
  lc.horizon = c.lyapunov.horizon;
  lc.burn_in = c.lyapunov.burn_in;
  lc.renorm_interval = c.lyapunov.renorm_interval;
  lc.n_realizations = c.lyapunov.n_realizations;
  lc.dt = c.dt;
  lc.seed = c.seed;
  lc.x0_radius = c.lyapunov.x0_radius;
  lc.threads = threads;
  return lc;
}

json estimate_json(const LyapunovEstimate& e) {
  return json{{"lambda1", e.lambda1},       {"stderr", e.std_err},
              {"ci_low", e.ci_low()},       {"ci_high", e.ci_high()},
              {"ci_level", 0.99},           {"n_realizations", e.n_realizations},
              {"n_dropped", e.n_dropped},   {"burn_in", e.burn_in},
              {"horizon", e.horizon},       {"renorm_interval", e.renorm_interval}};
}

// Ball of twice the absorbing radius seen by `driver` over [-t_back, 0].
double default_ball(const Context& ctx, const NoisePath& driver, double t_back) {
  const FouProcess fou = fou_evaluate(ctx.sigma, driver, t_back);
  return 2.0 * absorbing_radius(*ctx.drift, fou);
}

std::string summarize(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

int cmd_simulate(const Context& ctx) {
  const auto& c = ctx.config;
  const int d = c.drift.dim;
  const auto driver = std::make_shared<const NoisePath>(
      sample_fbm(Grid::future(c.dt, grid_steps(c.simulate.horizon, c.dt)), c.hurst, d, seed_stream(c.seed, 0)));
  IntegratorOptions opts;
  opts.with_jacobian = c.simulate.with_jacobian;
  opts.record_stride = c.simulate.record_stride;
  const CocycleRun run = integrate_forward(*ctx.drift, ctx.sigma, driver, to_state(c.simulate.x0, d),
                                           c.simulate.horizon, opts);

  CsvTable traj(coordinate_header("t", d));
  for (std::size_t k = 0; k < run.size(); ++k) {
    std::vector<double> row{run.times[k]};
    for (int i = 0; i < d; ++i) row.push_back(run.states[k * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)]);
    traj.row(row);
  }
  ctx.dir.write_csv("trajectory.csv", traj);

  json report{{"final_state", vec_json(run.final_state())},
              {"n_records", run.size()},
              {"step_warning", run.step_warning},
              {"seed", c.seed}};
  if (opts.with_jacobian) {
    std::vector<std::string> header{"t"};
    for (int i = 1; i <= d; ++i) {
      for (int j = 1; j <= d; ++j) header.push_back("j_" + std::to_string(i) + "_" + std::to_string(j));
    }
    CsvTable jac(header);
    for (std::size_t k = 0; k < run.jacobians.size(); ++k) {
      std::vector<double> row{run.times[k]};
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) row.push_back(run.jacobians[k](i, j));
      }
      jac.row(row);
    }
    ctx.dir.write_csv("jacobian.csv", jac);
    const Mat& last = run.jacobians.back();
    report["final_jacobian_norm"] = last.norm();
  }
  ctx.dir.write_report("report.json", report);
  ctx.out << "simulate: " << run.size() << " records to t=" << summarize(run.times.back())
          << ", |x(T)|=" << summarize(run.final_state().norm()) << (run.step_warning ? " [step warning]" : "");
  return kExitOk;
}

int cmd_lyapunov(const Context& ctx) {
  const auto& c = ctx.config;
  const LyapunovConfig lc = lyapunov_config(c, ctx.threads);
  const LyapunovEstimate est = estimate_lambda1(*ctx.drift, ctx.sigma, c.hurst, lc);
  CsvTable per({"realization", "lambda1"});
  for (std::size_t i = 0; i < est.per_realization.size(); ++i) {
    per.row(std::vector<double>{static_cast<double>(i), est.per_realization[i]});
  }
  ctx.dir.write_csv("per_realization.csv", per);
  json report = estimate_json(est);
  report["seed"] = c.seed;
  if (c.lyapunov.fd_epsilon > 0.0) {
    const LyapunovEstimate fd = fd_lyapunov_crosscheck(*ctx.drift, ctx.sigma, c.hurst, lc, c.lyapunov.fd_epsilon);
    report["fd_crosscheck"] = estimate_json(fd);
  }
  ctx.dir.write_report("report.json", report);
  ctx.out << "lyapunov: lambda1=" << summarize(est.lambda1) << " stderr=" << summarize(est.std_err) << " ("
          << est.n_realizations << " realizations, " << est.n_dropped << " dropped)";
  return kExitOk;
}

int cmd_sweep(const Context& ctx) {
  const auto& c = ctx.config;
  const SweepResult sweep =
      lambda1_sigma_sweep(*ctx.drift, c.hurst, c.sweep.kappas, lyapunov_config(c, ctx.threads));
  CsvTable table({"kappa", "lambda1", "stderr", "ci_low", "ci_high"});
  json points = json::array();
  for (const auto& p : sweep.points) {
    table.row(std::vector<double>{p.kappa, p.estimate.lambda1, p.estimate.std_err, p.estimate.ci_low(),
                                  p.estimate.ci_high()});
    json e = estimate_json(p.estimate);
    e["kappa"] = p.kappa;
    points.push_back(e);
  }
  ctx.dir.write_csv("sweep.csv", table);
  json report{{"points", points}, {"seed", c.seed}};
  report["kappa_star"] = sweep.flagged ? json(sweep.points[*sweep.flagged].kappa) : json(nullptr);
  ctx.dir.write_report("report.json", report);
  ctx.out << "sweep: " << sweep.points.size() << " kappas, kappa*="
          << (sweep.flagged ? summarize(sweep.points[*sweep.flagged].kappa) : std::string("none"));
  return kExitOk;
}

int cmd_sync(const Context& ctx) {
  const auto& c = ctx.config;
  const int d = c.drift.dim;
  std::vector<Vec> initials;
  for (const auto& p : c.sync.initials) initials.push_back(to_vec(p));
  if (initials.empty()) {
    initials = {Vec::Zero(d), Vec::Zero(d)};
    initials[0][0] = 2.0;
    initials[1][0] = -2.0;
  }
  const Grid grid = Grid::future(c.dt, grid_steps(c.sync.horizon, c.dt));
  std::vector<SyncReport> reports(static_cast<std::size_t>(c.sync.n_seeds));
  parallel_for(reports.size(), ctx.threads, [&](std::size_t s) {
    const NoisePath w = sample_fbm(grid, c.hurst, d, seed_stream(c.seed, s));
    reports[s] = n_point_motion(*ctx.drift, ctx.sigma, w, initials, c.sync.horizon, c.sync.record_stride);
  });

  CsvTable series({"t", "R"});
  const SyncReport& first = reports.front();
  for (std::size_t k = 0; k < first.times.size(); ++k) series.row(std::vector<double>{first.times[k], first.r_series[k]});
  ctx.dir.write_csv("r_series.csv", series);

  CsvTable seeds({"seed_index", "initial_r", "final_r", "decay_rate", "fit_r2", "synchronized", "aborted"});
  int synced = 0;
  for (std::size_t s = 0; s < reports.size(); ++s) {
    const auto& r = reports[s];
    const bool ok = !r.aborted && r.final_r < c.sync.threshold * r.initial_r;
    synced += ok;
    seeds.row(std::vector<std::string>{std::to_string(s), format_double(r.initial_r), format_double(r.final_r),
                                       format_double(r.decay_rate), format_double(r.fit_r2), ok ? "1" : "0",
                                       r.aborted ? "1" : "0"});
  }
  ctx.dir.write_csv("seeds.csv", seeds);

  json report{{"final_r", first.final_r},
              {"initial_r", first.initial_r},
              {"decay_rate", first.decay_rate},
              {"fit_r2", first.fit_r2},
              {"has_fit", first.has_fit},
              {"n_points", first.n_points},
              {"c_bound", first.c_bound},
              {"aborted", first.aborted},
              {"abort_time", first.abort_time},
              {"n_seeds", c.sync.n_seeds},
              {"n_synchronized", synced},
              {"fraction_synchronized", static_cast<double>(synced) / c.sync.n_seeds},
              {"threshold", c.sync.threshold},
              {"seed", c.seed}};
  ctx.dir.write_report("report.json", report);
  ctx.out << "sync: " << synced << "/" << c.sync.n_seeds << " seeds with final_r < " << summarize(c.sync.threshold)
          << " R(0); seed 0 final_r=" << summarize(first.final_r);
  return kExitOk;
}

int cmd_atoms(const Context& ctx) {
  const auto& c = ctx.config;
  const int d = c.drift.dim;
  const double radius = c.atoms.cluster_radius > 0.0 ? c.atoms.cluster_radius : 1e-3 * ctx.drift->c_bound();
  const double bound = ctx.drift->c_bound() + 2.0 * radius;
  std::vector<AtomEstimate> atoms(static_cast<std::size_t>(c.atoms.n_seeds));
  std::vector<double> balls(atoms.size());
  parallel_for(atoms.size(), ctx.threads, [&](std::size_t s) {
    const NoisePath w = sample_two_sided_fbm(c.dt, -c.atoms.t_back, 0.0, c.hurst, d, seed_stream(c.seed, s));
    balls[s] = c.atoms.ball_radius > 0.0 ? c.atoms.ball_radius : default_ball(ctx, w, c.atoms.t_back);
    const auto initials = halton_ball(static_cast<std::size_t>(c.atoms.n_initials), d, balls[s]);
    atoms[s] = estimate_atoms(*ctx.drift, ctx.sigma, w, initials, c.atoms.t_back, radius);
  });

  CsvTable centers(coordinate_header("seed_index", d));
  std::vector<std::string> header = coordinate_header("seed_index", d);
  header.insert(header.begin() + 1, "weight");
  CsvTable table(header);
  json per_seed = json::array();
  int single = 0;
  bool bound_ok = true;
  for (std::size_t s = 0; s < atoms.size(); ++s) {
    const auto& a = atoms[s];
    json cs = json::array();
    for (std::size_t i = 0; i < a.centers.size(); ++i) {
      std::vector<double> row{static_cast<double>(s), a.weights[i]};
      for (int k = 0; k < d; ++k) row.push_back(a.centers[i][k]);
      table.row(row);
      cs.push_back(vec_json(a.centers[i]));
    }
    single += a.p_hat == 1;
    const bool ok = a.p_hat <= 1 || a.max_center_distance <= bound;
    bound_ok = bound_ok && ok;
    per_seed.push_back(json{{"p_hat", a.p_hat},
                            {"weights", a.weights},
                            {"centers", cs},
                            {"ambiguous", a.ambiguous},
                            {"max_center_distance", a.max_center_distance},
                            {"ball_radius", balls[s]},
                            {"distance_bound_holds", ok}});
  }
  ctx.dir.write_csv("centers.csv", table);
  json report{{"per_seed", per_seed},
              {"cluster_radius", radius},
              {"distance_bound", bound},
              {"distance_bound_holds", bound_ok},
              {"n_single_atom", single},
              {"t_back", c.atoms.t_back},
              {"n_initials", c.atoms.n_initials},
              {"seed", c.seed}};
  ctx.dir.write_report("atoms.json", report);
  ctx.out << "atoms: p_hat=1 on " << single << "/" << atoms.size() << " seeds, distance bound "
          << (bound_ok ? "holds" : "VIOLATED");
  return kExitOk;
}

int cmd_attractor(const Context& ctx) {
  const auto& c = ctx.config;
  const int d = c.drift.dim;
  const double t_max = *std::max_element(c.attractor.schedule.begin(), c.attractor.schedule.end());
  std::vector<std::vector<AttractorEstimate>> runs(static_cast<std::size_t>(c.attractor.n_seeds));
  std::vector<double> balls(runs.size());
  parallel_for(runs.size(), ctx.threads, [&](std::size_t s) {
    const NoisePath w =
        sample_two_sided_fbm(c.dt, -std::max(t_max, c.dt), 0.0, c.hurst, d, seed_stream(c.seed, s));
    balls[s] = c.attractor.ball_radius > 0.0 ? c.attractor.ball_radius : default_ball(ctx, w, std::max(t_max, c.dt));
    runs[s] = attractor_diameter(*ctx.drift, ctx.sigma, w, balls[s], c.attractor.n_initials, c.attractor.schedule);
  });
  CsvTable table({"seed_index", "t_back", "diameter"});
  json per_seed = json::array();
  double worst_final = 0.0;
  for (std::size_t s = 0; s < runs.size(); ++s) {
    json series = json::array();
    for (const auto& e : runs[s]) {
      table.row(std::vector<double>{static_cast<double>(s), e.t_back, e.diameter});
      series.push_back(json{{"t_back", e.t_back}, {"diameter", e.diameter}, {"n_initials", e.n_initials}});
      if (e.t_back == t_max) worst_final = std::max(worst_final, e.diameter);
    }
    per_seed.push_back(json{{"ball_radius", balls[s]}, {"estimates", series}});
  }
  ctx.dir.write_csv("attractor.csv", table);
  ctx.dir.write_report("attractor.json",
                       json{{"per_seed", per_seed}, {"max_diameter_at_largest_t_back", worst_final}, {"seed", c.seed}});
  ctx.out << "attractor: max diameter at t_back=" << summarize(t_max) << " is " << summarize(worst_final) << " over "
          << runs.size() << " seeds";
  return kExitOk;
}

int cmd_ergodic(const Context& ctx) {
  const auto& c = ctx.config;
  ErgodicConfig ec;
  ec.horizon = c.ergodic.horizon;
  ec.n_realizations = c.ergodic.n_realizations;
  ec.dt = c.dt;
  ec.seed = c.seed;
  ec.threads = ctx.threads;
  const double clip = c.ergodic.clip;
  std::function<double(const Vec&)> fn = [](const Vec&) { return 1.0; };
  if (c.ergodic.test_fn == "clipped_square") fn = [clip](const Vec& x) { return std::min(x.squaredNorm(), clip); };
  const ErgodicReport r =
      ergodic_average_check(*ctx.drift, ctx.sigma, c.hurst, fn, to_state(c.ergodic.x0, c.drift.dim), ec);
  const double combined = std::hypot(r.time_se, r.ensemble_se);
  ctx.dir.write_report("report.json", json{{"time_avg", r.time_avg},
                                           {"ensemble_avg", r.ensemble_avg},
                                           {"gap", r.gap},
                                           {"time_se", r.time_se},
                                           {"ensemble_se", r.ensemble_se},
                                           {"combined_se", combined},
                                           {"seed", c.seed}});
  ctx.out << "ergodic: time=" << summarize(r.time_avg) << " ensemble=" << summarize(r.ensemble_avg)
          << " gap=" << summarize(r.gap) << " (" << summarize(combined > 0 ? r.gap / combined : 0.0) << " se)";
  return kExitOk;
}

json pushout_json(const PushoutReport& r) {
  json ex = json::array();
  for (const auto& e : r.excursions) {
    ex.push_back(json{{"entry", e.entry},
                      {"last_inside", e.last_inside},
                      {"exit_far", e.exit_far},
                      {"ratio", e.ratio},
                      {"bound", e.bound},
                      {"m_measured", e.m_measured},
                      {"checked", e.checked},
                      {"within", e.within}});
  }
  return json{{"v", r.v},
              {"occupation_time", r.occupation_time},
              {"worst_case_over_initials", r.worst_case_over_initials},
              {"horizon", r.horizon},
              {"kappa_bound", std::isfinite(r.kappa_bound) ? json(r.kappa_bound) : json(nullptr)},
              {"radius", r.radius},
              {"per_initial", r.per_initial},
              {"excursions", ex},
              {"excursions_within_bound", r.excursions_within_bound},
              {"first_coordinate_increasing", r.first_coordinate_increasing}};
}

int cmd_pushout(const Context& ctx) {
  const auto& c = ctx.config;
  const int d = c.drift.dim;
  const PushoutGeometry geo = PushoutGeometry::from_drift(*ctx.drift, c.pushout.r2);
  const double init_radius = c.pushout.initial_radius > 0.0 ? c.pushout.initial_radius : 2.0 * geo.critical_radius;
  const auto initials = halton_ball(static_cast<std::size_t>(c.pushout.n_initials), d, init_radius);

  std::vector<PushoutReport> reports(c.pushout.v_factors.size());
  parallel_for(reports.size(), ctx.threads, [&](std::size_t i) {
    reports[i] = pushout_report(*ctx.drift, ctx.sigma, c.pushout.v_factors[i] * geo.m_r2, initials,
                                c.pushout.horizon, c.dt, geo);
  });
  CsvTable table({"v_factor", "v", "occupation_time", "worst_case", "worst_fraction", "excursions_within_bound"});
  json per_v = json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    table.row(std::vector<std::string>{format_double(c.pushout.v_factors[i]), format_double(r.v),
                                       format_double(r.occupation_time), format_double(r.worst_case_over_initials),
                                       format_double(r.worst_case_over_initials / r.horizon),
                                       r.excursions_within_bound ? "1" : "0"});
    json j = pushout_json(r);
    j["v_factor"] = c.pushout.v_factors[i];
    per_v.push_back(j);
  }
  ctx.dir.write_csv("occupation.csv", table);

  json report{{"critical_radius", geo.critical_radius},
              {"r2", geo.r2},
              {"m_r2", geo.m_r2},
              {"initial_radius", init_radius},
              {"n_initials", initials.size()},
              {"reports", per_v},
              {"seed", c.seed}};
  int code = kExitOk;
  if (c.pushout.conditioned.enabled) {
    ConditionedConfig cc;
    cc.h = c.hurst;
    cc.v = c.pushout.conditioned.v;
    cc.delta = c.pushout.conditioned.delta;
    cc.horizon = c.pushout.conditioned.horizon;
    cc.dt = c.dt;
    cc.n_attempts = c.pushout.conditioned.n_attempts;
    cc.max_reports = c.pushout.conditioned.max_reports;
    cc.seed = seed_stream(c.seed, 0, 0x9c);
    cc.threads = ctx.threads;
    const ConditionedPushout cp = conditioned_noise_pushout(*ctx.drift, ctx.sigma, initials, cc, geo);
    json reps = json::array();
    for (const auto& r : cp.reports) reps.push_back(pushout_json(r));
    report["conditioned"] = json{{"attempts", cp.attempts},
                                 {"accepted", cp.accepted},
                                 {"acceptance_rate", cp.acceptance_rate},
                                 {"min_distance", cp.min_distance},
                                 {"deviation_bound", std::isfinite(cp.deviation_bound) ? json(cp.deviation_bound)
                                                                                       : json(nullptr)},
                                 {"control_reference", cp.control_reference},
                                 {"reports", reps}};
    if (cp.no_acceptance()) code = kExitNoAcceptance;
  }
  ctx.dir.write_report("report.json", report);
  ctx.out << "pushout: worst occupation " << summarize(reports.back().worst_case_over_initials) << " of horizon "
          << summarize(c.pushout.horizon) << " at v=" << summarize(reports.back().v);
  if (code == kExitNoAcceptance) ctx.out << "; conditioned noise: no path within delta";
  return code;
}

int cmd_validate_noise(const Context& ctx) {
  const auto& c = ctx.config;
  NoiseValidationConfig nc;
  nc.hursts = c.validate_noise.hursts;
  nc.nodes = c.validate_noise.nodes;
  nc.paths = c.validate_noise.paths;
  nc.max_lag = c.validate_noise.max_lag;
  nc.rel_tolerance = c.validate_noise.rel_tolerance;
  nc.whiteness_seeds = c.validate_noise.whiteness_seeds;
  nc.seed = c.seed;
  nc.threads = ctx.threads;
  const NoiseValidation v = validate_noise(nc);
  CsvTable table({"h", "lag", "empirical", "analytic", "stderr", "rel_error", "pass"});
  json checks = json::array();
  for (const auto& k : v.covariances) {
    table.row(std::vector<std::string>{format_double(k.h), std::to_string(k.lag), format_double(k.empirical),
                                       format_double(k.analytic), format_double(k.std_err),
                                       format_double(k.rel_error), k.pass ? "1" : "0"});
    checks.push_back(json{{"h", k.h},
                          {"lag", k.lag},
                          {"empirical", k.empirical},
                          {"analytic", k.analytic},
                          {"stderr", k.std_err},
                          {"rel_error", k.rel_error},
                          {"pass", k.pass}});
  }
  ctx.dir.write_csv("covariance.csv", table);
  json report{{"covariances", checks}, {"pass", v.pass}, {"seed", c.seed}};
  report["whiteness"] = v.whiteness ? json{{"seeds", v.whiteness->seeds},
                                           {"passed", v.whiteness->passed},
                                           {"critical_value", v.whiteness->critical_value},
                                           {"pass", v.whiteness->pass}}
                                    : json(nullptr);
  ctx.dir.write_report("report.json", report);
  const auto failed = std::count_if(v.covariances.begin(), v.covariances.end(), [](const auto& k) { return !k.pass; });
  ctx.out << "validate-noise: " << (v.pass ? "PASS" : "FAIL") << " (" << v.covariances.size() - failed << "/"
          << v.covariances.size() << " covariance checks";
  if (v.whiteness) ctx.out << ", whiteness " << v.whiteness->passed << "/" << v.whiteness->seeds;
  ctx.out << ")";
  return v.pass ? kExitOk : kExitRuntime;
}

using Command = int (*)(const Context&);

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table{
      {"simulate", cmd_simulate}, {"lyapunov", cmd_lyapunov},   {"sweep", cmd_sweep},
      {"sync", cmd_sync},         {"atoms", cmd_atoms},         {"attractor", cmd_attractor},
      {"ergodic", cmd_ergodic},   {"pushout", cmd_pushout},     {"validate-noise", cmd_validate_noise}};
  return table;
}

const std::map<std::string, std::string>& descriptions() {
  static const std::map<std::string, std::string> table{
      {"simulate", "integrate one trajectory (and optionally its Jacobian)"},
      {"lyapunov", "estimate the top Lyapunov exponent"},
      {"sweep", "top Lyapunov exponent over a ladder of noise strengths"},
      {"sync", "two-point (n-point) motion under a common noise"},
      {"atoms", "cluster pullback endpoints into random atoms"},
      {"attractor", "pullback attractor diameter along a t_back schedule"},
      {"ergodic", "time average versus ensemble average"},
      {"pushout", "occupation time under a strong constant control"},
      {"validate-noise", "fGn covariance and whiteness oracle suite"}};
  return table;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fracsync: SDEs driven by fractional noise", "fracsync"};
  app.set_version_flag("--version", artifact_version());
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  for (const auto& [name, description] : descriptions()) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("config", config_path, "YAML config file (defaults when omitted)");
    sub->add_option("--set", overrides, "override a config value, e.g. --set sweep.kappas=[1,2]")
        ->type_name("KEY=VALUE")
        ->take_all();
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << artifact_version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitValidation;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const ExperimentConfig config =
        config_path.empty() ? parse_config("", overrides) : load_config(config_path, overrides);
    const auto drift = make_drift(config.drift);
    if (config.hurst > 0.5 && !std::isfinite(drift->constants().lipschitz)) {
      err << "warning: drift '" << config.drift.name << "' has unbounded DF and H > 1/2\n";
    }
    const int threads = resolve_thread_count(config.threads);
    const RunDirectory dir(config, name);
    const Context ctx{config, drift, config.diffusion(), threads, dir, out, err};
    const auto start = std::chrono::steady_clock::now();
    const int code = commands().at(name)(ctx);
    dir.write_meta(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), threads);
    out << " -> " << dir.path().string() << "\n";
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ContractViolation& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IntegrationError& e) {
    err << "integration error: " << e.what() << " (last finite time " << e.last_finite_time() << ")\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace fracsync
