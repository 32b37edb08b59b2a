#include "memwalk/cli/commands.hpp"

#include "memwalk/cli/config.hpp"
#include "memwalk/cli/output.hpp"
#include "memwalk/ergodics/histogram.hpp"
#include "memwalk/ergodics/mixing.hpp"
#include "memwalk/ergodics/stationarity.hpp"
#include "memwalk/integrator/ensemble.hpp"
#include "memwalk/integrator/trajectory_io.hpp"
#include "memwalk/lyapunov/diagnostics.hpp"
#include "memwalk/lyapunov/lyapunov.hpp"
#include "memwalk/models/validation.hpp"
#include "memwalk/variational/control_path.hpp"
#include "memwalk/variational/rho.hpp"
#include "memwalk/variational/zeta.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>

namespace memwalk::cli {

namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Raised when a pipeline stops on a runtime condition (aborted trajectory, ...).
class AbortError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when the configured inputs are rejected by a module's preconditions.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  double alpha = 0.0;
  double t_max = 0.0;
  bool full = false;
  bool has_out_dir = false;
  bool has_seed = false;
  bool has_alpha = false;
  bool has_t_max = false;
};

struct Context {
  RunConfig config;
  Flags flags;
  fs::path out_dir;
  std::ostream& out;
  std::ostream& err;
};

ojson number_or_null(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

RunConfig load(const Flags& flags, std::optional<double> t_max = std::nullopt) {
  ConfigOverrides overrides;
  if (flags.has_seed) {
    overrides.seed = flags.seed;
  }
  if (flags.has_alpha) {
    overrides.coulomb_alpha = flags.alpha;
  }
  if (flags.has_t_max) {
    overrides.t_max = flags.t_max;
  } else if (t_max) {
    overrides.t_max = t_max;
  }
  return flags.config.empty() ? parse_config("{}", overrides) : load_config(flags.config, overrides);
}

// --out-dir, then MEMWALK_OUT, then output.out_dir.
fs::path resolve_out_dir(const Flags& flags, const RunConfig& config) {
  if (flags.has_out_dir) {
    return flags.out_dir;
  }
  if (const char* env = std::getenv("MEMWALK_OUT"); env != nullptr && *env != '\0') {
    return env;
  }
  return config.output.out_dir;
}

integrator::NamedObservable observable_by_name(const std::string& name) {
  if (name == "radius") {
    return integrator::observable_radius();
  }
  if (name == "speed_sq") {
    return integrator::observable_speed_sq();
  }
  auto obs = integrator::observable_coordinate(std::stoi(name.substr(1)) - 1);
  obs.name = name;
  return obs;
}

integrator::Trajectory run_single(const integrator::SimConfig& sim) {
  integrator::Trajectory traj = integrator::simulate(sim);
  if (traj.aborted) {
    throw AbortError("trajectory aborted at step " + std::to_string(traj.abort_step) + ": " + traj.abort_message);
  }
  return traj;
}

integrator::Ensemble run_ensemble(const integrator::SimConfig& sim, int n, const std::vector<integrator::NamedObservable>& obs,
                                  const integrator::EnsembleOptions& options) {
  integrator::Ensemble ens = integrator::simulate_ensemble(sim, n, obs, options);
  if (static_cast<int>(ens.aborted.size()) == n) {
    throw AbortError("every ensemble member aborted; first: " + ens.abort_messages.front());
  }
  return ens;
}

ojson trajectory_summary(const integrator::Trajectory& traj) {
  return {{"recorded_states", traj.times.size()},
          {"min_radius", traj.min_radius},
          {"singularity_events", traj.singularity_events},
          {"truncation_warnings", traj.truncation_warnings},
          {"guarded_steps", traj.guarded_steps}};
}

// Histogram, peak and stationarity of one trajectory.
struct RadialAnalysis {
  std::optional<ergodics::RadialPdf> pdf;
  ojson summary;
};

RadialAnalysis analyse_radii(const integrator::Trajectory& traj, const RunConfig& c) {
  RadialAnalysis a;
  const double burn_in = c.sim.burn_in;
  try {
    a.pdf = ergodics::radial_histogram(traj, burn_in, c.analysis.bins);
  } catch (const ArgumentError& e) {
    a.summary["histogram"] = std::string("skipped: ") + e.what();
  }
  if (a.pdf) {
    const ergodics::PeakLocation peak = ergodics::peak_location(*a.pdf);
    a.summary["histogram"] = {{"bins", a.pdf->bins()}, {"samples", a.pdf->samples}, {"width", a.pdf->width()}};
    a.summary["peak"] = {{"radius", peak.radius}, {"bin", peak.bin}, {"ambiguous", peak.ambiguous},
                         {"candidates", peak.candidates}};
  }
  try {
    const ergodics::StationarityResult st = ergodics::stationarity_test(traj, burn_in, c.analysis.split);
    a.summary["stationarity"] = {{"ks", st.ks},
                                 {"critical", st.critical},
                                 {"p_value", st.p_value},
                                 {"n_first", st.n_first},
                                 {"n_second", st.n_second},
                                 {"tau_first", st.tau_first},
                                 {"tau_second", st.tau_second},
                                 {"n_first_eff", st.n_first_eff},
                                 {"n_second_eff", st.n_second_eff},
                                 {"stationary", st.stationary()}};
  } catch (const ArgumentError& e) {
    a.summary["stationarity"] = std::string("skipped: ") + e.what();
  }
  return a;
}

int cmd_simulate(Context& ctx) {
  const RunConfig& c = ctx.config;
  const integrator::Trajectory traj = run_single(c.sim);
  write_file(ctx.out_dir, "trajectory.csv", [&](std::ostream& o) { integrator::write_trajectory_csv(o, traj); });
  RadialAnalysis radial = analyse_radii(traj, c);
  if (radial.pdf) {
    write_file(ctx.out_dir, "histogram.csv", [&](std::ostream& o) { ergodics::write_histogram_csv(o, *radial.pdf); });
    if (c.output.emit_plots) {
      write_file(ctx.out_dir, "histogram.gp", [&](std::ostream& o) {
        ergodics::write_fig1_plot_script(o, {"histogram.csv"}, {"p(r)"}, "histogram.png");
      });
    }
  }
  ojson summary = trajectory_summary(traj);
  summary.update(radial.summary);
  write_text(ctx.out_dir, "summary.json", dump(summary));
  ctx.out << "simulate: " << traj.times.size() << " recorded states, min |x| = " << traj.min_radius;
  if (summary.contains("peak")) {
    ctx.out << ", peak r = " << summary["peak"]["radius"].get<double>();
  }
  ctx.out << "\n";
  return kExitOk;
}

int cmd_ensemble(Context& ctx) {
  const RunConfig& c = ctx.config;
  const lyapunov::LyapunovParams params =
      lyapunov::choose_kappa(c.sim.model, c.analysis.metric.safety, c.analysis.metric.p2);
  std::vector<integrator::NamedObservable> obs = {integrator::observable_radius(), integrator::observable_speed_sq()};
  if (c.analysis.observable != "radius" && c.analysis.observable != "speed_sq") {
    obs.push_back(observable_by_name(c.analysis.observable));
  }
  obs.push_back(lyapunov::psi_observable(c.sim.model, params, c.sim.dt, integrator::memory_steps(c.sim)));
  integrator::EnsembleOptions options;
  options.threads = ctx.flags.threads;
  options.keep_member_values = true;
  const integrator::Ensemble ens = run_ensemble(c.sim, c.n_members, obs, options);

  write_file(ctx.out_dir, "ensemble.csv", [&](std::ostream& o) {
    o << "t";
    for (const auto& s : ens.series) {
      o << "," << s.name << "_mean," << s.name << "_stderr";
    }
    o << "\n";
    for (std::size_t k = 0; k < ens.times.size(); ++k) {
      o << integrator::format_number(ens.times[k]);
      for (const auto& s : ens.series) {
        o << "," << integrator::format_number(s.stats[k].mean) << ","
          << integrator::format_number(s.stats[k].stderr_of_mean());
      }
      o << "\n";
    }
  });
  const lyapunov::ExpMomentDiagnostic diag = lyapunov::exp_moment_diagnostic(ens, ens.times, c.sim.burn_in);
  write_file(ctx.out_dir, "exp_moment.csv", [&](std::ostream& o) { lyapunov::write_exp_moment_csv(o, diag); });

  ojson final_means = ojson::object();
  for (const auto& s : ens.series) {
    final_means[s.name] = {{"mean", s.stats.back().mean}, {"stderr", s.stats.back().stderr_of_mean()}};
  }
  const ojson summary = {{"n_members", ens.n_members},
                         {"aborted_members", ens.aborted},
                         {"singularity_events", ens.singularity_events},
                         {"kappa", params.kappa},
                         {"final", final_means},
                         {"envelope",
                          {{"fitted", diag.envelope.fitted},
                           {"log_plateau", number_or_null(diag.envelope.log_plateau)},
                           {"rate", number_or_null(diag.envelope.rate)},
                           {"r2", number_or_null(diag.envelope.r2)}}}};
  write_text(ctx.out_dir, "summary.json", dump(summary));
  ctx.out << "ensemble: " << ens.n_members << " members, " << ens.aborted.size() << " aborted, "
          << ens.times.size() << " recorded times\n";
  return kExitOk;
}

int cmd_validate(Context& ctx) {
  const RunConfig& c = ctx.config;
  models::SamplingPlan plan;
  plan.seed = c.sim.seed;
  plan.p2 = c.analysis.metric.p2;
  const models::ValidationReport report = models::validate_assumptions(c.sim.model, plan);
  ojson checks = ojson::array();
  for (const auto& check : report.checks) {
    std::vector<double> head(check.violations.begin(),
                             check.violations.begin() + std::min<std::size_t>(check.violations.size(), 20));
    checks.push_back({{"name", check.name},
                      {"verdict", std::string(models::to_string(check.verdict))},
                      {"message", check.message},
                      {"estimate", number_or_null(check.estimate)},
                      {"violation_count", check.violations.size()},
                      {"violations", head}});
    ctx.out << check.name << ": " << models::to_string(check.verdict) << " - " << check.message << "\n";
  }
  ojson lyap;
  try {
    const lyapunov::LyapunovParams p = lyapunov::choose_kappa(c.sim.model, c.analysis.metric.safety, c.analysis.metric.p2);
    lyap = {{"kappa", p.kappa},
            {"c_kappa", number_or_null(p.c_kappa)},
            {"C_kappa", number_or_null(p.C_kappa)},
            {"warnings", p.warnings}};
  } catch (const ArgumentError& e) {
    lyap = {{"error", e.what()}};
  }
  write_text(ctx.out_dir, "validation.json", dump({{"passed", report.passed()}, {"checks", checks}, {"lyapunov", lyap}}));
  ctx.out << "validate: " << (report.passed() ? "all checks passed" : "some checks failed") << "\n";
  return report.passed() ? kExitOk : kExitValidation;
}

int cmd_mixing(Context& ctx) {
  const RunConfig& c = ctx.config;
  integrator::SimConfig b = c.sim;
  b.x0 = c.analysis.mixing.x0_b;
  b.v0 = c.analysis.mixing.v0_b;
  b.initial_past = b.x0;
  const std::vector<integrator::NamedObservable> obs = {observable_by_name(c.analysis.observable)};
  integrator::EnsembleOptions options;
  options.threads = ctx.flags.threads;
  const integrator::Ensemble ea = run_ensemble(c.sim, c.n_members, obs, options);
  const integrator::Ensemble eb = run_ensemble(b, c.n_members, obs, options);
  const ergodics::MixingFit fit = ergodics::mixing_rate(ea, eb, c.analysis.observable);
  write_file(ctx.out_dir, "mixing.csv", [&](std::ostream& o) { ergodics::write_mixing_csv(o, fit); });
  write_text(ctx.out_dir, "mixing.json", ergodics::mixing_summary_json(fit) + "\n");
  ctx.out << "mixing: " << fit.verdict();
  if (fit.rate_reported()) {
    ctx.out << ", c = " << fit.rate << ", R^2 = " << fit.r2;
  }
  ctx.out << "\n";
  return kExitOk;
}

int cmd_variational(Context& ctx) {
  const RunConfig& c = ctx.config;
  const VariationalBlock& v = c.analysis.variational;
  const int dim = c.sim.model.dimension;
  const variational::Perturbation xi = variational::Perturbation::position(unit_vec(dim, 0));
  variational::RhoNumericOptions opts;
  opts.kernel = c.sim.model.kernel;
  opts.p2 = c.analysis.metric.p2;
  opts.n_mem = c.sim.n_mem;
  const variational::VariationalSeries rho = variational::rho_numeric(xi, v.rate_alpha, c.sim.dt, v.t_end, opts);

  double sup_error = 0.0;
  bool envelope_holds = true;
  const double envelope = variational::decay_envelope_constant(xi.x, xi.v, v.rate_alpha);
  for (std::size_t k = 0; k < rho.times.size(); ++k) {
    const auto [px, pv] = variational::rho_closed_form(xi.x, xi.v, v.rate_alpha, rho.times[k]);
    sup_error = std::max({sup_error, (rho.px[k] - px).cwiseAbs().maxCoeff(), (rho.pv[k] - pv).cwiseAbs().maxCoeff()});
    const double size = rho.px[k].norm() + rho.pv[k].norm();
    envelope_holds = envelope_holds && size <= envelope * std::exp(-2.0 * v.rate_alpha * rho.times[k]);
  }
  write_file(ctx.out_dir, "rho.csv", [&](std::ostream& o) { variational::write_rho_csv(o, rho); });

  integrator::SimConfig sim = c.sim;
  sim.t_max = v.t_end;
  sim.burn_in = 0.0;
  sim.record_stride = 1;
  sim.keep_states = true;
  const integrator::Trajectory traj = run_single(sim);
  const variational::ZetaSeries zeta =
      variational::zeta_control(traj, sim.initial_past, rho, c.sim.model, v.rate_alpha);
  write_file(ctx.out_dir, "zeta.csv", [&](std::ostream& o) { variational::write_zeta_csv(o, zeta); });

  const ojson summary = {{"rate_alpha", v.rate_alpha},
                         {"dt", c.sim.dt},
                         {"t_end", v.t_end},
                         {"sup_error", sup_error},
                         {"envelope_constant", envelope},
                         {"envelope_holds", envelope_holds},
                         {"zeta_energy", zeta.energy},
                         {"zeta_unreliable_points", zeta.unreliable_count}};
  write_text(ctx.out_dir, "variational.json", dump(summary));
  ctx.out << "variational: sup |rho_numeric - rho_closed_form| = " << sup_error
          << (envelope_holds ? ", decay envelope holds" : ", decay envelope violated") << "\n";
  return kExitOk;
}

int cmd_control_path(Context& ctx) {
  const RunConfig& c = ctx.config;
  const VariationalBlock& v = c.analysis.variational;
  variational::ControlPath path;
  try {
    path = variational::build_control_path(c.sim.x0, c.sim.v0, v.control_t, v.control_eps, v.r_target,
                                           c.analysis.metric.p2, v.control_h);
  } catch (const DomainError& e) {
    throw ValidationError(std::string("control path preconditions: ") + e.what());
  }
  const variational::GammaResult gamma = variational::gamma_residual(path, c.sim.model);
  const int dim = c.sim.model.dimension;
  Vec x(dim);
  Vec vel(dim);
  path.eval(0.0, x, vel);
  const double start_error = (x - c.sim.x0).norm() + (vel - c.sim.v0).norm();
  path.eval(path.t, x, vel);
  const double end_error = (x - unit_vec(dim, 0)).norm() + vel.norm();
  write_file(ctx.out_dir, "control_path.csv", [&](std::ostream& o) { variational::write_control_path_csv(o, path); });
  const ojson summary = {{"case", variational::to_string(path.kind)},
                         {"t", path.t},
                         {"eps_requested", path.eps_requested},
                         {"eps", path.eps},
                         {"halvings", path.halvings},
                         {"grid_points", path.grid.size()},
                         {"min_radius", path.min_radius},
                         {"p2_integral", path.p2_integral},
                         {"r_target", path.r_target},
                         {"start_error", start_error},
                         {"end_error", end_error},
                         {"gamma_residual", gamma.residual}};
  write_text(ctx.out_dir, "control_path.json", dump(summary));
  ctx.out << "control-path: " << variational::to_string(path.kind) << ", eps = " << path.eps
          << ", min |x| = " << path.min_radius << ", integral = " << path.p2_integral
          << ", Gamma residual = " << gamma.residual << "\n";
  return kExitOk;
}

int cmd_reproduce_fig1(Context& ctx) {
  std::vector<double> alphas = {1.0, 3.0, 5.0};
  if (ctx.flags.has_alpha) {
    alphas = {ctx.flags.alpha};
  }
  const double t_max = ctx.flags.full ? 1e4 : 2000.0;
  ojson runs = ojson::array();
  std::vector<std::string> csv_files;
  std::vector<std::string> labels;
  for (const double alpha : alphas) {
    Flags flags = ctx.flags;
    flags.has_alpha = true;
    flags.alpha = alpha;
    const RunConfig c = load(flags, t_max);
    const std::string tag = "alpha" + compact_number(alpha);
    write_text(ctx.out_dir, "effective_config_" + tag + ".json", effective_config_text(c));
    const integrator::Trajectory traj = run_single(c.sim);
    RadialAnalysis radial = analyse_radii(traj, c);
    if (!radial.pdf) {
      throw AbortError("too few post-burn-in samples for the histogram at alpha = " + compact_number(alpha));
    }
    const std::string csv = "fig1_" + tag + ".csv";
    write_file(ctx.out_dir, csv, [&](std::ostream& o) { ergodics::write_histogram_csv(o, *radial.pdf); });
    csv_files.push_back(csv);
    labels.push_back("alpha = " + compact_number(alpha));

    const double peak = radial.summary["peak"]["radius"].get<double>();
    const double lo = 0.8 * std::sqrt(alpha);
    const double hi = 1.2 * std::sqrt(alpha);
    ojson run = {{"alpha", alpha},
                 {"t_max", c.sim.t_max},
                 {"burn_in", c.sim.burn_in},
                 {"seed", c.sim.seed},
                 {"histogram_csv", csv},
                 {"sqrt_alpha", std::sqrt(alpha)},
                 {"band", {lo, hi}},
                 {"peak_in_band", peak >= lo && peak <= hi}};
    run.update(trajectory_summary(traj));
    run.update(radial.summary);
    runs.push_back(run);
    ctx.out << "reproduce-fig1: alpha = " << compact_number(alpha) << ", peak r = " << peak << " (sqrt alpha = "
            << std::sqrt(alpha) << ")";
    if (radial.summary["stationarity"].is_object()) {
      ctx.out << ", KS = " << radial.summary["stationarity"]["ks"].get<double>() << " vs "
              << radial.summary["stationarity"]["critical"].get<double>();
    }
    ctx.out << "\n";
  }
  if (ctx.config.output.emit_plots) {
    write_file(ctx.out_dir, "fig1.gp",
               [&](std::ostream& o) { ergodics::write_fig1_plot_script(o, csv_files, labels, "fig1.png"); });
  }
  write_text(ctx.out_dir, "fig1_summary.json", dump({{"runs", runs}}));
  return kExitOk;
}

using Handler = int (*)(Context&);

Handler handler_for(const std::string& name) {
  if (name == "simulate") return cmd_simulate;
  if (name == "ensemble") return cmd_ensemble;
  if (name == "validate") return cmd_validate;
  if (name == "mixing") return cmd_mixing;
  if (name == "variational") return cmd_variational;
  if (name == "control-path") return cmd_control_path;
  if (name == "reproduce-fig1") return cmd_reproduce_fig1;
  return nullptr;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"simulate",    "ensemble",     "validate",      "mixing",
                                                 "variational", "control-path", "reproduce-fig1"};
  return names;
}

std::string usage_text() {
  return "usage: memwalk <subcommand> [--config PATH] [--out-dir PATH] [--seed U64] [--threads N]\n"
         "                            [--alpha F] [--t-max F] [--full]\n"
         "subcommands:\n"
         "  simulate        one trajectory: trajectory.csv, histogram.csv, summary.json\n"
         "  ensemble        seeded ensemble: ensemble.csv, exp_moment.csv, summary.json\n"
         "  validate        sampled assumption checks: validation.json (exit 1 on a failed check)\n"
         "  mixing          two ensembles from sim.x0 and analysis.mixing.x0_b: mixing.csv, mixing.json\n"
         "  variational     tangent flow and control: rho.csv, zeta.csv, variational.json\n"
         "  control-path    deterministic path to (e1, 0): control_path.csv, control_path.json\n"
         "  reproduce-fig1  radial densities for alpha = 1, 3, 5 (t_max 2000, --full for 1e4)\n"
         "MEMWALK_OUT overrides output.out_dir; --out-dir overrides both.\n";
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << usage_text();
    return kExitUsage;
  }
  if (args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
    out << usage_text();
    return kExitOk;
  }
  const Handler handler = handler_for(args[0]);
  if (handler == nullptr) {
    err << "unknown subcommand '" << args[0] << "'\n" << usage_text();
    return kExitUsage;
  }

  Flags flags;
  CLI::App app{"memwalk " + args[0], "memwalk " + args[0]};
  app.add_option("--config", flags.config, "JSON config file");
  auto* out_opt = app.add_option("--out-dir", flags.out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", flags.seed, "master seed");
  app.add_option("--threads", flags.threads, "worker threads (0: machine parallelism)")->check(CLI::NonNegativeNumber);
  auto* alpha_opt = app.add_option("--alpha", flags.alpha, "coulomb_alpha");
  auto* t_max_opt = app.add_option("--t-max", flags.t_max, "simulated time");
  app.add_flag("--full", flags.full, "reproduce-fig1 at t_max = 1e4");
  std::vector<std::string> rest(args.rbegin(), args.rend() - 1);  // CLI11 takes reversed order
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << usage_text();
    return kExitUsage;
  }
  flags.has_out_dir = out_opt->count() > 0;
  flags.has_seed = seed_opt->count() > 0;
  flags.has_alpha = alpha_opt->count() > 0;
  flags.has_t_max = t_max_opt->count() > 0;

  try {
    RunConfig config = load(flags, args[0] == "reproduce-fig1" ? std::optional<double>(flags.full ? 1e4 : 2000.0)
                                                               : std::nullopt);
    fs::path out_dir = resolve_out_dir(flags, config);
    Context ctx{std::move(config), flags, std::move(out_dir), out, err};
    ensure_directory(ctx.out_dir);
    if (args[0] != "reproduce-fig1") {  // that one writes one effective config per alpha
      write_text(ctx.out_dir, "effective_config.json", effective_config_text(ctx.config));
    }
    return handler(ctx);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "validation failure: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "runtime abort: " << e.what() << "\n";
    return kExitAbort;
  }
}

}  // namespace memwalk::cli
