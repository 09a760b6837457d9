#include "solitonforge/cli/commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <ostream>

#include "solitonforge/cli/export.hpp"
#include "solitonforge/error.hpp"
#include "solitonforge/flow.hpp"
#include "solitonforge/geometry.hpp"
#include "solitonforge/oracle.hpp"
#include "solitonforge/reconstruct.hpp"
#include "solitonforge/verify.hpp"

namespace solitonforge::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Solution {
  flow::Trajectory traj;
  reconstruct::MetricProfile profile;
};

Solution solve(const model::ProblemSpec& spec) {
  Solution sol;
  sol.traj = flow::integrate(spec, flow::seed(spec));
  sol.profile = reconstruct::reconstruct(sol.traj, spec);
  return sol;
}

std::vector<std::pair<double, double>> bounds_for(const RunConfig& cfg) {
  return cfg.sectional_bounds.empty() ? geometry::default_sectional_bounds(cfg.spec) : cfg.sectional_bounds;
}

void write_solution(const fs::path& dir, const RunConfig& cfg, const Solution& sol,
                    const geometry::CurvatureReport* curv = nullptr) {
  write_table(dir, "profile", profile_table(sol.traj, sol.profile, cfg.output.thin), cfg.output.format);
  write_json(dir / "summary.json", trajectory_summary(sol.traj, sol.profile));
  write_plot_series(dir, sol.profile, cfg.output.plots, curv);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

int cmd_solve(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  const auto sol = solve(cfg.spec);
  write_solution(dir, cfg, sol);
  out << "solve: " << flow::termination_name(sol.traj.termination) << ", " << sol.traj.samples.size()
      << " samples, t in [" << fmt(sol.profile.rows.front().t) << ", " << fmt(sol.profile.rows.back().t) << "]\n"
      << "output: " << dir.string() << '\n';
  return kOk;
}

int cmd_verify(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  const auto sol = solve(cfg.spec);
  const auto curv = geometry::sectional_curvatures(sol.profile, bounds_for(cfg));
  const auto rep = verify::run_suite(sol.traj, sol.profile, curv, cfg.spec);
  write_solution(dir, cfg, sol, &curv);
  write_json(dir / "verify.json", to_json(rep));
  for (const auto& c : rep.checks)
    out << (c.passed ? "PASS " : "FAIL ") << c.id << ' ' << c.name << " measured=" << fmt(c.measured)
        << " tol=" << fmt(c.tolerance) << (c.passed || c.detail.empty() ? "" : "  [" + c.detail + "]") << '\n';
  out << "verify: " << (rep.passed() ? "all checks passed" : "FAILED") << '\n';
  return rep.passed() ? kOk : kCheckFailed;
}

int cmd_curvature(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  const auto sol = solve(cfg.spec);
  const auto curv = geometry::sectional_curvatures(sol.profile, bounds_for(cfg));
  write_solution(dir, cfg, sol, &curv);
  write_table(dir, "curvature", curvature_table(sol.profile, curv, cfg.output.thin), cfg.output.format);
  json doc{{"soliton_residual_max", curv.soliton_residual_max},
           {"min_ricci", curv.min_ricci},
           {"max_abs_ricci", curv.max_abs_ricci},
           {"max_scalar_mismatch", curv.max_scalar_mismatch}};
  try {
    doc["asymptotics"] = to_json(geometry::asymptotics(sol.profile, cfg.spec));
  } catch (const Error& e) {
    doc["asymptotics"] = nullptr;
    doc["asymptotics_error"] = e.what();
  }
  write_json(dir / "curvature_summary.json", doc);
  out << "curvature: residual " << fmt(curv.soliton_residual_max) << ", min Ricci " << fmt(curv.min_ricci) << '\n';
  return kOk;
}

int cmd_oracle(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  const auto sol = solve(cfg.spec);
  oracle::OracleControls ctl;
  ctl.rel_tol = cfg.oracle.rel_tol;
  const auto cv = oracle::cross_validate(sol.profile, cfg.spec, cfg.oracle.t0_factor, cfg.oracle.decades, ctl);
  write_solution(dir, cfg, sol);
  write_json(dir / "oracle.json", to_json(cv));
  const bool ok = cv.deviation.max() <= 1e-6 && cv.conservation_drift <= 1e-8;
  out << "oracle: t in [" << fmt(cv.t0) << ", " << fmt(cv.t_end) << "], deviation g " << fmt(cv.deviation.g)
      << ", g_dot " << fmt(cv.deviation.g_dot) << ", u_dot " << fmt(cv.deviation.u_dot) << ", conservation drift "
      << fmt(cv.conservation_drift) << (ok ? "" : "  FAILED") << '\n';
  return ok ? kOk : kCheckFailed;
}

int cmd_ricci_flat(RunConfig cfg, const fs::path& dir, std::ostream& out) {
  if (cfg.spec.mode != model::Mode::RicciFlat) {
    cfg.spec.mode = model::Mode::RicciFlat;
    cfg.spec.seed_coeffs[0] = 0.0;
    revalidate(cfg);
  }
  const auto sol = solve(cfg.spec);
  const auto curv = geometry::sectional_curvatures(sol.profile, bounds_for(cfg));
  write_solution(dir, cfg, sol, &curv);
  double drift = 0.0, u_dot = 0.0;
  for (const auto& row : sol.profile.rows) {
    drift = std::max({drift, std::abs(row.L), std::abs(row.H - 1.0)});
    u_dot = std::max(u_dot, std::abs(row.u_dot));
  }
  const bool ok = drift <= 1e-8 && curv.max_abs_ricci <= 1e-6 && u_dot <= 1e-8;
  write_json(dir / "ricci_flat.json", json{{"max_constraint_drift", drift},
                                           {"max_abs_ricci", curv.max_abs_ricci},
                                           {"max_abs_u_dot", u_dot},
                                           {"passed", ok}});
  out << "ricci-flat: " << flow::termination_name(sol.traj.termination) << ", max |L|,|H-1| " << fmt(drift)
      << ", max |Ric| " << fmt(curv.max_abs_ricci) << ", max |u_dot| " << fmt(u_dot) << (ok ? "" : "  FAILED")
      << '\n';
  return ok ? kOk : kCheckFailed;
}

struct SweepPoint {
  double ratio = 0.0;
  double limit = 0.0;
  double error = 0.0;
  std::string dir;
};

int cmd_sweep(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  const std::size_t k = cfg.sweep.factor;
  if (cfg.spec.mode != model::Mode::Soliton)
    throw Error("cli", Errc::ValidationError, "sweep runs soliton trajectories");
  if (k < 2 || k > cfg.spec.rank())
    throw Error("cli", Errc::ValidationError, "sweep.factor must name a factor between 2 and " +
                                                  std::to_string(cfg.spec.rank()));
  const double eps0 = std::abs(cfg.spec.seed_coeffs[0]);
  std::vector<std::future<SweepPoint>> jobs;
  for (std::size_t j = 0; j < cfg.sweep.ratios.size(); ++j) {
    jobs.push_back(std::async(std::launch::async, [&cfg, &dir, j, k, eps0] {
      RunConfig local = cfg;
      const double ratio = cfg.sweep.ratios[j];
      local.spec.seed_coeffs[k - 1] = ratio * eps0;
      revalidate(local);
      const auto sol = solve(local.spec);
      const auto ladder = reconstruct::seed_end_ladder(sol.traj, local.spec, sol.profile);
      const auto bv = reconstruct::boundary_values(ladder, local.spec.rank());
      char name[32];
      std::snprintf(name, sizeof name, "run_%02zu", j);
      const fs::path run_dir = dir / name;
      write_solution(run_dir, local, sol);
      json summary = trajectory_summary(sol.traj, sol.profile);
      summary["ratio"] = ratio;
      summary["boundary_g"] = {{"factor", k}, {"limit", bv.g[k - 1].limit}, {"error", bv.g[k - 1].error_estimate}};
      write_json(run_dir / "sweep_point.json", summary);
      return SweepPoint{ratio, bv.g[k - 1].limit, bv.g[k - 1].error_estimate, name};
    }));
  }
  std::vector<SweepPoint> points;
  for (auto& job : jobs) points.push_back(job.get());

  bool distinct = true;
  for (std::size_t a = 0; a < points.size(); ++a)
    for (std::size_t b = a + 1; b < points.size(); ++b)
      if (!(std::abs(points[a].limit - points[b].limit) > points[a].error + points[b].error)) distinct = false;
  json list = json::array();
  for (const auto& p : points)
    list.push_back({{"ratio", p.ratio}, {"g_limit", p.limit}, {"error", p.error}, {"dir", p.dir}});
  write_json(dir / "sweep.json", json{{"factor", k}, {"points", list}, {"pairwise_distinct", distinct}});
  for (const auto& p : points)
    out << "sweep: eps" << k << "/|eps0| = " << p.ratio << "  g_" << k << "(0) = " << fmt(p.limit) << " +- "
        << fmt(p.error) << "  (" << p.dir << ")\n";
  out << "sweep: boundary values " << (distinct ? "pairwise distinct" : "NOT distinct") << '\n';
  return distinct ? kOk : kCheckFailed;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::ParseError:
    case Errc::ValidationError:
    case Errc::DimensionTooSmall:
    case Errc::BadNormalization:
    case Errc::NonNegativeGauge:
    case Errc::BadSeedSign:
    case Errc::InvalidControls:
    case Errc::LengthMismatch:
      return kConfigError;
    case Errc::IoError:
      return kIoError;
    default:
      return kNumericalError;
  }
}

}  // namespace

void apply_overrides(const CommandLine& cl, RunConfig& cfg) {
  bool changed = false;
  if (cl.format) cfg.output.format = *cl.format;
  if (cl.tol) {
    cfg.spec.step.abs_tol = *cl.tol;
    cfg.spec.step.rel_tol = *cl.tol;
    changed = true;
  }
  if (cl.seed_eps0) {
    cfg.spec.seed_coeffs[0] = *cl.seed_eps0;
    changed = true;
  }
  for (const auto& item : cl.seed_eps) {
    const auto eq = item.find('=');
    std::size_t idx = 0;
    double value = 0.0;
    try {
      if (eq == std::string::npos) throw std::invalid_argument("missing '='");
      idx = std::stoul(item.substr(0, eq));
      value = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error("cli", Errc::ParseError, "--seed-eps expects <i>=<float>, got '" + item + "'");
    }
    if (idx < 2 || idx > cfg.spec.rank())
      throw Error("cli", Errc::ParseError,
                  "--seed-eps index must be between 2 and " + std::to_string(cfg.spec.rank()) + ", got " +
                      std::to_string(idx));
    cfg.spec.seed_coeffs[idx - 1] = value;
    changed = true;
  }
  if (changed) revalidate(cfg);
}

fs::path output_dir(const CommandLine& cl, const RunConfig& cfg) {
  if (cl.out) return *cl.out;
  if (!cfg.output.dir.empty()) return cfg.output.dir;
  if (const char* env = std::getenv(kOutputEnv); env && *env) return env;
  return "solitonforge_out";
}

int run_command(const CommandLine& cl, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const fs::path dir = output_dir(cl, cfg);
  try {
    if (cl.command == "solve") return cmd_solve(cfg, dir, out);
    if (cl.command == "verify") return cmd_verify(cfg, dir, out);
    if (cl.command == "curvature") return cmd_curvature(cfg, dir, out);
    if (cl.command == "oracle") return cmd_oracle(cfg, dir, out);
    if (cl.command == "ricci-flat") return cmd_ricci_flat(cfg, dir, out);
    if (cl.command == "sweep") return cmd_sweep(cfg, dir, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  err << "error: unknown command '" << cl.command << "'\n";
  return kConfigError;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Steady gradient Ricci solitons on multiply warped products"};
  app.require_subcommand(1, 1);
  CommandLine cl;
  std::string format;
  std::vector<CLI::App*> subs;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"solve", "integrate and reconstruct the metric profile"},
      {"verify", "solve and run the verification suite (exit 1 on failure)"},
      {"curvature", "solve and export curvature and asymptotics"},
      {"oracle", "cross-validate against the second-order equations"},
      {"ricci-flat", "integrate a Ricci-flat trajectory"},
      {"sweep", "solve over a grid of seed ratios, concurrently"}};
  std::string config;
  std::string outdir;
  double tol = 0.0, eps0 = 0.0;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "configuration file (JSON)")->required();
    sub->add_option("--out", outdir, "output directory");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--tol", tol, "absolute and relative integration tolerance");
    sub->add_option("--seed-eps0", eps0, "coefficient of the fastest unstable direction");
    sub->add_option("--seed-eps", cl.seed_eps, "seed coefficient of factor i, as i=value")->take_all();
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kConfigError;
  }
  for (auto* sub : subs) {
    if (!sub->parsed()) continue;
    cl.command = sub->get_name();
    if (sub->count("--out")) cl.out = outdir;
    if (sub->count("--format")) cl.format = format == "csv" ? Format::Csv : Format::Json;
    if (sub->count("--tol")) cl.tol = tol;
    if (sub->count("--seed-eps0")) cl.seed_eps0 = eps0;
  }
  cl.config = config;

  RunConfig cfg;
  try {
    cfg = parse_config(cl.config);
    apply_overrides(cl, cfg);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return run_command(cl, cfg, out, err);
}

}  // namespace solitonforge::cli
