#include "sdl/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include <json.hpp>

#include "sdl/bounds.hpp"
#include "sdl/io.hpp"
#include "sdl/kernels.hpp"
#include "sdl/regularization.hpp"
#include "sdl/solver.hpp"
#include "sdl/verify.hpp"

namespace sdl {

using nlohmann::json;

ExitCode exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ScheduleDiverged:
    case ErrorCode::NewtonDiverged:
    case ErrorCode::NonFiniteState:
    case ErrorCode::StabilityViolation:
    case ErrorCode::MassCollapse:
    case ErrorCode::GridMismatch:
    case ErrorCode::XiNonpositive:
      return ExitCode::SolverFault;
    default:
      return ExitCode::ConfigError;
  }
}

std::vector<RawParams> standard_suite(double M, double T) {
  std::vector<RawParams> out;
  for (double m : {-0.8, -0.5, -0.2}) {
    for (double p : {0.25, 0.5, 0.75}) {
      for (double alpha : {2.5 - m, 4.0}) out.push_back({m, p, alpha, M, T});
    }
  }
  return out;
}

namespace {

// Everything a command needs, built once from the config.
struct Context {
  RunConfig config;
  ProblemParams params;
  Grid grid;
  Field u0;
  std::filesystem::path run_dir;
};

struct Solved {
  Trajectory traj;
  double delta_finest = 0.0;
  std::optional<DeltaConvergenceRecord> record;
};

Solved solve_for(const Field& u0, const ProblemParams& params, const RunConfig& config,
                 const SolveOptions& options) {
  Solved s;
  if (u0.min() > 0.0) {
    s.traj = solve_regularized(u0, params, corridor_schedule(params, u0), config.stepping,
                               params.T(), options);
    return s;
  }
  if (config.schedule.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "initial data touch zero; a mollification schedule is required", "schedule");
  }
  SingularSolve singular =
      solve_singular(u0, params, config.schedule, config.stepping, params.T(), options);
  s.traj = std::move(singular.trajectory);
  s.record = std::move(singular.record);
  s.delta_finest = config.schedule.back();
  return s;
}

SolveOptions base_options(const RunConfig& config) {
  SolveOptions o;
  o.stride = std::max<std::size_t>(config.outputs.stride, 1);
  return o;
}

// Stride that keeps shared snapshots at most T/64 apart.
std::size_t contraction_stride(const ProblemParams& params, const StepConfig& step) {
  return std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(params.T() / (64.0 * step.dt_init) + 1e-9)));
}

// u0 + amplitude * bump centred at 1/2 with half-width 1/4.
Field perturbed(const Field& u0, double amplitude) {
  std::vector<double> v(u0.values().begin(), u0.values().end());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double s = (u0.grid().x(i) - 0.5) / 0.25;
    if (std::abs(s) < 1.0) v[i] += amplitude * std::exp(1.0 - 1.0 / (1.0 - s * s));
  }
  return Field(u0.grid(), std::move(v), u0.time());
}

json params_json(const ProblemParams& p) {
  return {{"m", p.m()}, {"p", p.p()}, {"alpha", p.alpha()}, {"M", p.M()}, {"T", p.T()}};
}

json report_json(const EstimateReport& r) {
  json scalars = json::object();
  for (const auto& [k, v] : r.scalars) scalars[k] = v;
  return {{"lemma", std::string(to_string(r.lemma))},
          {"pass", r.pass},
          {"margin", r.margin},
          {"tolerance", r.tolerance},
          {"note", r.note},
          {"flags", r.flags},
          {"scalars", scalars},
          {"times", r.times},
          {"observed", r.observed},
          {"bound", r.bound}};
}

std::string two_column(const std::vector<double>& t, const std::vector<double>& v,
                       std::string_view name) {
  std::vector<std::pair<double, double>> rows;
  for (std::size_t i = 0; i < t.size(); ++i) rows.emplace_back(t[i], v[i]);
  return to_csv(rows, name);
}

void write_report_curves(const std::filesystem::path& dir, const EstimateReport& r) {
  const std::string base = std::string(to_string(r.lemma));
  write_text(dir / "curves" / (base + "_observed.csv"), two_column(r.times, r.observed, "observed"));
  write_text(dir / "curves" / (base + "_bound.csv"), two_column(r.times, r.bound, "bound"));
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = csv_header(traj.initial().size()) + "\n";
  for (const auto& f : traj.snapshots) {
    out += csv_row(f.time(), f.values());
    out += '\n';
  }
  return out;
}

json diagnostics_json(const Trajectory& traj) {
  json events = json::array();
  for (const auto& e : traj.events) {
    events.push_back({{"kind", std::string(to_string(e.kind))},
                      {"t", e.t},
                      {"delta", e.delta},
                      {"m_bar", e.m_bar},
                      {"detail", e.detail}});
  }
  json steps;
  auto column = [&](const char* name, auto get) {
    json col = json::array();
    for (const auto& d : traj.steps) col.push_back(get(d));
    steps[name] = std::move(col);
  };
  column("t", [](const StepDiagnostics& d) { return d.t; });
  column("dt", [](const StepDiagnostics& d) { return d.dt; });
  column("mass", [](const StepDiagnostics& d) { return d.mass; });
  column("max", [](const StepDiagnostics& d) { return d.max; });
  column("min", [](const StepDiagnostics& d) { return d.min; });
  column("grad_sup", [](const StepDiagnostics& d) { return d.grad_sup; });
  column("boundary_flux", [](const StepDiagnostics& d) { return d.boundary_flux; });
  column("source_integral", [](const StepDiagnostics& d) { return d.source_integral; });
  column("energy", [](const StepDiagnostics& d) { return d.energy; });
  column("mass_balance", [](const StepDiagnostics& d) { return d.mass_balance; });
  column("newton_iterations", [](const StepDiagnostics& d) { return d.newton_iterations; });
  return {{"events", events},
          {"steps", steps},
          {"corridor", {{"delta", traj.corridor.delta}, {"m_bar", traj.corridor.m_bar}}},
          {"dt_nominal", traj.dt_nominal},
          {"theta", traj.theta},
          {"kernels", std::string(kernels::active().name)}};
}

void write_plot_script(const std::filesystem::path& dir, const std::vector<std::string>& curves) {
  std::string s = "# gnuplot script: run from this directory\n"
                  "set datafile separator ','\n"
                  "set key autotitle columnhead\n"
                  "set xlabel 't'\n";
  for (const auto& c : curves) {
    s += "set title '" + c + "'\n";
    s += "plot 'curves/" + c + "' using 1:2 with lines\n";
    s += "pause -1\n";
  }
  write_text(dir / "plot.gp", s);
}

std::vector<std::string> curve_files(const std::filesystem::path& dir) {
  std::vector<std::string> out;
  if (!std::filesystem::exists(dir / "curves")) return out;
  for (const auto& e : std::filesystem::directory_iterator(dir / "curves")) {
    out.push_back(e.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void prepare_run_dir(const std::filesystem::path& dir, bool force) {
  if (std::filesystem::exists(dir)) {
    if (!force) {
      throw Error(ErrorCode::Io, "run directory " + dir.string() +
                                     " exists; pass --force to overwrite", "outputs.run_id");
    }
    std::filesystem::remove_all(dir);
  }
  std::filesystem::create_directories(dir);
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}

// ---- commands -------------------------------------------------------------

ExitCode cmd_solve(const Context& ctx, std::ostream& out) {
  const Solved s = solve_for(ctx.u0, ctx.params, ctx.config, base_options(ctx.config));
  write_text(ctx.run_dir / "trajectory.csv", trajectory_csv(s.traj));
  json diag = diagnostics_json(s.traj);
  if (s.record) {
    diag["delta_convergence"] = {{"deltas", s.record->deltas},
                                 {"t0", s.record->t0},
                                 {"l1_at_t0", s.record->l1_at_t0},
                                 {"sup_at_t0", s.record->sup_at_t0},
                                 {"min_at_t0", s.record->min_at_t0},
                                 {"t0_halvings", s.record->t0_halvings}};
  }
  write_text(ctx.run_dir / "diagnostics.json", diag.dump(2) + "\n");

  std::vector<double> t;
  std::vector<double> mx;
  std::vector<double> ms;
  for (const auto& d : s.traj.steps) {
    t.push_back(d.t);
    mx.push_back(d.max);
    ms.push_back(d.mass);
  }
  write_text(ctx.run_dir / "curves" / "max.csv", two_column(t, mx, "max"));
  write_text(ctx.run_dir / "curves" / "mass.csv", two_column(t, ms, "mass"));
  const ProblemParams eff = ctx.params.with_M(std::max(ctx.params.M(), s.traj.initial().max()));
  write_text(ctx.run_dir / "curves" / "c0.csv", to_csv(c0_curve(eff).sample(ctx.params.T(), 101)));

  out << "solve: t_end=" << s.traj.final().time() << " snapshots=" << s.traj.snapshots.size()
      << " steps=" << s.traj.steps.size() - 1 << " breaches="
      << s.traj.count(EventKind::CorridorBreach) << " restarts=" << s.traj.count(EventKind::Restart)
      << " max=" << fmt(s.traj.final().max()) << " mass=" << fmt(mass(s.traj.final())) << "\n";
  return ExitCode::Ok;
}

EstimateReport dependence_report(const DependenceRecord& rec, const ProblemParams& params) {
  EstimateReport r;
  r.lemma = Lemma::Thm_dependence;
  r.tolerance = rec.tolerance;
  r.margin = std::numeric_limits<double>::infinity();
  for (const auto& pr : rec.pairs) {
    const double growth = std::exp(params.p() * std::pow(pr.xi, params.p() - 1.0) * rec.t_end);
    r.times.push_back(rec.t_end);
    r.observed.push_back(pr.max_l1);
    r.bound.push_back(2.0 * pr.initial_l1 * growth);
    r.margin = std::min({r.margin, pr.factor2_margin, pr.gronwall_margin});
    r.flags.push_back("binding bound: " + pr.binding);
  }
  if (rec.pairs.empty()) r.margin = 0.0;
  r.pass = rec.pass;
  r.scalars = {{"t_star", rec.t_star}, {"empirical_C", rec.empirical_C}};
  r.note = "max-over-time L1 distance against 2 d0 on [0, t*] and 2 d0 exp(p xi^(p-1) t) on [t*, T]";
  return r;
}

ExitCode cmd_verify(const Context& ctx, std::ostream& out) {
  const ProblemParams& params = ctx.params;
  const Solved main = solve_for(ctx.u0, params, ctx.config, base_options(ctx.config));

  SolveOptions pair_options = base_options(ctx.config);
  pair_options.stride = std::min(pair_options.stride, contraction_stride(params, ctx.config.stepping));
  const Field companion = perturbed(ctx.u0, 0.1 * ctx.u0.max());
  const Solved a = solve_for(ctx.u0, params, ctx.config, pair_options);
  const Solved b = solve_for(companion, params, ctx.config, pair_options);

  const std::vector<std::pair<Field, Field>> dep{{ctx.u0, perturbed(ctx.u0, 1e-2 * ctx.u0.max())}};
  const DependenceRecord rec = check_dependence(dep, params, ctx.config.stepping, 0.1 * params.T(),
                                                params.T(), ctx.config.schedule);

  const std::vector<EstimateReport> reports{
      check_linfty(main.traj, params),
      check_gradient(main.traj, params),
      check_mass(main.traj, params, main.traj.initial()),
      check_contraction(a.traj, b.traj, params),
      dependence_report(rec, params),
      check_energy(main.traj, params, main.traj.initial(), main.delta_finest),
  };

  json list = json::array();
  int passed = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& r : reports) {
    list.push_back(report_json(r));
    write_report_curves(ctx.run_dir, r);
    passed += r.pass ? 1 : 0;
    // The gradient bound is fitted to the data, so its margin is zero by construction.
    if (r.lemma != Lemma::L2_gradient) worst = std::min(worst, r.margin + r.tolerance);
  }
  write_text(ctx.run_dir / "trajectory.csv", trajectory_csv(main.traj));
  write_text(ctx.run_dir / "diagnostics.json", diagnostics_json(main.traj).dump(2) + "\n");
  const json report = {{"command", "verify"},
                       {"params", params_json(params)},
                       {"pass", passed == static_cast<int>(reports.size())},
                       {"reports", list}};
  write_text(ctx.run_dir / "report.json", report.dump(2) + "\n");
  out << "verify: " << passed << "/" << reports.size()
      << " estimates pass, min(margin + tolerance)=" << fmt(worst) << "\n";
  return passed == static_cast<int>(reports.size()) ? ExitCode::Ok : ExitCode::EstimateFailed;
}

ExitCode cmd_converge(const Context& ctx, std::ostream& out) {
  const ProblemParams& params = ctx.params;
  const bool rough = !(ctx.u0.min() > 0.0);
  json report = {{"command", "converge"}, {"params", params_json(params)}};
  bool ok = true;

  if (ctx.config.schedule.size() >= 2) {
    const DeltaStudy study = delta_convergence_study(ctx.u0, params, ctx.config.schedule,
                                                     ctx.config.stepping, 0.1 * params.T());
    report["delta"] = {{"deltas", study.record.deltas},
                       {"t0", study.record.t0},
                       {"l1_at_t0", study.record.l1_at_t0},
                       {"sup_at_t0", study.record.sup_at_t0},
                       {"min_at_t0", study.record.min_at_t0},
                       {"decreasing", study.decreasing}};
    ok = ok && study.decreasing;
  }

  const std::size_t n = ctx.config.n;
  const std::vector<std::size_t> levels{n, 2 * n - 1, 4 * n - 3};
  std::optional<double> delta;
  if (rough) {
    if (ctx.config.schedule.empty()) {
      throw Error(ErrorCode::InvalidArgument, "rough data need a schedule", "schedule");
    }
    delta = ctx.config.schedule.back();
  }
  const ConvergenceStudy grid = grid_convergence_study(ctx.config.initial, params, levels,
                                                       ctx.config.stepping, params.T(), delta);
  const double required = rough ? 0.8 : 1.5;
  const double order = grid.orders.empty() ? 0.0 : grid.orders.front();
  ok = ok && order >= required;
  report["grid"] = {{"n", grid.levels}, {"errors", grid.errors}, {"orders", grid.orders},
                    {"required_order", required}};
  report["pass"] = ok;
  write_text(ctx.run_dir / "report.json", report.dump(2) + "\n");
  std::vector<double> dx;
  for (double lv : grid.levels) dx.push_back(1.0 / (lv - 1.0));
  dx.pop_back();
  std::vector<std::pair<double, double>> rows;
  for (std::size_t i = 0; i < grid.errors.size(); ++i) rows.emplace_back(dx[i], grid.errors[i]);
  write_text(ctx.run_dir / "curves" / "grid_convergence.csv", to_csv(rows, "l1_gap"));
  out << "converge: observed order " << fmt(order) << " (required " << required << ")"
      << (ok ? "" : ", FAILED") << "\n";
  return ok ? ExitCode::Ok : ExitCode::EstimateFailed;
}

ExitCode cmd_depend(const Context& ctx, std::ostream& out) {
  const ProblemParams& params = ctx.params;
  std::vector<std::pair<Field, Field>> pairs;
  const std::vector<double> eps{1e-1, 1e-2, 1e-3};
  for (double e : eps) pairs.emplace_back(ctx.u0, perturbed(ctx.u0, e));
  const DependenceRecord rec = check_dependence(pairs, params, ctx.config.stepping,
                                                0.1 * params.T(), params.T(), ctx.config.schedule);
  json rows = json::array();
  for (std::size_t i = 0; i < rec.pairs.size(); ++i) {
    const auto& pr = rec.pairs[i];
    rows.push_back({{"epsilon", eps[i]},
                    {"initial_l1", pr.initial_l1},
                    {"max_l1", pr.max_l1},
                    {"ratio", pr.ratio},
                    {"xi", pr.xi},
                    {"factor2_margin", pr.factor2_margin},
                    {"gronwall_margin", pr.gronwall_margin},
                    {"binding", pr.binding},
                    {"pass", pr.pass}});
  }
  const json report = {{"command", "depend"},
                       {"params", params_json(params)},
                       {"t_star", rec.t_star},
                       {"empirical_C", rec.empirical_C},
                       {"tolerance", rec.tolerance},
                       {"pairs", rows},
                       {"pass", rec.pass}};
  write_text(ctx.run_dir / "report.json", report.dump(2) + "\n");
  out << "depend: " << rec.pairs.size() << " pairs, empirical C=" << fmt(rec.empirical_C)
      << (rec.pass ? "" : ", FAILED") << "\n";
  return rec.pass ? ExitCode::Ok : ExitCode::EstimateFailed;
}

struct CellResult {
  RawParams raw;
  std::vector<EstimateReport> reports;
  double balance_residual = 0.0;
  double balance_tolerance = 0.0;
  std::string error;
};

CellResult run_cell(const RawParams& raw, const RunConfig& config) {
  CellResult cell{raw, {}, 0.0, 0.0, {}};
  try {
    const ProblemParams params = ProblemParams::validate(raw);
    const Field u0 = make_initial(config.initial, Grid::uniform(config.n), params);
    SolveOptions options = base_options(config);
    const Solved s = solve_for(u0, params, config, options);
    cell.reports.push_back(check_linfty(s.traj, params));
    cell.reports.push_back(check_mass(s.traj, params, s.traj.initial()));
    cell.reports.push_back(check_energy(s.traj, params, s.traj.initial(), s.delta_finest));
    cell.reports.push_back(check_gradient(s.traj, params));
    const ProblemParams eff = params.with_M(std::max(params.M(), s.traj.initial().max()));
    cell.balance_tolerance = epsilon_grid(u0.grid(), config.stepping.dt_init, eff, 10.0);
    for (std::size_t i = 1; i < s.traj.steps.size(); ++i) {
      cell.balance_residual = std::max(cell.balance_residual, std::abs(s.traj.steps[i].mass_balance));
    }
  } catch (const Error& e) {
    cell.error = std::string(to_string(e.code())) + ": " + e.what();
  }
  return cell;
}

ExitCode cmd_sweep(const Context& ctx, const RunOptions& options, std::ostream& out) {
  const auto suite = standard_suite(ctx.config.params.M, ctx.config.params.T);
  std::vector<CellResult> results(suite.size());
  std::atomic<std::size_t> next{0};
  unsigned workers = options.workers != 0 ? options.workers : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(suite.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < suite.size(); i = next++) {
          results[i] = run_cell(suite[i], ctx.config);
        }
      });
    }
  }

  std::string csv = "m,p,alpha,linfty_margin,mass_margin,energy_margin,c_hat,balance_residual,"
                    "balance_tolerance,pass\n";
  json cells = json::array();
  std::size_t passed = 0;
  bool solver_fault = false;
  for (const auto& c : results) {
    bool ok = c.error.empty() && c.balance_residual <= c.balance_tolerance;
    json reps = json::array();
    for (const auto& r : c.reports) {
      ok = ok && r.pass;
      reps.push_back(report_json(r));
    }
    passed += ok ? 1 : 0;
    solver_fault = solver_fault || !c.error.empty();
    cells.push_back({{"m", c.raw.m},
                     {"p", c.raw.p},
                     {"alpha", c.raw.alpha},
                     {"pass", ok},
                     {"error", c.error},
                     {"balance_residual", c.balance_residual},
                     {"balance_tolerance", c.balance_tolerance},
                     {"reports", reps}});
    csv += format_double(c.raw.m) + "," + format_double(c.raw.p) + "," + format_double(c.raw.alpha);
    if (c.reports.size() == 4) {
      csv += "," + format_double(c.reports[0].margin) + "," + format_double(c.reports[1].margin) +
             "," + format_double(c.reports[2].margin) + "," +
             format_double(*c.reports[3].scalar("c_hat"));
    } else {
      csv += ",nan,nan,nan,nan";
    }
    csv += "," + format_double(c.balance_residual) + "," + format_double(c.balance_tolerance) +
           (ok ? ",1\n" : ",0\n");
  }
  write_text(ctx.run_dir / "curves" / "sweep.csv", csv);
  const json report = {{"command", "sweep"},
                       {"workers", workers},
                       {"cells", cells},
                       {"pass", passed == results.size()}};
  write_text(ctx.run_dir / "report.json", report.dump(2) + "\n");
  out << "sweep: " << passed << "/" << results.size() << " cells pass\n";
  if (solver_fault) return ExitCode::SolverFault;
  return passed == results.size() ? ExitCode::Ok : ExitCode::EstimateFailed;
}

}  // namespace

ExitCode run(Command command, const std::filesystem::path& config_path, const RunOptions& options,
             std::ostream& out, std::ostream& err) {
  try {
    RunConfig config = load_config(config_path);
    if (config.command && *config.command != command) {
      throw Error(ErrorCode::ConfigParse,
                  "config is for '" + std::string(to_string(*config.command)) + "', not '" +
                      std::string(to_string(command)) + "'",
                  "command");
    }
    config.command = command;
    if (const char* dir = std::getenv("SDL_OUTDIR"); dir != nullptr && *dir != '\0') {
      config.outputs.directory = dir;
    }
    config.stepping.validate();
    for (double d : config.schedule) {
      if (!(d > 0.0 && d < 1.0 / 12.0)) {
        throw Error(ErrorCode::DeltaOutOfRange,
                    "schedule entries must lie in (0, 1/12), got " + std::to_string(d), "schedule");
      }
    }
    const ProblemParams params = ProblemParams::validate(config.params);
    const Grid grid = Grid::uniform(config.n);
    Field u0 = make_initial(config.initial, grid, params);
    if (command == Command::Validate) {
      out << "validate: ok (m=" << params.m() << ", p=" << params.p() << ", alpha=" << params.alpha()
          << ", n=" << config.n << ")\n";
      return ExitCode::Ok;
    }

    const std::filesystem::path run_dir = config.outputs.directory / config.outputs.run_id;
    prepare_run_dir(run_dir, options.force);
    write_text(run_dir / "config.json", to_json(config));
    const Context ctx{config, params, grid, std::move(u0), run_dir};

    ExitCode code = ExitCode::Ok;
    switch (command) {
      case Command::Solve: code = cmd_solve(ctx, out); break;
      case Command::Verify: code = cmd_verify(ctx, out); break;
      case Command::Converge: code = cmd_converge(ctx, out); break;
      case Command::Depend: code = cmd_depend(ctx, out); break;
      case Command::Sweep: code = cmd_sweep(ctx, options, out); break;
      case Command::Validate: break;
    }
    if (config.outputs.emit_plots) write_plot_script(run_dir, curve_files(run_dir));
    return code;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]"
        << (e.field().empty() ? "" : " " + e.field()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error [Io]: " << e.what() << "\n";
    return ExitCode::ConfigError;
  }
}

}  // namespace sdl
