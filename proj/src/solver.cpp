#include "sdl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "sdl/bounds.hpp"
#include "sdl/kernels.hpp"

namespace sdl {

void StepConfig::validate() const {
  if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max)) {
    throw Error(ErrorCode::InvalidArgument, "step config needs 0 < dt_min <= dt_init <= dt_max");
  }
  if (!(newton_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "newton_tol must be positive");
  if (newton_max_iter < 1) throw Error(ErrorCode::InvalidArgument, "newton_max_iter must be >= 1");
  if (!(theta >= 0.5 && theta <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "theta must lie in [0.5, 1]");
  }
}

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::CorridorBreach: return "corridor_breach";
    case EventKind::ScheduleChange: return "schedule_change";
    case EventKind::Restart: return "restart";
    case EventKind::StepRefined: return "step_refined";
  }
  return "unknown";
}

std::size_t Trajectory::count(EventKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [kind](const auto& e) { return e.kind == kind; }));
}

double reaction_exact(double u0, double p, double t) {
  const double a = 1.0 - p;
  return std::pow(a * t + std::pow(u0, a), 1.0 / a);
}

std::vector<double> log_times(double t_min, double t_max, std::size_t count) {
  std::vector<double> out;
  if (count == 0) return out;
  if (count == 1) return {t_max};
  const double ratio = std::log(t_max / t_min);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(t_min * std::exp(ratio * static_cast<double>(i) / static_cast<double>(count - 1)));
  }
  out.back() = t_max;
  return out;
}

namespace {

// Outflow boundary term |w|^{alpha-1} w and its derivative.
struct Outflow {
  double value;
  double slope;
};

Outflow outflow(double w, double alpha) {
  const double a = std::abs(w);
  const double pw = std::pow(a, alpha - 1.0);
  return {pw * w, alpha * pw};
}

StepDiagnostics diagnose(std::span<const double> w, const Grid& grid, const ProblemParams& params,
                         double t) {
  const auto& k = kernels::active();
  const double dx = grid.dx();
  const double m = params.m();
  const double transform = m / q_exponent(m);
  const double energy_exp = 2.0 - m - params.alpha();

  StepDiagnostics d;
  d.t = t;
  k.min_max(w, d.min, d.max);
  d.mass = k.trapezoid(w, dx);
  std::vector<double> tmp(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) tmp[i] = std::pow(w[i], transform);
  d.grad_sup = k.max_abs_centered_diff(tmp, 0.5 / dx);
  for (std::size_t i = 0; i < w.size(); ++i) tmp[i] = std::pow(w[i], params.p());
  d.source_integral = k.trapezoid(tmp, dx);
  for (std::size_t i = 0; i < w.size(); ++i) tmp[i] = std::pow(w[i], energy_exp);
  d.energy = k.trapezoid(tmp, dx);
  d.boundary_flux = std::pow(w.back(), m - 1.0 + params.alpha());
  return d;
}

double mass_balance(const StepDiagnostics& prev, const StepDiagnostics& cur, double theta,
                    ModelTerms terms) {
  auto rate = [terms](const StepDiagnostics& d) {
    return (terms.diffusion ? d.boundary_flux : 0.0) - (terms.reaction ? d.source_integral : 0.0);
  };
  return (cur.mass - prev.mass) / (cur.t - prev.t) + theta * rate(cur) + (1.0 - theta) * rate(prev);
}

// Newton solver for one theta step; owns all scratch arrays so a trajectory
// allocates once.
class ImplicitStepper {
 public:
  ImplicitStepper(const ProblemParams& params, const StepConfig& config, ModelTerms terms,
                  const Grid& grid)
      : params_(params), config_(config), terms_(terms), n_(grid.size()), dx_(grid.dx()) {
    for (auto* v : {&h_, &dh_, &g_, &dg_, &src_, &dsrc_, &lap_, &sq_, &f_, &f_old_, &r_, &sub_,
                    &diag_, &sup_, &step_, &trial_, &scratch_}) {
      v->assign(n_, 0.0);
    }
  }

  void set_coefficients(const CutoffFn* h, const CutoffFn* g) {
    h_fn_ = h;
    g_fn_ = g;
  }

  // Returns the Newton iteration count; the accepted state is left in w_new.
  int step(std::span<const double> w_old, double dt, std::vector<double>& w_new,
           double& residual_norm) {
    const auto& k = kernels::active();
    const double theta = config_.theta;
    const double a = dt * theta;
    const double b = dt * (1.0 - theta);
    if (b != 0.0) {
      evaluate(w_old, f_old_);
    } else {
      std::fill(f_old_.begin(), f_old_.end(), 0.0);
    }

    w_new.assign(w_old.begin(), w_old.end());
    evaluate(w_new, f_);
    k.residual(w_new, w_old, f_, f_old_, a, b, r_);
    double norm = k.max_abs(r_);
    if (!std::isfinite(norm)) throw Error(ErrorCode::NonFiniteState, "non-finite residual");

    int iterations = 0;
    while (norm > config_.newton_tol) {
      if (iterations == config_.newton_max_iter) {
        throw Error(ErrorCode::NewtonDiverged, "Newton did not converge in " +
                                                   std::to_string(iterations) +
                                                   " iterations (residual " +
                                                   std::to_string(norm) + ")");
      }
      ++iterations;
      assemble_jacobian(w_new, a);
      for (std::size_t i = 0; i < n_; ++i) r_[i] = -r_[i];
      solve_tridiagonal();

      double lambda = 1.0;
      bool accepted = false;
      for (int halving = 0; halving <= 8; ++halving, lambda *= 0.5) {
        bool positive = true;
        for (std::size_t i = 0; i < n_; ++i) {
          trial_[i] = w_new[i] + lambda * step_[i];
          if (!(trial_[i] > 0.0) || !std::isfinite(trial_[i])) positive = false;
        }
        if (!positive) continue;
        evaluate(trial_, f_);
        k.residual(trial_, w_old, f_, f_old_, a, b, r_);
        const double trial_norm = k.max_abs(r_);
        if (trial_norm < norm) {
          norm = trial_norm;
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        throw Error(ErrorCode::NewtonDiverged,
                    "damped Newton step failed to reduce the residual " + std::to_string(norm));
      }
      w_new.swap(trial_);
    }
    residual_norm = norm;
    return iterations;
  }

 private:
  // Fills the coefficient arrays at w and writes F(w) into f.
  void evaluate(std::span<const double> w, std::span<double> f) {
    const double m = params_.m();
    const double p = params_.p();
    if (terms_.diffusion) {
      const double lo = h_fn_->delta();
      const double hi = h_fn_->m_bar();
      for (std::size_t i = 0; i < n_; ++i) {
        const double r = w[i];
        if (r >= lo && r <= hi) {
          const double hv = std::pow(r, m - 1.0);
          const double inv = 1.0 / r;
          h_[i] = hv;
          dh_[i] = (m - 1.0) * hv * inv;
          g_[i] = hv * inv;
          dg_[i] = (m - 2.0) * g_[i] * inv;
        } else {
          const CutoffEval he = h_fn_->eval(r);
          const CutoffEval ge = g_fn_->eval(r);
          h_[i] = he.value;
          dh_[i] = he.slope;
          g_[i] = ge.value;
          dg_[i] = ge.slope;
        }
      }
    }
    if (terms_.reaction) {
      for (std::size_t i = 0; i < n_; ++i) {
        src_[i] = std::pow(w[i], p);
        dsrc_[i] = p * src_[i] / w[i];
      }
    }

    const double inv_dx2 = 1.0 / (dx_ * dx_);
    const auto& k = kernels::active();
    k.stencil(w, inv_dx2, lap_, sq_);
    // Ghost nodes: w_{-1} = w_1 and w_n = w_{n-2} - 2 dx |w_{n-1}|^{alpha-1} w_{n-1}.
    // Both boundary slopes are known exactly, so sq uses them directly.
    lap_[0] = 2.0 * (w[1] - w[0]) * inv_dx2;
    sq_[0] = 0.0;
    const std::size_t e = n_ - 1;
    const Outflow out = outflow(w[e], params_.alpha());
    lap_[e] = (2.0 * w[e - 1] - 2.0 * w[e] - 2.0 * dx_ * out.value) * inv_dx2;
    sq_[e] = out.value * out.value;
    outflow_b_ = out.value;
    outflow_slope_ = out.slope;
    k.combine(h_, g_, src_, lap_, sq_, m - 1.0, f);
  }

  void assemble_jacobian(std::span<const double> w, double s) {
    const double cm1 = params_.m() - 1.0;
    const double inv_dx2 = 1.0 / (dx_ * dx_);
    kernels::active().jacobian(w, h_, dh_, g_, dg_, dsrc_, lap_, sq_, cm1, inv_dx2, s, sub_,
                               diag_, sup_);
    sub_[0] = 0.0;
    sup_[0] = -s * (2.0 * h_[0] * inv_dx2);
    diag_[0] = 1.0 - s * (dh_[0] * lap_[0] - 2.0 * h_[0] * inv_dx2 + dsrc_[0]);

    const std::size_t e = n_ - 1;
    const double b = outflow_b_;
    const double bp = outflow_slope_;
    sub_[e] = -s * (2.0 * h_[e] * inv_dx2);
    sup_[e] = 0.0;
    const double dlap = (-2.0 - 2.0 * dx_ * bp) * inv_dx2;
    diag_[e] = 1.0 - s * (dh_[e] * lap_[e] + h_[e] * dlap +
                          cm1 * (dg_[e] * sq_[e] + g_[e] * 2.0 * b * bp) + dsrc_[e]);
  }

  // Thomas algorithm on (sub_, diag_, sup_) with right-hand side r_; result in step_.
  void solve_tridiagonal() {
    auto& c = scratch_;
    double denom = diag_[0];
    c[0] = sup_[0] / denom;
    step_[0] = r_[0] / denom;
    for (std::size_t i = 1; i < n_; ++i) {
      denom = diag_[i] - sub_[i] * c[i - 1];
      c[i] = sup_[i] / denom;
      step_[i] = (r_[i] - sub_[i] * step_[i - 1]) / denom;
    }
    for (std::size_t i = n_ - 1; i-- > 0;) step_[i] -= c[i] * step_[i + 1];
  }

  ProblemParams params_;
  StepConfig config_;
  ModelTerms terms_;
  std::size_t n_;
  double dx_;
  const CutoffFn* h_fn_ = nullptr;
  const CutoffFn* g_fn_ = nullptr;
  double outflow_b_ = 0.0;
  double outflow_slope_ = 0.0;
  std::vector<double> h_, dh_, g_, dg_, src_, dsrc_, lap_, sq_, f_, f_old_, r_, sub_, diag_,
      sup_, step_, trial_, scratch_;
};

double empirical_constant(const std::vector<StepDiagnostics>& steps) {
  double c = 0.0;
  for (const auto& d : steps) {
    if (d.t > 0.0) c = std::max(c, d.grad_sup / (1.0 + 1.0 / std::sqrt(d.t)));
  }
  return c;
}

std::string describe(double v) { return std::to_string(v); }

}  // namespace

StepResult step_regularized(const Field& state, double dt, const CutoffFn& h, const CutoffFn& g,
                            const ProblemParams& params, const StepConfig& config,
                            ModelTerms terms) {
  config.validate();
  if (!(state.min() > 0.0)) {
    throw Error(ErrorCode::NonpositiveData, "implicit step needs a strictly positive state");
  }
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  ImplicitStepper stepper(params, config, terms, state.grid());
  stepper.set_coefficients(&h, &g);
  std::vector<double> next;
  double residual = 0.0;
  const int iterations = stepper.step(state.values(), dt, next, residual);
  return {Field(state.grid(), std::move(next), state.time() + dt), iterations, residual};
}

Trajectory solve_regularized(const Field& u0d, const ProblemParams& params,
                             RegularizationSpec spec, const StepConfig& config, double t_end,
                             const SolveOptions& options) {
  config.validate();
  spec.validate();
  const double t_start = u0d.time();
  if (!(t_end >= t_start)) throw Error(ErrorCode::InvalidArgument, "t_end precedes the initial time");
  if (u0d.min() < spec.delta || u0d.max() > spec.m_bar) {
    throw Error(ErrorCode::InvalidCorridor, "initial data leave the corridor [" +
                                                describe(spec.delta) + ", " + describe(spec.m_bar) + "]");
  }

  const Grid grid = u0d.grid();
  const double dt = config.dt_init;
  const double theta = config.theta;
  const ModelTerms terms = options.terms;
  const std::size_t stride = std::max<std::size_t>(options.stride, 1);

  CutoffFn h = build_cutoff_h(params, spec);
  CutoffFn g = build_cutoff_g(params, spec);
  ImplicitStepper stepper(params, config, terms, grid);
  stepper.set_coefficients(&h, &g);

  Trajectory traj;
  traj.dt_nominal = dt;
  traj.theta = theta;
  traj.snapshots.push_back(u0d);
  traj.steps.push_back(diagnose(u0d.values(), grid, params, t_start));

  const double span = t_end - t_start;
  const std::size_t n_steps =
      span > 0.0 ? std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / dt - 1e-9)))
                 : 0;
  std::set<std::size_t> extra;
  for (double ts : options.snapshot_times) {
    if (ts <= t_start || ts > t_end) continue;
    const auto k = static_cast<std::size_t>(std::llround((ts - t_start) / dt));
    extra.insert(std::clamp<std::size_t>(k, 1, n_steps));
  }

  std::vector<double> w(u0d.values().begin(), u0d.values().end());
  std::vector<double> w_next;
  int schedule_changes = 0;

  auto widen = [&](CorridorEdge edge, double t_exit, double h_step, double lo, double hi) {
    CorridorBreach breach;
    breach.edge = edge;
    breach.t_exit = std::max(t_exit, h_step);
    breach.c_hat = empirical_constant(traj.steps);
    traj.events.push_back({EventKind::CorridorBreach, t_exit, spec.delta, spec.m_bar,
                           edge == CorridorEdge::Lower ? "lower edge, min w = " + describe(lo)
                                                       : "upper edge, max w = " + describe(hi)});
    RegularizationSpec next = corridor_schedule(params, u0d, spec, breach);
    if (edge == CorridorEdge::Upper && !(next.m_bar > spec.m_bar)) {
      throw Error(ErrorCode::ScheduleDiverged,
                  "upper corridor edge cannot widen past " + describe(spec.m_bar));
    }
    if (++schedule_changes > options.max_schedule_changes) {
      throw Error(ErrorCode::ScheduleDiverged, "too many corridor changes");
    }
    spec = next;
    h = build_cutoff_h(params, spec);
    g = build_cutoff_g(params, spec);
    traj.events.push_back({EventKind::ScheduleChange, t_exit, spec.delta, spec.m_bar,
                           "c_hat = " + describe(breach.c_hat)});
  };

  auto advance = [&](auto& self, double a, double b) -> void {
    const double h_step = b - a;
    int iterations = 0;
    for (;;) {
      double residual = 0.0;
      try {
        iterations = stepper.step(w, h_step, w_next, residual);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NewtonDiverged) throw;
        if (0.5 * h_step < config.dt_min) {
          throw Error(ErrorCode::NewtonDiverged,
                      std::string(e.what()) + " at t = " + describe(a) + " with dt at its minimum");
        }
        traj.events.push_back({EventKind::StepRefined, a, spec.delta, spec.m_bar,
                               "dt halved to " + describe(0.5 * h_step)});
        const double mid = a + 0.5 * h_step;
        self(self, a, mid);
        self(self, mid, b);
        return;
      }
      double lo = 0.0;
      double hi = 0.0;
      kernels::active().min_max(w_next, lo, hi);
      if (lo < spec.delta) {
        widen(CorridorEdge::Lower, a, h_step, lo, hi);
      } else if (hi > spec.m_bar) {
        widen(CorridorEdge::Upper, a, h_step, lo, hi);
      } else {
        break;
      }
    }
    w.swap(w_next);
    StepDiagnostics d = diagnose(w, grid, params, b);
    d.dt = h_step;
    d.newton_iterations = iterations;
    d.mass_balance = mass_balance(traj.steps.back(), d, theta, terms);
    traj.steps.push_back(d);
    if (options.mass_floor && d.mass < *options.mass_floor) {
      throw Error(ErrorCode::MassCollapse, "mass " + describe(d.mass) + " fell below " +
                                               describe(*options.mass_floor) + " at t = " +
                                               describe(b));
    }
  };

  double t = t_start;
  for (std::size_t k = 1; k <= n_steps; ++k) {
    const double t_next = k == n_steps ? t_end : t_start + static_cast<double>(k) * dt;
    advance(advance, t, t_next);
    t = t_next;
    if (k % stride == 0 || k == n_steps || extra.count(k) != 0) {
      traj.snapshots.emplace_back(grid, w, t);
    }
  }
  traj.corridor = spec;
  return traj;
}

namespace {

double snap_to_step(double t, double dt) {
  return static_cast<double>(std::max<long long>(1, std::llround(t / dt))) * dt;
}

const Field* snapshot_at(const Trajectory& traj, double t) {
  for (const auto& f : traj.snapshots) {
    if (f.time() == t) return &f;
  }
  return nullptr;
}

void append_restart(Trajectory& head, Trajectory tail, double t0) {
  head.events.push_back({EventKind::Restart, t0, tail.corridor.delta, tail.corridor.m_bar,
                         "restart from the solution at t0"});
  for (auto& e : tail.events) head.events.push_back(std::move(e));
  for (std::size_t i = 1; i < tail.snapshots.size(); ++i) head.snapshots.push_back(tail.snapshots[i]);
  for (std::size_t i = 1; i < tail.steps.size(); ++i) head.steps.push_back(tail.steps[i]);
  head.corridor = tail.corridor;
}

}  // namespace

SingularSolve solve_singular(const Field& u0, const ProblemParams& params,
                             std::span<const double> delta_schedule, const StepConfig& config,
                             double t_end, const SolveOptions& options,
                             const SingularOptions& singular) {
  config.validate();
  const double dt = config.dt_init;
  const double ubar = mass(u0);
  if (!(ubar > 0.0)) throw Error(ErrorCode::EmptyMass, "initial data has zero mass");
  const bool positive = u0.min() > 0.0;
  if (!positive && delta_schedule.empty()) {
    throw Error(ErrorCode::InvalidArgument, "data with zeros need a nonempty delta schedule");
  }

  double t0 = std::min(singular.t0.value_or(0.1 * params.T()), t_end);
  t0 = std::min(snap_to_step(t0, dt), t_end);

  SingularSolve result;
  result.record.deltas.assign(delta_schedule.begin(), delta_schedule.end());
  if (positive) result.record.deltas.clear();

  std::vector<Trajectory> runs;
  for (;;) {
    runs.clear();
    SolveOptions head = options;
    head.mass_floor = 0.5 * ubar;
    std::vector<double> comparison = log_times(std::min(dt, t0), t0, singular.comparison_points);
    for (double& ts : comparison) ts = std::min(snap_to_step(ts, dt), t0);
    head.snapshot_times.insert(head.snapshot_times.end(), comparison.begin(), comparison.end());
    try {
      if (positive) {
        runs.push_back(solve_regularized(u0, params, corridor_schedule(params, u0), config, t0, head));
      } else {
        for (double delta : delta_schedule) {
          const Field u0d = mollify_initial(u0, params, delta);
          RegularizationSpec spec = corridor_schedule(params, u0d);
          spec.mollifier_width = delta;
          runs.push_back(solve_regularized(u0d, params, spec, config, t0, head));
        }
      }
      result.record.times.clear();
      for (double ts : comparison) {
        if (result.record.times.empty() || ts > result.record.times.back()) {
          result.record.times.push_back(ts);
        }
      }
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::MassCollapse || result.record.t0_halvings >= singular.max_t0_halvings) {
        throw;
      }
      ++result.record.t0_halvings;
      t0 = snap_to_step(0.5 * t0, dt);
    }
  }
  result.record.t0 = t0;

  const auto& k = kernels::active();
  for (const auto& run : runs) result.record.min_at_t0.push_back(run.final().min());
  for (std::size_t r = 0; r + 1 < runs.size(); ++r) {
    std::vector<double> row;
    for (double ts : result.record.times) {
      const Field* a = snapshot_at(runs[r], ts);
      const Field* b = snapshot_at(runs[r + 1], ts);
      row.push_back(a != nullptr && b != nullptr
                        ? k.l1_distance(a->values(), b->values(), u0.grid().dx())
                        : std::nan(""));
    }
    result.record.l1.push_back(std::move(row));
    const Field& fa = runs[r].final();
    const Field& fb = runs[r + 1].final();
    result.record.l1_at_t0.push_back(k.l1_distance(fa.values(), fb.values(), u0.grid().dx()));
    result.record.sup_at_t0.push_back(k.max_abs_diff(fa.values(), fb.values()));
  }

  Trajectory stitched = std::move(runs.back());
  if (t_end > t0) {
    const Field u_star = stitched.final();
    SolveOptions tail = options;
    tail.mass_floor.reset();
    append_restart(stitched,
                   solve_regularized(u_star, params, corridor_schedule(params, u_star), config,
                                     t_end, tail),
                   t0);
  }
  result.trajectory = std::move(stitched);
  return result;
}

Trajectory explicit_oracle(const Field& u0, const ProblemParams& params, const CutoffFn& h,
                           const CutoffFn& g, double tiny_dt, double t_end, ModelTerms terms,
                           std::size_t stride) {
  if (!(tiny_dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "tiny_dt must be positive");
  const Grid grid = u0.grid();
  const std::size_t n = grid.size();
  const double dx = grid.dx();
  const double m = params.m();
  const double p = params.p();
  const double alpha = params.alpha();

  std::vector<double> w(u0.values().begin(), u0.values().end());
  std::vector<double> f(n);
  Trajectory traj;
  traj.dt_nominal = tiny_dt;
  traj.theta = 0.0;
  traj.snapshots.push_back(u0);
  traj.steps.push_back(diagnose(w, grid, params, u0.time()));

  const double span = t_end - u0.time();
  const auto n_steps = static_cast<std::size_t>(std::max(0.0, std::ceil(span / tiny_dt - 1e-9)));
  double t = u0.time();
  for (std::size_t step = 1; step <= n_steps; ++step) {
    const double t_next = step == n_steps ? t_end : u0.time() + static_cast<double>(step) * tiny_dt;
    const double dt = t_next - t;
    double h_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double left = i == 0 ? w[1] : w[i - 1];
      const double right =
          i + 1 == n ? w[n - 2] - 2.0 * dx * std::pow(std::abs(w[i]), alpha - 1.0) * w[i] : w[i + 1];
      double rhs = 0.0;
      if (terms.diffusion) {
        const double hv = h(w[i]);
        h_max = std::max(h_max, hv);
        const double wxx = (right - 2.0 * w[i] + left) / (dx * dx);
        const double wx = (right - left) / (2.0 * dx);
        const double sq = i == 0 || i + 1 == n
                              ? wx * wx
                              : std::max(0.0, (w[i] - left) * (right - w[i])) / (dx * dx);
        rhs += hv * wxx + (m - 1.0) * g(w[i]) * sq;
      }
      if (terms.reaction) rhs += std::pow(w[i], p);
      f[i] = rhs;
    }
    if (terms.diffusion && dt > 0.4 * dx * dx / h_max) {
      throw Error(ErrorCode::StabilityViolation,
                  "explicit step " + describe(dt) + " exceeds 0.4 dx^2 / max h = " +
                      describe(0.4 * dx * dx / h_max));
    }
    for (std::size_t i = 0; i < n; ++i) {
      w[i] += dt * f[i];
      if (!std::isfinite(w[i])) throw Error(ErrorCode::NonFiniteState, "explicit oracle blew up");
    }
    t = t_next;
    if ((stride != 0 && step % stride == 0) || step == n_steps) {
      StepDiagnostics d = diagnose(w, grid, params, t);
      d.dt = dt;
      d.mass_balance = mass_balance(traj.steps.back(), d, 0.0, terms);
      traj.steps.push_back(d);
      traj.snapshots.emplace_back(grid, w, t);
    }
  }
  return traj;
}

}  // namespace sdl
