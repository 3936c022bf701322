#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdl/model.hpp"
#include "sdl/regularization.hpp"

namespace sdl {

struct StepConfig {
  double dt_init = 1e-4;
  double dt_min = 1e-9;
  double dt_max = 1e-2;
  double newton_tol = 1e-10;
  int newton_max_iter = 25;
  double theta = 1.0;  ///< 1 = backward Euler, 0.5 = Crank-Nicolson

  /// Throws InvalidArgument unless 0 < dt_min <= dt_init <= dt_max,
  /// newton_tol > 0, newton_max_iter >= 1 and theta in [0.5, 1].
  void validate() const;
};

/// Test hooks that switch off parts of the right-hand side.
struct ModelTerms {
  bool diffusion = true;
  bool reaction = true;
};

/// Scalars recorded after every accepted step (and once for the initial state).
struct StepDiagnostics {
  double t = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  double max = 0.0;
  double min = 0.0;
  double grad_sup = 0.0;         ///< max |(u^{m/q})_x| over interior nodes
  double boundary_flux = 0.0;    ///< u(1,t)^{m-1+alpha}
  double source_integral = 0.0;  ///< int u^p
  double energy = 0.0;           ///< int u^{2-m-alpha}
  double mass_balance = 0.0;     ///< dmass/dt + flux - source, theta-weighted
  int newton_iterations = 0;
};

enum class EventKind { CorridorBreach, ScheduleChange, Restart, StepRefined };
std::string_view to_string(EventKind kind) noexcept;

struct TrajectoryEvent {
  EventKind kind;
  double t;
  double delta;  ///< corridor in force after the event
  double m_bar;
  std::string detail;
};

struct Trajectory {
  std::vector<Field> snapshots;  ///< strictly increasing times, first is the initial field
  std::vector<StepDiagnostics> steps;
  std::vector<TrajectoryEvent> events;
  RegularizationSpec corridor;   ///< corridor in force at the end
  double dt_nominal = 0.0;
  double theta = 1.0;

  const Field& initial() const { return snapshots.front(); }
  const Field& final() const { return snapshots.back(); }
  std::size_t count(EventKind kind) const;
};

struct StepResult {
  Field field;
  int newton_iterations;
  double residual;  ///< max-norm Newton residual of the accepted iterate
};

/// One theta-weighted implicit step of
///   w_t = h(w) w_xx + (m-1) g(w) w_x^2 + w^p,  w_x(0) = 0,  w_x(1) = -|w|^{alpha-1} w
/// with second-order ghost nodes. At interior nodes w_x^2 is discretized as
/// max(0, L R) / dx^2 with L, R the backward and forward differences, which
/// keeps the Newton iteration positive at the foot of a steep front.
/// Throws NewtonDiverged or NonFiniteState.
StepResult step_regularized(const Field& state, double dt, const CutoffFn& h, const CutoffFn& g,
                            const ProblemParams& params, const StepConfig& config = {},
                            ModelTerms terms = {});

struct SolveOptions {
  std::size_t stride = 1;            ///< snapshot every `stride` nominal steps
  std::vector<double> snapshot_times;  ///< extra snapshots, snapped to the nearest nominal step
  ModelTerms terms;
  std::optional<double> mass_floor;  ///< throw MassCollapse if the mass drops below it
  int max_schedule_changes = 64;
};

/// Integrates from u0d.time() to t_end, keeping the solution inside the
/// corridor: a step that leaves it is discarded, the corridor is widened by
/// corridor_schedule and the step is redone. Throws ScheduleDiverged,
/// NewtonDiverged (once dt would fall below dt_min) or MassCollapse.
Trajectory solve_regularized(const Field& u0d, const ProblemParams& params,
                             RegularizationSpec spec, const StepConfig& config, double t_end,
                             const SolveOptions& options = {});

/// Cauchy check across the mollification sequence.
struct DeltaConvergenceRecord {
  std::vector<double> deltas;
  double t0 = 0.0;
  std::vector<double> times;                 ///< comparison times in (0, t0]
  std::vector<std::vector<double>> l1;       ///< l1[k][j]: |u_{delta_k} - u_{delta_{k+1}}| at times[j]
  std::vector<double> l1_at_t0;
  std::vector<double> sup_at_t0;
  std::vector<double> min_at_t0;             ///< one per delta
  int t0_halvings = 0;
};

struct SingularSolve {
  Trajectory trajectory;  ///< finest-delta solve on [0, t0] stitched to the restart on [t0, t_end]
  DeltaConvergenceRecord record;
};

struct SingularOptions {
  std::optional<double> t0;  ///< default min(0.1 T, t_end)
  int max_t0_halvings = 8;
  std::size_t comparison_points = 32;
};

/// Solution for merely nonnegative data: mollify with each delta of the
/// schedule, solve on [0, t0], record pairwise distances, restart from the
/// finest solution at t0 and integrate to t_end. Strictly positive data skip
/// the mollification and only split at t0.
SingularSolve solve_singular(const Field& u0, const ProblemParams& params,
                             std::span<const double> delta_schedule, const StepConfig& config,
                             double t_end, const SolveOptions& options = {},
                             const SingularOptions& singular = {});

/// Forward Euler on the same spatial discretization, written independently of
/// the implicit path. Throws StabilityViolation if tiny_dt > 0.4 dx^2 / max h.
Trajectory explicit_oracle(const Field& u0, const ProblemParams& params, const CutoffFn& h,
                           const CutoffFn& g, double tiny_dt, double t_end,
                           ModelTerms terms = {}, std::size_t stride = 0);

/// Exact solution of u' = u^p: [(1-p) t + u0^{1-p}]^{1/(1-p)}.
double reaction_exact(double u0, double p, double t);

/// `count` logarithmically spaced times in [t_min, t_max].
std::vector<double> log_times(double t_min, double t_max, std::size_t count);

}  // namespace sdl
