#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sdl/model.hpp"
#include "sdl/solver.hpp"

namespace sdl {

enum class Lemma { L1_Linfty, L2_gradient, L3_mass, L4_contraction, Thm_dependence, Eq26_energy };
std::string_view to_string(Lemma lemma) noexcept;

/// One inequality checked along a trajectory.
/// pass <=> margin >= -tolerance; times, observed and bound have equal length.
struct EstimateReport {
  Lemma lemma = Lemma::L1_Linfty;
  std::vector<double> times;
  std::vector<double> observed;
  std::vector<double> bound;
  double margin = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::string note;
  std::vector<std::pair<std::string, double>> scalars;  ///< named extras such as c_hat
  std::vector<std::string> flags;                       ///< warnings that do not fail the check

  std::optional<double> scalar(std::string_view name) const;
};

/// c_tol (dx^2 + dt) max(1, C0(T)).
double epsilon_grid(const Grid& grid, double dt, const ProblemParams& params, double c_tol = 5.0);

/// Trapezoid of |f - g|. Throws GridMismatch.
double l1_distance(const Field& f, const Field& g);

/// max over interior nodes of |centered difference of f^{m/q}|. Throws NonpositiveData.
double transformed_gradient_sup(const Field& f, double m);

/// Running max of the snapshot maxima against C0(t), with M replaced by
/// max(M, max of the first snapshot).
EstimateReport check_linfty(const Trajectory& traj, const ProblemParams& params);

/// int u^{2-m-alpha} against int u0^{2-m-alpha} + (alpha + m - 2) t. Snapshots
/// with min u < 10 delta_finest are skipped; the tolerance is scaled by
/// max(1, |2-m-alpha| (min u)^{1-m-alpha}).
EstimateReport check_energy(const Trajectory& traj, const ProblemParams& params, const Field& u0,
                            double delta_finest = 0.0);

/// Mass against the lower bound curve started from u0 (observed >= bound).
EstimateReport check_mass(const Trajectory& traj, const ProblemParams& params, const Field& u0);

/// Empirical c_hat = max sup|(u^{m/q})_x| / (1 + t^{-1/2}) over snapshots with
/// t > 0, restricted to `sample_times` when given. Records c_hat for every
/// nested horizon and flags jumps above 10x between neighbours.
EstimateReport check_gradient(const Trajectory& traj, const ProblemParams& params,
                              std::span<const double> sample_times = {});

/// L1(u2 - u1) against L1(u20 - u10) + time trapezoid of L1(u2^p - u1^p) on
/// the shared snapshot times. Throws InvalidArgument when the shared times
/// are coarser than t_end / 64.
EstimateReport check_contraction(const Trajectory& a, const Trajectory& b,
                                 const ProblemParams& params);

struct DependencePair {
  DependencePair(Field a, Field b) : u10(std::move(a)), u20(std::move(b)) {}

  Field u10;
  Field u20;
  double initial_l1 = 0.0;
  double max_l1 = 0.0;
  double ratio = 0.0;            ///< max_l1 / initial_l1, 0 when both vanish
  double xi = 0.0;               ///< min of both solutions on [t*, t_end]
  double factor2_margin = 0.0;   ///< min over [0, t*] of 2 d0 - L1(t)
  double gronwall_margin = 0.0;  ///< min over [t*, t_end] of 2 d0 e^{p xi^{p-1} t} - L1(t)
  std::string binding;           ///< "factor2" if 2 d0 holds on the whole interval, else "gronwall"
  bool pass = true;
};

struct DependenceRecord {
  std::vector<DependencePair> pairs;
  double t_star = 0.0;
  double t_end = 0.0;
  double tolerance = 0.0;
  double empirical_C = 0.0;  ///< max ratio across pairs
  bool pass = true;
};

/// Solves every pair (mollified with `delta_schedule` when the data touch
/// zero) and checks the factor-2 bound on [0, t*] and the Gronwall bound on
/// [t*, t_end]. Throws XiNonpositive.
DependenceRecord check_dependence(std::span<const std::pair<Field, Field>> pairs,
                                  const ProblemParams& params, const StepConfig& config,
                                  double t_star, double t_end,
                                  std::span<const double> delta_schedule = {});

struct DeltaStudy {
  DeltaConvergenceRecord record;
  bool decreasing = true;  ///< consecutive L1 distances at t_probe strictly decrease
};

DeltaStudy delta_convergence_study(const Field& u0, const ProblemParams& params,
                                   std::span<const double> schedule, const StepConfig& config,
                                   double t_probe);

struct ConvergenceStudy {
  std::vector<double> levels;  ///< n or dt of each run
  std::vector<double> errors;  ///< L1 gap between consecutive levels on the coarsest nodes
  std::vector<double> orders;  ///< log(e_k / e_{k+1}) / log(refinement ratio)
};

/// Solves the same initial preset on nested grids n, 2n-1, 4n-3, ... at a
/// fixed dt. Data that touch zero are mollified with `mollify_delta` first.
/// Throws GridMismatch when the grids are not nested.
ConvergenceStudy grid_convergence_study(const InitialSpec& u0, const ProblemParams& params,
                                        std::span<const std::size_t> n_list,
                                        const StepConfig& config, double t_probe,
                                        std::optional<double> mollify_delta = std::nullopt,
                                        ModelTerms terms = {});

/// Same data on one grid with successively halved dt.
ConvergenceStudy time_convergence_study(const Field& u0, const ProblemParams& params,
                                        std::span<const double> dt_list, const StepConfig& config,
                                        double t_probe, ModelTerms terms = {});

}  // namespace sdl
