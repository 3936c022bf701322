#pragma once

#include <array>
#include <span>

#include "sdl/model.hpp"

namespace sdl {

enum class TransitionKind {
  /// Cubic Hermite on [0, delta) in (r, value); cubic Hermite in
  /// (log r, log value) on (m_bar, 2 m_bar). Both are monotone and C^1.
  MonotoneHermite,
};

/// Corridor [delta, m_bar] on which the cutoff coefficients coincide with
/// the power laws r^{m-1}, r^{m-2}.
struct RegularizationSpec {
  double delta = 0.0;
  double m_bar = 0.0;
  TransitionKind transition = TransitionKind::MonotoneHermite;
  double mollifier_width = 0.0;  ///< radius of the kernel used for the data, 0 if none

  /// Throws InvalidCorridor unless 0 < delta < m_bar, both finite.
  void validate() const;
};

struct CutoffEval {
  double value;
  double slope;
};

/// Five-branch coefficient: constant below 0, monotone blend on [0, delta),
/// r^k on [delta, m_bar], monotone blend on (m_bar, 2 m_bar), constant above.
class CutoffFn {
 public:
  CutoffEval eval(double r) const noexcept;
  double operator()(double r) const noexcept { return eval(r).value; }
  double derivative(double r) const noexcept { return eval(r).slope; }

  std::array<double, 4> breakpoints() const noexcept {
    return {0.0, delta_, m_bar_, 2.0 * m_bar_};
  }
  double exponent() const noexcept { return k_; }
  double delta() const noexcept { return delta_; }
  double m_bar() const noexcept { return m_bar_; }

  /// Range on r >= 0: [0.5 (2 m_bar)^k, 2 delta^k].
  double floor_value() const noexcept { return top_const_; }
  double ceiling_value() const noexcept { return low_const_; }

 private:
  friend CutoffFn build_cutoff_h(const ProblemParams&, const RegularizationSpec&);
  friend CutoffFn build_cutoff_g(const ProblemParams&, const RegularizationSpec&);
  CutoffFn(double k, double delta, double m_bar, bool compact_below);

  double k_;
  double delta_;
  double m_bar_;
  bool compact_below_;  // multiply the r < 0 branch by f(r)
  double low_const_;    // 2 delta^k
  double low_end_;      // delta^k
  double low_end_slope_;
  double top_const_;    // 0.5 (2 m_bar)^k
  double log_m_bar_;
};

/// Coefficient of w_xx: r^{m-1} inside the corridor.
CutoffFn build_cutoff_h(const ProblemParams& params, const RegularizationSpec& spec);

/// Coefficient of (m-1) w_x^2: r^{m-2} inside the corridor, 2 delta^{m-2} f(r)
/// below zero.
CutoffFn build_cutoff_g(const ProblemParams& params, const RegularizationSpec& spec);

/// Smooth plateau f: 1 on |r| <= 1, 0 on |r| >= 2, C^infinity and monotone
/// in |r| between.
CutoffEval smooth_cutoff_f(double r) noexcept;

/// C^infinity bump exp(-1/(1-s^2)) on (-1,1), zero outside; not normalized.
double bump_kernel(double s) noexcept;

/// delta + delta^alpha x^2 (1-x) + (u0* conv J_delta)(x), where u0* is u0 set
/// to zero outside [2 delta, 1 - 2 delta]. Requires 0 < delta < 1/12.
Field mollify_initial(const Field& u0, const ProblemParams& params, double delta);

enum class CorridorEdge { Lower, Upper };

/// Exit diagnostics of a corridor breach.
struct CorridorBreach {
  CorridorEdge edge = CorridorEdge::Upper;
  double t_exit = 0.0;  ///< last time the solution was inside the corridor
  double c_hat = 0.0;   ///< empirical gradient constant observed up to t_exit
};

/// First corridor for data u0d: delta = min(u0d)/2, m_bar = 2 max(M, max u0d).
RegularizationSpec corridor_schedule(const ProblemParams& params, const Field& u0d);

/// Widened corridor after a breach:
/// m_bar = 2 max(2 M', C0(T)) with M' = max(M, max u0d), and
/// delta = min(floor, previous delta) / 2 with
/// floor = [eta^{m/q} + c_hat (1 + t_exit^{-1/2})]^{q/m}.
/// Throws ScheduleDiverged when delta drops below `delta_floor`.
RegularizationSpec corridor_schedule(const ProblemParams& params, const Field& u0d,
                                     const RegularizationSpec& previous,
                                     const CorridorBreach& breach, double delta_floor = 1e-10);

}  // namespace sdl
