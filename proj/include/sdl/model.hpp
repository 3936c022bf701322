#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sdl/error.hpp"

namespace sdl {

/// Unvalidated parameter record as read from a config file.
struct RawParams {
  double m = 0.0;
  double p = 0.0;
  double alpha = 0.0;
  double M = 0.0;
  double T = 0.0;
};

/// Exponents and bounds of u_t = (u^{m-1} u_x)_x + u^p on (0,1) with
/// u_x(0) = 0 and u_x(1) = -u^alpha.
///
/// Only obtainable through validate(), so every instance satisfies
/// -1 < m < 0, 0 < p < 1, alpha > 2 - m, M > 0, T > 0.
class ProblemParams {
 public:
  /// Checks the inequalities in the order m, p, alpha, M, T and throws
  /// Error{RangeViolation} naming the first one that fails.
  static ProblemParams validate(const RawParams& raw);

  double m() const noexcept { return m_; }
  double p() const noexcept { return p_; }
  double alpha() const noexcept { return alpha_; }
  double M() const noexcept { return M_; }
  double T() const noexcept { return T_; }

  /// Same exponents with a different horizon or data bound.
  ProblemParams with_T(double T) const;
  ProblemParams with_M(double M) const;

  RawParams raw() const noexcept { return {m_, p_, alpha_, M_, T_}; }

 private:
  ProblemParams(double m, double p, double alpha, double M, double T)
      : m_(m), p_(p), alpha_(alpha), M_(M), T_(T) {}

  double m_, p_, alpha_, M_, T_;
};

/// Uniform grid on [0,1] with n nodes, x_0 = 0 and x_{n-1} = 1.
class Grid {
 public:
  static Grid uniform(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double dx() const noexcept { return dx_; }
  double x(std::size_t i) const noexcept {
    return static_cast<double>(i) / static_cast<double>(n_ - 1);
  }
  std::vector<double> nodes() const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  explicit Grid(std::size_t n) : n_(n), dx_(1.0 / static_cast<double>(n - 1)) {}

  std::size_t n_;
  double dx_;
};

/// Nonnegative finite samples of a solution at one instant.
class Field {
 public:
  Field(Grid grid, std::vector<double> values, double time = 0.0);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }
  double time() const noexcept { return time_; }

  double min() const;
  double max() const;

  Field at_time(double t) const { return Field(grid_, values_, t); }

 private:
  Grid grid_;
  std::vector<double> values_;
  double time_;
};

namespace initial {

struct Constant {
  double value = 1.0;
};

/// base + height * exp(1 - 1/(1 - s^2)), s = (x - center) / width.
struct Bump {
  double center = 0.5;
  double width = 0.25;
  double height = 1.0;
  double base = 0.0;
};

/// height on [a, b], zero elsewhere; a node that lands exactly on an edge
/// takes height/2 so the trapezoid rule integrates the indicator exactly.
struct Plateau {
  double a = 0.25;
  double b = 0.75;
  double height = 1.0;
};

/// Equally spaced samples over [0,1], linearly interpolated.
struct Table {
  std::vector<double> samples;
};

}  // namespace initial

struct InitialSpec {
  std::variant<initial::Constant, initial::Bump, initial::Plateau, initial::Table> kind;
  bool clip = false;
  /// Add u(1)^alpha x^2 (1-x) so that u_x(1) = -u(1)^alpha holds at t = 0
  /// for profiles that are flat at x = 1.
  bool compatible = false;
};

/// Samples the preset on `grid` at t = 0. Throws EmptyMass when the sampled
/// mass is zero and BoundViolation when a sample exceeds M with clipping off.
Field make_initial(const InitialSpec& spec, const Grid& grid, const ProblemParams& params);

/// Trapezoid approximation of the integral over [0,1].
double mass(const Field& f);

/// Trapezoid of f^exponent; f must be strictly positive for negative exponents.
double power_integral(const Field& f, double exponent);

}  // namespace sdl
