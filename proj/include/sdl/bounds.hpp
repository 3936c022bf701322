#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sdl/model.hpp"

namespace sdl {

/// Upper envelope [(1-p) t + M^{1-p}]^{1/(1-p)}: the solution of u' = u^p
/// started at M. Equals M at t = 0 and bounds sup u on [0, t].
double c0_bound(const ProblemParams& params, double t);

/// The same envelope started from an L^{1+q} norm of the initial data.
double lq_bound(const ProblemParams& params, double u0_norm, double t);

/// Exponent of the gradient estimate on u^{m/q}: q = (3m - 1) / (2(m - 1)).
double q_exponent(double m);

/// The two sign conditions that make the gradient estimate work; both are
/// strictly positive for -1 < m < 0.
struct GradientSigns {
  double coercivity;  ///< (1 - q)(q - 1 - q/m)
  double power;       ///< 2m/q + 1 - m
};
GradientSigns gradient_signs(double m);

/// Mass lower bound [(alpha + m - 2) t + int u0^{2-m-alpha}]^{1/(2-m-alpha)}.
/// Throws NonpositiveData if any sample of u0 is <= 0.
double mass_lower_bound(const ProblemParams& params, const Field& u0, double t);

/// mass_lower_bound evaluated at the horizon T.
double eta(const ProblemParams& params, const Field& u0);

/// Line bounding int u^{2-m-alpha} from above: int u0^{2-m-alpha} + (alpha + m - 2) t.
double energy_bound(const ProblemParams& params, double energy0, double t);

enum class BoundLabel { C0, Lq, MassLower, Eta };
std::string_view to_string(BoundLabel label) noexcept;

/// A closed-form bound as a function of time, with the data it depends on.
class BoundCurve {
 public:
  BoundCurve(BoundLabel label, ProblemParams params, std::function<double(double)> fn,
             std::map<std::string, double> data_constants = {})
      : label_(label), params_(params), fn_(std::move(fn)), data_(std::move(data_constants)) {}

  double operator()(double t) const { return fn_(t); }
  BoundLabel label() const noexcept { return label_; }
  const ProblemParams& params() const noexcept { return params_; }
  const std::map<std::string, double>& data_constants() const noexcept { return data_; }

  /// `count` evenly spaced samples on [0, t_end], endpoints included.
  std::vector<std::pair<double, double>> sample(double t_end, std::size_t count) const;

 private:
  BoundLabel label_;
  ProblemParams params_;
  std::function<double(double)> fn_;
  std::map<std::string, double> data_;
};

BoundCurve c0_curve(const ProblemParams& params);
BoundCurve lq_curve(const ProblemParams& params, double u0_norm);
BoundCurve mass_lower_curve(const ProblemParams& params, const Field& u0);
BoundCurve eta_curve(const ProblemParams& params, const Field& u0);

/// Two-column CSV (t,bound) with a header row.
std::string to_csv(const std::vector<std::pair<double, double>>& samples,
                   std::string_view value_name = "bound");

}  // namespace sdl
