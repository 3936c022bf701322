#include "sdl/bounds.hpp"

#include <cmath>

#include "sdl/io.hpp"

namespace sdl {

double c0_bound(const ProblemParams& params, double t) {
  return lq_bound(params, params.M(), t);
}

double lq_bound(const ProblemParams& params, double u0_norm, double t) {
  const double a = 1.0 - params.p();
  return std::pow(a * t + std::pow(u0_norm, a), 1.0 / a);
}

double q_exponent(double m) { return (3.0 * m - 1.0) / (2.0 * (m - 1.0)); }

GradientSigns gradient_signs(double m) {
  const double q = q_exponent(m);
  return {(1.0 - q) * (q - 1.0 - q / m), 2.0 * m / q + 1.0 - m};
}

namespace {

double energy_exponent(const ProblemParams& params) {
  return 2.0 - params.m() - params.alpha();
}

double positive_energy(const ProblemParams& params, const Field& u0) {
  for (std::size_t i = 0; i < u0.size(); ++i) {
    if (!(u0[i] > 0.0)) {
      throw Error(ErrorCode::NonpositiveData,
                  "mass lower bound needs strictly positive data; sample " + std::to_string(i) +
                      " is " + std::to_string(u0[i]));
    }
  }
  return power_integral(u0, energy_exponent(params));
}

double mass_lower_from_energy(const ProblemParams& params, double energy0, double t) {
  const double k = energy_exponent(params);
  return std::pow(energy_bound(params, energy0, t), 1.0 / k);
}

}  // namespace

double energy_bound(const ProblemParams& params, double energy0, double t) {
  return energy0 + (params.alpha() + params.m() - 2.0) * t;
}

double mass_lower_bound(const ProblemParams& params, const Field& u0, double t) {
  return mass_lower_from_energy(params, positive_energy(params, u0), t);
}

double eta(const ProblemParams& params, const Field& u0) {
  return mass_lower_bound(params, u0, params.T());
}

std::string_view to_string(BoundLabel label) noexcept {
  switch (label) {
    case BoundLabel::C0: return "C0";
    case BoundLabel::Lq: return "Lq";
    case BoundLabel::MassLower: return "MassLower";
    case BoundLabel::Eta: return "Eta";
  }
  return "Unknown";
}

std::vector<std::pair<double, double>> BoundCurve::sample(double t_end, std::size_t count) const {
  std::vector<std::pair<double, double>> out;
  if (count == 0) return out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : t_end * static_cast<double>(i) / static_cast<double>(count - 1);
    out.emplace_back(t, fn_(t));
  }
  return out;
}

BoundCurve c0_curve(const ProblemParams& params) {
  return BoundCurve(BoundLabel::C0, params, [params](double t) { return c0_bound(params, t); });
}

BoundCurve lq_curve(const ProblemParams& params, double u0_norm) {
  return BoundCurve(BoundLabel::Lq, params,
                    [params, u0_norm](double t) { return lq_bound(params, u0_norm, t); },
                    {{"u0_norm", u0_norm}});
}

BoundCurve mass_lower_curve(const ProblemParams& params, const Field& u0) {
  const double e0 = positive_energy(params, u0);
  return BoundCurve(BoundLabel::MassLower, params,
                    [params, e0](double t) { return mass_lower_from_energy(params, e0, t); },
                    {{"energy0", e0}});
}

BoundCurve eta_curve(const ProblemParams& params, const Field& u0) {
  const double value = eta(params, u0);
  return BoundCurve(BoundLabel::Eta, params, [value](double) { return value; },
                    {{"eta", value}});
}

std::string to_csv(const std::vector<std::pair<double, double>>& samples,
                   std::string_view value_name) {
  std::string out = "t,";
  out += value_name;
  out += '\n';
  for (const auto& [t, v] : samples) {
    out += format_double(t);
    out += ',';
    out += format_double(v);
    out += '\n';
  }
  return out;
}

}  // namespace sdl
