#include "sdl/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdl/kernels.hpp"

namespace sdl {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::RangeViolation: return "RangeViolation";
    case ErrorCode::EmptyMass: return "EmptyMass";
    case ErrorCode::BoundViolation: return "BoundViolation";
    case ErrorCode::NonpositiveData: return "NonpositiveData";
    case ErrorCode::InvalidCorridor: return "InvalidCorridor";
    case ErrorCode::DeltaOutOfRange: return "DeltaOutOfRange";
    case ErrorCode::ScheduleDiverged: return "ScheduleDiverged";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::StabilityViolation: return "StabilityViolation";
    case ErrorCode::MassCollapse: return "MassCollapse";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::XiNonpositive: return "XiNonpositive";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

[[noreturn]] void range_violation(const std::string& field, const std::string& constraint,
                                  double value) {
  throw Error(ErrorCode::RangeViolation,
              "parameter " + field + " = " + std::to_string(value) +
                  " violates constraint " + constraint,
              field);
}

}  // namespace

ProblemParams ProblemParams::validate(const RawParams& raw) {
  // Negated comparisons so that NaN is rejected too.
  if (!(raw.m > -1.0 && raw.m < 0.0)) range_violation("m", "-1<m<0", raw.m);
  if (!(raw.p > 0.0 && raw.p < 1.0)) range_violation("p", "0<p<1", raw.p);
  if (!(raw.alpha > 2.0 - raw.m) || !std::isfinite(raw.alpha))
    range_violation("alpha", "alpha>2-m", raw.alpha);
  if (!(raw.M > 0.0) || !std::isfinite(raw.M)) range_violation("M", "M>0", raw.M);
  if (!(raw.T > 0.0) || !std::isfinite(raw.T)) range_violation("T", "T>0", raw.T);
  return ProblemParams(raw.m, raw.p, raw.alpha, raw.M, raw.T);
}

ProblemParams ProblemParams::with_T(double T) const {
  return validate({m_, p_, alpha_, M_, T});
}

ProblemParams ProblemParams::with_M(double M) const {
  return validate({m_, p_, alpha_, M, T_});
}

Grid Grid::uniform(std::size_t n) {
  if (n < 3) {
    throw Error(ErrorCode::InvalidArgument, "grid needs at least 3 nodes, got " + std::to_string(n));
  }
  return Grid(n);
}

std::vector<double> Grid::nodes() const {
  std::vector<double> xs(n_);
  for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
  return xs;
}

Field::Field(Grid grid, std::vector<double> values, double time)
    : grid_(grid), values_(std::move(values)), time_(time) {
  if (values_.size() != grid_.size()) {
    throw Error(ErrorCode::GridMismatch, "field has " + std::to_string(values_.size()) +
                                             " samples for a grid of " +
                                             std::to_string(grid_.size()) + " nodes");
  }
  if (!(time_ >= 0.0) || !std::isfinite(time_)) {
    throw Error(ErrorCode::InvalidArgument, "field time must be finite and nonnegative");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorCode::NonFiniteState, "non-finite sample at node " + std::to_string(i));
    }
    if (values_[i] < 0.0) {
      throw Error(ErrorCode::BoundViolation, "negative sample at node " + std::to_string(i));
    }
  }
}

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }

namespace {

constexpr double kEdgeTol = 1e-12;

double bump_profile(double x, const initial::Bump& b) {
  const double s = (x - b.center) / b.width;
  if (std::abs(s) >= 1.0) return b.base;
  return b.base + b.height * std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double plateau_profile(double x, const initial::Plateau& pl) {
  if (std::abs(x - pl.a) < kEdgeTol || std::abs(x - pl.b) < kEdgeTol) return 0.5 * pl.height;
  return (x > pl.a && x < pl.b) ? pl.height : 0.0;
}

double table_profile(double x, const std::vector<double>& s) {
  if (s.size() == 1) return s.front();
  const double pos = x * static_cast<double>(s.size() - 1);
  const auto k = std::min(static_cast<std::size_t>(pos), s.size() - 2);
  const double frac = pos - static_cast<double>(k);
  return s[k] + frac * (s[k + 1] - s[k]);
}

struct Sampler {
  double x;
  double operator()(const initial::Constant& c) const { return c.value; }
  double operator()(const initial::Bump& b) const { return bump_profile(x, b); }
  double operator()(const initial::Plateau& pl) const { return plateau_profile(x, pl); }
  double operator()(const initial::Table& t) const { return table_profile(x, t.samples); }
};

void check_spec(const InitialSpec& spec) {
  if (const auto* b = std::get_if<initial::Bump>(&spec.kind)) {
    if (!(b->width > 0.0) || b->height < 0.0 || b->base < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "bump needs width > 0 and nonnegative height/base");
    }
  } else if (const auto* pl = std::get_if<initial::Plateau>(&spec.kind)) {
    if (!(pl->a < pl->b) || pl->height < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "plateau needs a < b and height >= 0");
    }
  } else if (const auto* t = std::get_if<initial::Table>(&spec.kind)) {
    if (t->samples.empty()) throw Error(ErrorCode::InvalidArgument, "table has no samples");
  }
}

}  // namespace

Field make_initial(const InitialSpec& spec, const Grid& grid, const ProblemParams& params) {
  check_spec(spec);
  std::vector<double> values(grid.size());
  // Assumes the profile is flat at x = 1, so the cubic alone sets u_x(1).
  const double lift =
      spec.compatible ? std::pow(std::visit(Sampler{1.0}, spec.kind), params.alpha()) : 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.x(i);
    double v = std::visit(Sampler{x}, spec.kind) + lift * x * x * (1.0 - x);
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::BoundViolation,
                  "initial sample at x = " + std::to_string(grid.x(i)) + " is negative or non-finite");
    }
    if (v > params.M()) {
      if (!spec.clip) {
        throw Error(ErrorCode::BoundViolation, "initial sample " + std::to_string(v) +
                                                   " exceeds M = " + std::to_string(params.M()));
      }
      v = params.M();
    }
    values[i] = v;
  }
  Field f(grid, std::move(values), 0.0);
  if (!(mass(f) > 0.0)) throw Error(ErrorCode::EmptyMass, "initial data has zero mass");
  return f;
}

double mass(const Field& f) {
  return kernels::active().trapezoid(f.values(), f.grid().dx());
}

double power_integral(const Field& f, double exponent) {
  std::vector<double> powered(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) powered[i] = std::pow(f[i], exponent);
  return kernels::active().trapezoid(powered, f.grid().dx());
}

}  // namespace sdl
