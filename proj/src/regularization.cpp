#include "sdl/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sdl/bounds.hpp"

namespace sdl {

void RegularizationSpec::validate() const {
  if (!(delta > 0.0) || !(delta < m_bar) || !std::isfinite(m_bar)) {
    throw Error(ErrorCode::InvalidCorridor, "corridor needs 0 < delta < m_bar, got delta = " +
                                                std::to_string(delta) + ", m_bar = " +
                                                std::to_string(m_bar));
  }
}

namespace {

struct Hermite {
  double value;
  double slope;  // d/dt on the unit interval
};

// Cubic Hermite on t in [0,1] with endpoint values y0, y1 and slopes d0, d1
// already scaled to the unit interval.
Hermite hermite(double t, double y0, double d0, double y1, double d1) noexcept {
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double value = (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * d0 +
                       (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * d1;
  const double slope = (6.0 * t2 - 6.0 * t) * y0 + (3.0 * t2 - 4.0 * t + 1.0) * d0 +
                       (-6.0 * t2 + 6.0 * t) * y1 + (3.0 * t2 - 2.0 * t) * d1;
  return {value, slope};
}

double psi(double s) noexcept { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

}  // namespace

CutoffFn::CutoffFn(double k, double delta, double m_bar, bool compact_below)
    : k_(k),
      delta_(delta),
      m_bar_(m_bar),
      compact_below_(compact_below),
      low_const_(2.0 * std::pow(delta, k)),
      low_end_(std::pow(delta, k)),
      low_end_slope_(k * std::pow(delta, k - 1.0)),
      top_const_(0.5 * std::pow(2.0 * m_bar, k)),
      log_m_bar_(std::log(m_bar)) {}

CutoffEval CutoffFn::eval(double r) const noexcept {
  if (r >= delta_ && r <= m_bar_) {
    const double v = std::pow(r, k_);
    return {v, k_ * v / r};
  }
  if (r < 0.0) {
    if (!compact_below_) return {low_const_, 0.0};
    const CutoffEval f = smooth_cutoff_f(r);
    return {low_const_ * f.value, low_const_ * f.slope};
  }
  if (r < delta_) {
    // Flat at r = 0, joins r^k with matching slope at delta.
    const Hermite hm = hermite(r / delta_, low_const_, 0.0, low_end_, low_end_slope_ * delta_);
    return {hm.value, hm.slope / delta_};
  }
  if (r >= 2.0 * m_bar_) return {top_const_, 0.0};
  // Log-log blend: log value runs from k log m_bar (slope k) to
  // log(top_const_) (slope 0) over log r in [log m_bar, log m_bar + ln 2].
  constexpr double ln2 = std::numbers::ln2;
  const double t = (std::log(r) - log_m_bar_) / ln2;
  const double y0 = k_ * log_m_bar_;
  const double y1 = std::log(top_const_);
  const Hermite hm = hermite(t, y0, k_ * ln2, y1, 0.0);
  const double v = std::exp(hm.value);
  return {v, v * (hm.slope / ln2) / r};
}

CutoffEval smooth_cutoff_f(double r) noexcept {
  const double a = std::abs(r);
  if (a <= 1.0) return {1.0, 0.0};
  if (a >= 2.0) return {0.0, 0.0};
  const double s_on = 2.0 - a;
  const double s_off = a - 1.0;
  const double p_on = psi(s_on);
  const double p_off = psi(s_off);
  const double denom = p_on + p_off;
  const double dp_on = p_on / (s_on * s_on);
  const double dp_off = p_off / (s_off * s_off);
  // d/da of p_on / (p_on + p_off), with d p_on/da = -dp_on, d p_off/da = dp_off.
  const double dda = (-dp_on * p_off - p_on * dp_off) / (denom * denom);
  return {p_on / denom, r < 0.0 ? -dda : dda};
}

double bump_kernel(double s) noexcept {
  const double a = 1.0 - s * s;
  return a > 0.0 ? std::exp(-1.0 / a) : 0.0;
}

CutoffFn build_cutoff_h(const ProblemParams& params, const RegularizationSpec& spec) {
  spec.validate();
  return CutoffFn(params.m() - 1.0, spec.delta, spec.m_bar, false);
}

CutoffFn build_cutoff_g(const ProblemParams& params, const RegularizationSpec& spec) {
  spec.validate();
  return CutoffFn(params.m() - 2.0, spec.delta, spec.m_bar, true);
}

Field mollify_initial(const Field& u0, const ProblemParams& params, double delta) {
  if (!(delta > 0.0 && delta < 1.0 / 12.0)) {
    throw Error(ErrorCode::DeltaOutOfRange,
                "mollification needs 0 < delta < 1/12, got " + std::to_string(delta));
  }
  const Grid& grid = u0.grid();
  const std::size_t n = grid.size();
  const double dx = grid.dx();
  constexpr double kEdgeTol = 1e-12;

  std::vector<double> truncated(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.x(i);
    if (x >= 2.0 * delta - kEdgeTol && x <= 1.0 - 2.0 * delta + kEdgeTol) truncated[i] = u0[i];
  }

  // Discrete kernel, normalized so that sum_k J_k = 1; the k = 0 weight is
  // always positive. The truncated data vanishes within 2 delta of either
  // end, so the kernel never sees the boundary.
  const auto reach = static_cast<std::ptrdiff_t>(std::ceil(delta / dx));
  std::vector<double> weights(static_cast<std::size_t>(2 * reach + 1));
  double total = 0.0;
  for (std::ptrdiff_t k = -reach; k <= reach; ++k) {
    const double w = bump_kernel(static_cast<double>(k) * dx / delta);
    weights[static_cast<std::size_t>(k + reach)] = w;
    total += w;
  }
  for (double& w : weights) w /= total;

  const double lift = std::pow(delta, params.alpha());
  std::vector<double> out(n);
  const auto sn = static_cast<std::ptrdiff_t>(n);
  for (std::ptrdiff_t i = 0; i < sn; ++i) {
    double conv = 0.0;
    for (std::ptrdiff_t k = -reach; k <= reach; ++k) {
      const std::ptrdiff_t j = i - k;
      if (j < 0 || j >= sn) continue;
      conv += weights[static_cast<std::size_t>(k + reach)] * truncated[static_cast<std::size_t>(j)];
    }
    const double x = grid.x(static_cast<std::size_t>(i));
    out[static_cast<std::size_t>(i)] = delta + lift * x * x * (1.0 - x) + conv;
  }
  return Field(grid, std::move(out), u0.time());
}

RegularizationSpec corridor_schedule(const ProblemParams& params, const Field& u0d) {
  RegularizationSpec spec;
  spec.delta = 0.5 * u0d.min();
  spec.m_bar = 2.0 * std::max(params.M(), u0d.max());
  spec.validate();
  return spec;
}

RegularizationSpec corridor_schedule(const ProblemParams& params, const Field& u0d,
                                     const RegularizationSpec& previous,
                                     const CorridorBreach& breach, double delta_floor) {
  const double data_max = std::max(params.M(), u0d.max());
  const ProblemParams effective = params.with_M(data_max);
  const double c0 = c0_bound(effective, params.T());

  const double m = params.m();
  const double q = q_exponent(m);
  const double t_exit = std::max(breach.t_exit, 1e-300);
  const double floor_power = std::pow(eta(params, u0d), m / q) +
                             breach.c_hat * (1.0 + 1.0 / std::sqrt(t_exit));
  const double floor = std::pow(floor_power, q / m);

  RegularizationSpec next = previous;
  next.m_bar = std::max(previous.m_bar, 2.0 * std::max(2.0 * data_max, c0));
  next.delta = 0.5 * std::min(floor, previous.delta);
  if (!(next.delta >= delta_floor)) {
    throw Error(ErrorCode::ScheduleDiverged,
                "corridor lower edge fell to " + std::to_string(next.delta) +
                    ", below the floor " + std::to_string(delta_floor));
  }
  next.validate();
  return next;
}

}  // namespace sdl
