#include <algorithm>
#include <cmath>
#include <limits>

#include "kernels_impl.hpp"

namespace sdl::kernels::detail {
namespace {

void stencil(std::span<const double> w, double inv_dx2, std::span<double> lap,
             std::span<double> sq) {
  const std::size_t n = w.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double left = w[i] - w[i - 1];
    const double right = w[i + 1] - w[i];
    lap[i] = (right - left) * inv_dx2;
    sq[i] = std::max(0.0, left * right) * inv_dx2;
  }
}

void combine(std::span<const double> h, std::span<const double> g,
             std::span<const double> src, std::span<const double> lap,
             std::span<const double> sq, double cm1, std::span<double> out) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = h[i] * lap[i] + cm1 * g[i] * sq[i] + src[i];
  }
}

void residual(std::span<const double> w, std::span<const double> w_old,
              std::span<const double> f_new, std::span<const double> f_old, double a,
              double b, std::span<double> r) {
  const std::size_t n = r.size();
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = (w[i] - w_old[i]) - (a * f_new[i] + b * f_old[i]);
  }
}

void jacobian(std::span<const double> w, std::span<const double> h,
              std::span<const double> dh, std::span<const double> g,
              std::span<const double> dg, std::span<const double> dsrc,
              std::span<const double> lap, std::span<const double> sq, double cm1,
              double inv_dx2, double s, std::span<double> sub, std::span<double> diag,
              std::span<double> sup) {
  const std::size_t n = h.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double left = w[i] - w[i - 1];
    const double right = w[i + 1] - w[i];
    const double active = left * right > 0.0 ? 1.0 : 0.0;
    const double diff = h[i] * inv_dx2;
    const double conv = cm1 * g[i] * inv_dx2 * active;
    sub[i] = -s * (diff - conv * right);
    sup[i] = -s * (diff + conv * left);
    diag[i] = 1.0 - s * (dh[i] * lap[i] - 2.0 * diff + cm1 * dg[i] * sq[i] +
                         conv * (right - left) + dsrc[i]);
  }
}

double trapezoid(std::span<const double> v, double dx) {
  if (v.size() < 2) return 0.0;
  double sum = 0.0;
  for (double x : v) sum += x;
  return dx * (sum - 0.5 * (v.front() + v.back()));
}

double l1_distance(std::span<const double> a, std::span<const double> b, double dx) {
  const std::size_t n = a.size();
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::abs(a[i] - b[i]);
  return dx * (sum - 0.5 * (std::abs(a[0] - b[0]) + std::abs(a[n - 1] - b[n - 1])));
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void min_max(std::span<const double> v, double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = -std::numeric_limits<double>::infinity();
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
}

double max_abs_centered_diff(std::span<const double> v, double inv_2dx) {
  double m = 0.0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    m = std::max(m, std::abs(v[i + 1] - v[i - 1]));
  }
  return m * inv_2dx;
}

}  // namespace

const KernelTable kScalarTable{
    Isa::Scalar, "scalar", &stencil,  &combine,      &residual,
    &jacobian,   &trapezoid, &l1_distance, &max_abs, &max_abs_diff,
    &min_max,    &max_abs_centered_diff,
};

}  // namespace sdl::kernels::detail
