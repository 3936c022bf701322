// AVX2 variants. This translation unit is the only one compiled with -mavx2;
// nothing here may be called unless the CPU reports AVX2.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "kernels_impl.hpp"

namespace sdl::kernels::detail {
namespace {

inline __m256d abs_pd(__m256d x) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, sh));
}

inline double hmin(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_min_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_min_sd(lo, sh));
}

void stencil(std::span<const double> w, double inv_dx2, std::span<double> lap,
             std::span<double> sq) {
  const std::size_t n = w.size();
  if (n < 3) return;
  const double* wp = w.data();
  const __m256d zero = _mm256_setzero_pd();
  const __m256d c2 = _mm256_set1_pd(inv_dx2);
  std::size_t i = 1;
  for (; i + 4 < n; i += 4) {
    const __m256d mid = _mm256_loadu_pd(wp + i);
    const __m256d left = _mm256_sub_pd(mid, _mm256_loadu_pd(wp + i - 1));
    const __m256d right = _mm256_sub_pd(_mm256_loadu_pd(wp + i + 1), mid);
    _mm256_storeu_pd(lap.data() + i, _mm256_mul_pd(_mm256_sub_pd(right, left), c2));
    // max(0, x) with zero as the first operand matches std::max(0.0, x).
    _mm256_storeu_pd(sq.data() + i,
                     _mm256_mul_pd(_mm256_max_pd(_mm256_mul_pd(left, right), zero), c2));
  }
  for (; i + 1 < n; ++i) {
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
  const __m256d c = _mm256_set1_pd(cm1);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d diffusion = _mm256_mul_pd(_mm256_loadu_pd(h.data() + i),
                                            _mm256_loadu_pd(lap.data() + i));
    const __m256d convection = _mm256_mul_pd(_mm256_mul_pd(c, _mm256_loadu_pd(g.data() + i)),
                                             _mm256_loadu_pd(sq.data() + i));
    const __m256d f = _mm256_add_pd(_mm256_add_pd(diffusion, convection),
                                    _mm256_loadu_pd(src.data() + i));
    _mm256_storeu_pd(out.data() + i, f);
  }
  for (; i < n; ++i) {
    out[i] = h[i] * lap[i] + cm1 * g[i] * sq[i] + src[i];
  }
}

void residual(std::span<const double> w, std::span<const double> w_old,
              std::span<const double> f_new, std::span<const double> f_old, double a,
              double b, std::span<double> r) {
  const std::size_t n = r.size();
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dw = _mm256_sub_pd(_mm256_loadu_pd(w.data() + i),
                                     _mm256_loadu_pd(w_old.data() + i));
    const __m256d rhs = _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(f_new.data() + i)),
                                      _mm256_mul_pd(vb, _mm256_loadu_pd(f_old.data() + i)));
    _mm256_storeu_pd(r.data() + i, _mm256_sub_pd(dw, rhs));
  }
  for (; i < n; ++i) {
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
  if (n < 3) return;
  const double* wp = w.data();
  const __m256d vc = _mm256_set1_pd(cm1);
  const __m256d v2 = _mm256_set1_pd(inv_dx2);
  const __m256d vs = _mm256_set1_pd(s);
  const __m256d vms = _mm256_set1_pd(-s);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 1;
  for (; i + 4 < n; i += 4) {
    const __m256d mid = _mm256_loadu_pd(wp + i);
    const __m256d left = _mm256_sub_pd(mid, _mm256_loadu_pd(wp + i - 1));
    const __m256d right = _mm256_sub_pd(_mm256_loadu_pd(wp + i + 1), mid);
    const __m256d active =
        _mm256_and_pd(_mm256_cmp_pd(_mm256_mul_pd(left, right), zero, _CMP_GT_OQ), one);
    const __m256d diff = _mm256_mul_pd(_mm256_loadu_pd(h.data() + i), v2);
    const __m256d conv = _mm256_mul_pd(
        _mm256_mul_pd(_mm256_mul_pd(vc, _mm256_loadu_pd(g.data() + i)), v2), active);
    _mm256_storeu_pd(sub.data() + i,
                     _mm256_mul_pd(vms, _mm256_sub_pd(diff, _mm256_mul_pd(conv, right))));
    _mm256_storeu_pd(sup.data() + i,
                     _mm256_mul_pd(vms, _mm256_add_pd(diff, _mm256_mul_pd(conv, left))));
    __m256d acc = _mm256_sub_pd(
        _mm256_mul_pd(_mm256_loadu_pd(dh.data() + i), _mm256_loadu_pd(lap.data() + i)),
        _mm256_mul_pd(two, diff));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_mul_pd(vc, _mm256_loadu_pd(dg.data() + i)),
                                           _mm256_loadu_pd(sq.data() + i)));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(conv, _mm256_sub_pd(right, left)));
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(dsrc.data() + i));
    _mm256_storeu_pd(diag.data() + i, _mm256_sub_pd(one, _mm256_mul_pd(vs, acc)));
  }
  for (; i + 1 < n; ++i) {
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
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(v.data() + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(v.data() + i + 4));
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += v[i];
  return dx * (sum - 0.5 * (v.front() + v.back()));
}

double l1_distance(std::span<const double> a, std::span<const double> b, double dx) {
  const std::size_t n = a.size();
  if (n < 2) return 0.0;
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a.data() + i),
                                                  _mm256_loadu_pd(b.data() + i))));
  }
  double sum = hsum(acc);
  for (; i < n; ++i) sum += std::abs(a[i] - b[i]);
  return dx * (sum - 0.5 * (std::abs(a[0] - b[0]) + std::abs(a[n - 1] - b[n - 1])));
}

double max_abs(std::span<const double> v) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= v.size(); i += 4) {
    acc = _mm256_max_pd(acc, abs_pd(_mm256_loadu_pd(v.data() + i)));
  }
  double m = hmax(acc);
  for (; i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= a.size(); i += 4) {
    acc = _mm256_max_pd(acc, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a.data() + i),
                                                  _mm256_loadu_pd(b.data() + i))));
  }
  double m = hmax(acc);
  for (; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void min_max(std::span<const double> v, double& lo, double& hi) {
  __m256d vlo = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256d vhi = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= v.size(); i += 4) {
    const __m256d x = _mm256_loadu_pd(v.data() + i);
    vlo = _mm256_min_pd(vlo, x);
    vhi = _mm256_max_pd(vhi, x);
  }
  lo = hmin(vlo);
  hi = hmax(vhi);
  for (; i < v.size(); ++i) {
    lo = std::min(lo, v[i]);
    hi = std::max(hi, v[i]);
  }
}

double max_abs_centered_diff(std::span<const double> v, double inv_2dx) {
  const std::size_t n = v.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 1;
  for (; i + 4 < n; i += 4) {
    acc = _mm256_max_pd(acc, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(v.data() + i + 1),
                                                  _mm256_loadu_pd(v.data() + i - 1))));
  }
  double m = hmax(acc);
  for (; i + 1 < n; ++i) m = std::max(m, std::abs(v[i + 1] - v[i - 1]));
  return m * inv_2dx;
}

}  // namespace

const KernelTable kAvx2Table{
    Isa::Avx2,  "avx2",     &stencil,     &combine, &residual,
    &jacobian,  &trapezoid, &l1_distance, &max_abs, &max_abs_diff,
    &min_max,   &max_abs_centered_diff,
};

}  // namespace sdl::kernels::detail
