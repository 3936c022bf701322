#pragma once

// Data-parallel inner loops of the finite-difference scheme.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant selected at runtime. Elementwise kernels perform the same
// operations in the same order as the reference (no FMA contraction), so the
// two variants agree bit for bit; reductions differ only in summation order.

#include <cstddef>
#include <span>
#include <string_view>

namespace sdl::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  std::string_view name;

  /// For interior i in [1, n-2], with L = w[i] - w[i-1] and R = w[i+1] - w[i]:
  /// lap[i] = (R - L) * inv_dx2 and sq[i] = max(0, L * R) * inv_dx2.
  /// sq approximates w_x^2 to second order where w is smooth and monotone,
  /// and vanishes at extrema and at the foot of a steep front.
  void (*stencil)(std::span<const double> w, double inv_dx2, std::span<double> lap,
                  std::span<double> sq);

  /// out[i] = h[i] * lap[i] + cm1 * g[i] * sq[i] + src[i] for every i.
  void (*combine)(std::span<const double> h, std::span<const double> g,
                  std::span<const double> src, std::span<const double> lap,
                  std::span<const double> sq, double cm1, std::span<double> out);

  /// r[i] = (w[i] - w_old[i]) - (a * f_new[i] + b * f_old[i]).
  void (*residual)(std::span<const double> w, std::span<const double> w_old,
                   std::span<const double> f_new, std::span<const double> f_old,
                   double a, double b, std::span<double> r);

  /// Interior rows of I - s * dF/dw for interior i in [1, n-2]. Where
  /// L * R <= 0 the sq term is locally constant and contributes nothing.
  void (*jacobian)(std::span<const double> w, std::span<const double> h,
                   std::span<const double> dh, std::span<const double> g,
                   std::span<const double> dg, std::span<const double> dsrc,
                   std::span<const double> lap, std::span<const double> sq, double cm1,
                   double inv_dx2, double s, std::span<double> sub,
                   std::span<double> diag, std::span<double> sup);

  double (*trapezoid)(std::span<const double> v, double dx);
  double (*l1_distance)(std::span<const double> a, std::span<const double> b, double dx);
  double (*max_abs)(std::span<const double> v);
  double (*max_abs_diff)(std::span<const double> a, std::span<const double> b);
  void (*min_max)(std::span<const double> v, double& lo, double& hi);

  /// max over interior i of |v[i+1] - v[i-1]| * inv_2dx.
  double (*max_abs_centered_diff)(std::span<const double> v, double inv_2dx);
};

const KernelTable& scalar_table() noexcept;

/// nullptr when the build has no AVX2 variant or the CPU lacks AVX2.
const KernelTable* avx2_table() noexcept;

/// Table used by the library. Chosen once: AVX2 when available unless the
/// environment variable SDL_SIMD is set to "scalar".
const KernelTable& active() noexcept;

}  // namespace sdl::kernels
