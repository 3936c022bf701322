#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "sdl/kernels.hpp"

using namespace sdl::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Lengths that exercise the vector body, the scalar tail and the short paths.
constexpr std::size_t kSizes[] = {3, 4, 5, 7, 8, 9, 16, 17, 101, 201, 1000};

}  // namespace

TEST_CASE("scalar stencil matches hand computation") {
  const std::vector<double> w{1.0, 4.0, 9.0, 8.0, 8.0};
  std::vector<double> lap(5, 0.0), sq(5, 0.0);
  scalar_table().stencil(w, 1.0, lap, sq);
  CHECK(lap[1] == 2.0);
  CHECK(sq[1] == 15.0);  // 3 * 5
  CHECK(lap[2] == -6.0);
  CHECK(sq[2] == 0.0);   // extremum: 5 * -1 < 0
  CHECK(sq[3] == 0.0);   // flat on one side
}

TEST_CASE("active table honours the environment") {
  const KernelTable& t = active();
  if (const char* v = std::getenv("SDL_SIMD"); v && std::strcmp(v, "scalar") == 0) {
    CHECK(t.isa == Isa::Scalar);
  } else if (avx2_table()) {
    CHECK(t.isa == Isa::Avx2);
  }
}

TEST_CASE("avx2 elementwise kernels agree bit for bit with the scalar reference") {
  const KernelTable* v = avx2_table();
  if (!v) {
    MESSAGE("no AVX2 on this machine; equivalence not exercised");
    return;
  }
  const KernelTable& s = scalar_table();
  std::mt19937_64 rng(7);
  for (std::size_t n : kSizes) {
    CAPTURE(n);
    auto w = random_vec(rng, n, 0.1, 2.0);
    // Plateaus make L * R exactly zero and exercise the limiter branch.
    for (std::size_t i = 0; i + 2 < n; i += 5) w[i + 1] = w[i];
    const auto h = random_vec(rng, n, 0.1, 5.0), dh = random_vec(rng, n, -5.0, 0.0);
    const auto g = random_vec(rng, n, 0.1, 5.0), dg = random_vec(rng, n, -5.0, 0.0);
    const auto src = random_vec(rng, n, 0.0, 1.0), dsrc = random_vec(rng, n, 0.0, 1.0);
    const auto w_old = random_vec(rng, n, 0.1, 2.0), f_old = random_vec(rng, n, -1.0, 1.0);
    const double inv_dx2 = 1e4;

    std::vector<double> lap_s(n, 0.0), sq_s(n, 0.0), lap_v(n, 0.0), sq_v(n, 0.0);
    s.stencil(w, inv_dx2, lap_s, sq_s);
    v->stencil(w, inv_dx2, lap_v, sq_v);
    CHECK(bitwise_equal(lap_s, lap_v));
    CHECK(bitwise_equal(sq_s, sq_v));

    std::vector<double> f_s(n), f_v(n);
    s.combine(h, g, src, lap_s, sq_s, -1.5, f_s);
    v->combine(h, g, src, lap_s, sq_s, -1.5, f_v);
    CHECK(bitwise_equal(f_s, f_v));

    std::vector<double> r_s(n), r_v(n);
    s.residual(w, w_old, f_s, f_old, 7e-5, 3e-5, r_s);
    v->residual(w, w_old, f_s, f_old, 7e-5, 3e-5, r_v);
    CHECK(bitwise_equal(r_s, r_v));

    std::vector<double> a_s(n, 0.0), b_s(n, 0.0), c_s(n, 0.0);
    std::vector<double> a_v(n, 0.0), b_v(n, 0.0), c_v(n, 0.0);
    s.jacobian(w, h, dh, g, dg, dsrc, lap_s, sq_s, -1.5, inv_dx2, 1e-4, a_s, b_s, c_s);
    v->jacobian(w, h, dh, g, dg, dsrc, lap_s, sq_s, -1.5, inv_dx2, 1e-4, a_v, b_v, c_v);
    CHECK(bitwise_equal(a_s, a_v));
    CHECK(bitwise_equal(b_s, b_v));
    CHECK(bitwise_equal(c_s, c_v));

    double lo_s, hi_s, lo_v, hi_v;
    s.min_max(w, lo_s, hi_s);
    v->min_max(w, lo_v, hi_v);
    CHECK(lo_s == lo_v);
    CHECK(hi_s == hi_v);
    CHECK(s.max_abs(f_s) == v->max_abs(f_s));
    CHECK(s.max_abs_diff(w, w_old) == v->max_abs_diff(w, w_old));
    CHECK(s.max_abs_centered_diff(w, 50.0) == v->max_abs_centered_diff(w, 50.0));
  }
}

TEST_CASE("avx2 reductions agree with the scalar reference to rounding") {
  const KernelTable* v = avx2_table();
  if (!v) return;
  const KernelTable& s = scalar_table();
  std::mt19937_64 rng(11);
  for (std::size_t n : kSizes) {
    const auto a = random_vec(rng, n, 0.0, 3.0), b = random_vec(rng, n, 0.0, 3.0);
    const double dx = 1.0 / static_cast<double>(n - 1);
    CHECK(v->trapezoid(a, dx) == doctest::Approx(s.trapezoid(a, dx)).epsilon(1e-13));
    CHECK(v->l1_distance(a, b, dx) == doctest::Approx(s.l1_distance(a, b, dx)).epsilon(1e-13));
  }
}

TEST_CASE("jacobian matches a finite difference of the residual map") {
  // F_i = h lap + cm1 g sq with constant h, g: check d F_i / d w_j numerically.
  const std::size_t n = 9;
  std::mt19937_64 rng(3);
  const auto w = random_vec(rng, n, 0.5, 1.5);
  const std::vector<double> h(n, 2.0), g(n, 3.0), zero(n, 0.0);
  const double cm1 = -1.5, inv_dx2 = 64.0, s = 1.0;
  const KernelTable& k = scalar_table();
  auto F = [&](const std::vector<double>& x) {
    std::vector<double> lap(n, 0.0), sq(n, 0.0), f(n, 0.0);
    k.stencil(x, inv_dx2, lap, sq);
    k.combine(h, g, zero, lap, sq, cm1, f);
    return f;
  };
  std::vector<double> lap(n, 0.0), sq(n, 0.0), sub(n), diag(n), sup(n);
  k.stencil(w, inv_dx2, lap, sq);
  k.jacobian(w, h, zero, g, zero, zero, lap, sq, cm1, inv_dx2, s, sub, diag, sup);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    for (std::size_t j = i - 1; j <= i + 1; ++j) {
      auto plus = w, minus = w;
      plus[j] += 1e-6;
      minus[j] -= 1e-6;
      const double fd = (F(plus)[i] - F(minus)[i]) / 2e-6;
      const double entry = j < i ? sub[i] : j == i ? diag[i] - 1.0 : sup[i];
      CHECK(-entry == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}
