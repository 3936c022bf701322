#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sdl/bounds.hpp"

using namespace sdl;

namespace {

ProblemParams params(double M, double T = 2.0, double m = -0.5) {
  return ProblemParams::validate({m, 0.5, 3.0, M, T});
}

Field ones(std::size_t n = 21) { return Field(Grid::uniform(n), std::vector<double>(n, 1.0)); }

}  // namespace

TEST_CASE("c0 envelope") {
  CHECK(c0_bound(params(1.0), 0.0) == doctest::Approx(1.0));
  CHECK(c0_bound(params(1.0), 1.5) == doctest::Approx(3.0625));
  CHECK(c0_bound(params(4.0), 2.0) == doctest::Approx(9.0));
  const auto curve = c0_curve(params(1.0));
  CHECK(curve.label() == BoundLabel::C0);
  const auto s = curve.sample(1.5, 4);
  REQUIRE(s.size() == 4);
  CHECK(s.back().first == 1.5);
  CHECK(s.back().second == doctest::Approx(3.0625));
}

TEST_CASE("lq envelope") {
  CHECK(lq_bound(params(1.0), 1.0, 0.0) == doctest::Approx(1.0));
  // (0.5 * 1 + 0.25^0.5)^2.
  CHECK(lq_bound(params(1.0), 0.25, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("gradient exponent and sign conditions") {
  CHECK(q_exponent(-0.5) == doctest::Approx(5.0 / 6.0));
  CHECK(q_exponent(-1e-6) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(gradient_signs(-0.5).coercivity == doctest::Approx(0.25));
  CHECK(gradient_signs(-0.5).power == doctest::Approx(0.3));
  for (double m = -0.99; m < 0.0; m += 0.01) {
    const auto s = gradient_signs(m);
    CHECK(s.coercivity > 0.0);
    CHECK(s.power > 0.0);
  }
}

TEST_CASE("mass lower bound") {
  const Field u0 = ones();
  CHECK(mass_lower_bound(params(1.0), u0, 0.0) == doctest::Approx(1.0));
  CHECK(mass_lower_bound(params(1.0), u0, 1.0) == doctest::Approx(1.0 / 2.25));
  CHECK(eta(params(1.0, 1.0), u0) == doctest::Approx(0.444444).epsilon(1e-5));
  CHECK(energy_bound(params(1.0), 1.0, 2.0) == doctest::Approx(2.0));
  std::vector<double> v(21, 1.0);
  v[3] = 0.0;
  try {
    (void)mass_lower_bound(params(1.0), Field(Grid::uniform(21), v), 1.0);
    FAIL("expected NonpositiveData");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonpositiveData);
  }
}

TEST_CASE("curves carry their data constants and render as csv") {
  const auto curve = mass_lower_curve(params(1.0), ones());
  CHECK(curve.data_constants().count("energy0") == 1);
  const std::string csv = to_csv(curve.sample(1.0, 3), "mass");
  CHECK(csv.rfind("t,mass\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
