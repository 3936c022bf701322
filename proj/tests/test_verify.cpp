#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "sdl/bounds.hpp"
#include "sdl/verify.hpp"

using namespace sdl;

namespace {

const ProblemParams kParams = ProblemParams::validate({-0.5, 0.5, 3.0, 1.0, 1.0});
constexpr double kDt = 1e-3;

Field constant(std::size_t n, double c) { return Field(Grid::uniform(n), std::vector<double>(n, c)); }

Field smooth(std::size_t n, double base = 0.6) {
  const Grid g = Grid::uniform(n);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = std::cos(std::numbers::pi * g.x(i));
    v[i] = base + 0.3 * c * c;
  }
  return Field(g, v);
}

StepConfig config(double dt = kDt) {
  StepConfig c;
  c.dt_init = dt;
  return c;
}

Trajectory solve(const Field& u0, double t_end = 1.0, ModelTerms terms = {}, double dt = kDt) {
  SolveOptions o;
  o.stride = 10;
  o.terms = terms;
  return solve_regularized(u0, kParams, corridor_schedule(kParams, u0), config(dt), t_end, o);
}

// Scales one interior snapshot so that it violates any upper bound.
Trajectory corrupt(Trajectory t, double factor) {
  Field& f = t.snapshots[t.snapshots.size() / 2];
  std::vector<double> v(f.values().begin(), f.values().end());
  for (double& x : v) x *= factor;
  f = Field(f.grid(), v, f.time());
  return t;
}

}  // namespace

TEST_CASE("grid tolerance and distances") {
  const Grid g = Grid::uniform(11);
  CHECK(epsilon_grid(g, 1e-3, kParams) ==
        doctest::Approx(5.0 * (0.01 + 1e-3) * c0_bound(kParams, 1.0)));
  const Field a = smooth(11);
  CHECK(l1_distance(a, a) == 0.0);
  CHECK(l1_distance(constant(11, 0.3), constant(11, 1.0)) == doctest::Approx(0.7));
  CHECK_THROWS_AS((void)l1_distance(a, constant(21, 1.0)), Error);
  CHECK(transformed_gradient_sup(constant(11, 2.0), -0.5) == 0.0);
  CHECK_THROWS_AS((void)transformed_gradient_sup(constant(11, 0.0), -0.5), Error);
}

TEST_CASE("sup bound: pass, reaction equality, negative control") {
  const Trajectory t = solve(constant(51, 1.0));
  const EstimateReport r = check_linfty(t, kParams);
  CHECK(r.pass);
  // The first snapshot sits on the envelope, so the margin is at most zero;
  // backward Euler overshoots it by O(dt) in the interior.
  CHECK(r.margin <= 0.0);
  CHECK(r.margin > -0.01 * r.tolerance);
  CHECK(r.times.size() == r.observed.size());
  CHECK(r.bound.size() == r.observed.size());

  ModelTerms reaction_only;
  reaction_only.diffusion = false;
  StepConfig cn = config(1e-3);
  cn.theta = 0.5;
  const Field u0 = constant(11, 1.0);
  const Trajectory rt =
      solve_regularized(u0, kParams, corridor_schedule(kParams, u0), cn, 1.0, {1, {}, reaction_only});
  const EstimateReport rr = check_linfty(rt, kParams);
  CHECK(rr.pass);
  CHECK(std::abs(rr.margin) < 1e-6);

  CHECK_FALSE(check_linfty(corrupt(t, 10.0), kParams).pass);
}

TEST_CASE("mass lower bound and energy line") {
  const Field u0 = constant(51, 1.0);
  const Trajectory t = solve(u0);
  const EstimateReport m = check_mass(t, kParams, u0);
  CHECK(m.pass);
  CHECK(std::abs(m.observed.front() - m.bound.front()) < 1e-12);
  const EstimateReport e = check_energy(t, kParams, u0);
  CHECK(e.pass);
  CHECK(std::abs(e.observed.front() - e.bound.front()) < 1e-12);

  const Field s = smooth(51);
  const Trajectory ts = solve(s);
  CHECK(check_mass(ts, kParams, s).pass);
  CHECK(check_energy(ts, kParams, s).pass);

  CHECK_FALSE(check_mass(corrupt(ts, 0.1), kParams, s).pass);
  CHECK_FALSE(check_energy(corrupt(ts, 0.1), kParams, s).pass);
}

TEST_CASE("gradient constant") {
  const Field u0 = constant(101, 1.0);
  const EstimateReport r = check_gradient(solve(u0), kParams);
  const double c_hat = r.scalar("c_hat").value();
  const double mq = kParams.m() / q_exponent(kParams.m());
  // Only the outflow at x = 1 drives a gradient for constant data.
  CHECK(c_hat <= std::abs(mq) * std::pow(c0_bound(kParams, 1.0), mq - 1.0 + kParams.alpha()) + 0.05);

  const Field s = smooth(101);
  const double a = check_gradient(solve(s, 1.0, {}, 1e-3), kParams).scalar("c_hat").value();
  const double b = check_gradient(solve(s, 1.0, {}, 5e-4), kParams).scalar("c_hat").value();
  CHECK(std::isfinite(a));
  CHECK(std::abs(a - b) <= 0.1 * a);
}

TEST_CASE("contraction") {
  const Field u = smooth(51, 0.5), v = smooth(51, 0.7);
  const Trajectory tu = solve(u), tv = solve(v);
  const EstimateReport same = check_contraction(tu, tu, kParams);
  CHECK(same.pass);
  CHECK(same.observed.back() == 0.0);
  const EstimateReport pair = check_contraction(tu, tv, kParams);
  CHECK(pair.pass);
  CHECK(pair.margin >= 0.0);  // equality at t = 0
  CHECK(pair.bound.back() - pair.observed.back() > 0.0);
  CHECK_FALSE(check_contraction(tu, corrupt(tv, 3.0), kParams).pass);

  SolveOptions sparse;
  sparse.stride = 500;
  const Trajectory coarse =
      solve_regularized(u, kParams, corridor_schedule(kParams, u), config(), 1.0, sparse);
  CHECK_THROWS_AS((void)check_contraction(coarse, coarse, kParams), Error);
}

TEST_CASE("continuous dependence") {
  const Field u = smooth(51);
  std::vector<std::pair<Field, Field>> pairs{{u, u}};
  for (double eps : {1e-1, 1e-2}) {
    std::vector<double> v(u.values().begin(), u.values().end());
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] += eps * std::exp(-50.0 * std::pow(u.grid().x(i) - 0.5, 2));
    }
    pairs.emplace_back(u, Field(u.grid(), v));
  }
  const DependenceRecord r = check_dependence(pairs, kParams, config(), 0.1, 1.0);
  REQUIRE(r.pairs.size() == 3);
  CHECK(r.pairs[0].ratio == 0.0);
  CHECK(r.pairs[0].pass);
  CHECK(r.pass);
  CHECK(std::isfinite(r.empirical_C));
  CHECK(r.pairs[2].max_l1 / r.pairs[1].max_l1 == doctest::Approx(0.1).epsilon(0.2));
}

TEST_CASE("delta and convergence studies") {
  const Field u0 = constant(51, 1.0);
  const double single[] = {0.04};
  const DeltaStudy one = delta_convergence_study(u0, kParams, single, config(), 0.05);
  CHECK(one.record.l1_at_t0.empty());

  InitialSpec spec{initial::Bump{0.0, 1.0, 0.5, 0.5}};
  spec.compatible = true;
  const auto params = kParams.with_M(1.5);
  const std::size_t same[] = {101, 101};
  CHECK(grid_convergence_study(spec, params, same, config(), 0.1).errors.front() == 0.0);
  const std::size_t nested[] = {51, 101, 201};
  const ConvergenceStudy g = grid_convergence_study(spec, params, nested, config(1e-4), 0.1);
  REQUIRE(g.orders.size() == 1);
  CHECK(g.orders[0] >= 1.5);
  CHECK(g.orders[0] <= 2.2);
  const std::size_t skew[] = {51, 70};
  CHECK_THROWS_AS((void)grid_convergence_study(spec, params, skew, config(), 0.1), Error);

  ModelTerms reaction_only;
  reaction_only.diffusion = false;
  const double dts[] = {4e-3, 2e-3, 1e-3};
  const ConvergenceStudy t =
      time_convergence_study(constant(11, 1.0), kParams, dts, config(1e-3), 1.0, reaction_only);
  REQUIRE(t.orders.size() == 1);
  CHECK(t.orders[0] == doctest::Approx(1.0).epsilon(0.05));
}
