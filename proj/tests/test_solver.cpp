#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "sdl/bounds.hpp"
#include "sdl/kernels.hpp"
#include "sdl/solver.hpp"
#include "sdl/verify.hpp"

using namespace sdl;

namespace {

const ProblemParams kParams = ProblemParams::validate({-0.5, 0.5, 3.0, 1.0, 1.0});

Field constant(std::size_t n, double c) { return Field(Grid::uniform(n), std::vector<double>(n, c)); }

Field smooth(std::size_t n) {
  const Grid g = Grid::uniform(n);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = g.x(i);
    v[i] = 0.6 + 0.3 * std::cos(std::numbers::pi * x) * std::cos(std::numbers::pi * x);
  }
  return Field(g, v);
}

StepConfig config(double dt, double theta = 1.0) {
  StepConfig c;
  c.dt_init = dt;
  c.theta = theta;
  return c;
}

}  // namespace

TEST_CASE("closed-form reaction") {
  CHECK(reaction_exact(1.0, 0.5, 3.0) == doctest::Approx(6.25).epsilon(1e-15));
  CHECK(reaction_exact(0.0, 0.5, 2.0) == doctest::Approx(1.0));
  CHECK(reaction_exact(0.0, 0.75, 1.0) == doctest::Approx(std::pow(0.25, 4.0)));
  CHECK(reaction_exact(2.5, 0.3, 0.0) == doctest::Approx(2.5));
}

TEST_CASE("log-spaced times") {
  const auto t = log_times(1e-4, 1.0, 5);
  REQUIRE(t.size() == 5);
  CHECK(t.front() == doctest::Approx(1e-4));
  CHECK(t[2] == doctest::Approx(1e-2));
  CHECK(t.back() == 1.0);
}

TEST_CASE("step configuration is validated") {
  CHECK_NOTHROW(StepConfig{}.validate());
  StepConfig bad;
  bad.theta = 0.3;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = {};
  bad.dt_init = 1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("constant interior follows the reaction ODE") {
  const Field u0 = constant(101, 1.0);
  const auto spec = corridor_schedule(kParams, u0);
  const auto h = build_cutoff_h(kParams, spec);
  const auto g = build_cutoff_g(kParams, spec);
  const double dt = 1e-4;
  const StepResult r = step_regularized(u0, dt, h, g, kParams, config(dt));
  CHECK(r.residual <= 1e-10);
  CHECK(r.field.time() == doctest::Approx(dt));
  for (std::size_t i = 0; i < 60; ++i) {
    CHECK(r.field[i] == doctest::Approx(reaction_exact(1.0, 0.5, dt)).epsilon(1e-8));
  }
  CHECK(r.field[100] < r.field[50]);  // outflow at x = 1
}

TEST_CASE("implicit step agrees with the explicit oracle on a coarse grid") {
  const Field u0 = constant(11, 1.0);
  const auto spec = corridor_schedule(kParams, u0);
  const auto h = build_cutoff_h(kParams, spec);
  const auto g = build_cutoff_g(kParams, spec);
  // Crank-Nicolson: the time error of one step is far below the tolerance.
  const StepResult r = step_regularized(u0, 1e-4, h, g, kParams, config(1e-4, 0.5));
  const Trajectory oracle = explicit_oracle(u0, kParams, h, g, 1e-7, 1e-4);
  double err = 0.0;
  for (std::size_t i = 0; i < 11; ++i) err = std::max(err, std::abs(r.field[i] - oracle.final()[i]));
  CHECK(err < 1e-6);

  // The same check on non-constant data exercises the convection term.
  const Field s = smooth(11);
  const auto spec_s = corridor_schedule(kParams, s);
  const auto hs = build_cutoff_h(kParams, spec_s);
  const auto gs = build_cutoff_g(kParams, spec_s);
  const StepResult rs = step_regularized(s, 1e-4, hs, gs, kParams, config(1e-4, 0.5));
  const Trajectory os = explicit_oracle(s, kParams, hs, gs, 1e-7, 1e-4);
  err = 0.0;
  for (std::size_t i = 0; i < 11; ++i) err = std::max(err, std::abs(rs.field[i] - os.final()[i]));
  CHECK(err < 1e-6);
}

TEST_CASE("explicit oracle: reaction only and stability guard") {
  const Field u0 = constant(5, 1.0);
  const auto spec = corridor_schedule(kParams.with_T(1.0), u0);
  const auto h = build_cutoff_h(kParams, spec);
  const auto g = build_cutoff_g(kParams, spec);
  ModelTerms reaction_only;
  reaction_only.diffusion = false;
  const Trajectory t = explicit_oracle(u0, kParams, h, g, 1e-6, 1.0, reaction_only);
  CHECK(std::abs(t.final().max() - reaction_exact(1.0, 0.5, 1.0)) < 1e-6);
  try {
    (void)explicit_oracle(constant(101, 1.0), kParams, h, g, 1e-3, 1e-2);
    FAIL("expected StabilityViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StabilityViolation);
  }
}

TEST_CASE("generous corridor: no events, sup bound holds") {
  const Field u0 = smooth(101);
  const double dt = 1e-3;
  SolveOptions o;
  o.stride = 10;
  const Trajectory t =
      solve_regularized(u0, kParams, corridor_schedule(kParams, u0), config(dt), 1.0, o);
  CHECK(t.events.empty());
  CHECK(t.final().time() == doctest::Approx(1.0));
  CHECK(t.snapshots.size() == 101);
  const double eps = epsilon_grid(u0.grid(), dt, kParams);
  for (const auto& f : t.snapshots) {
    CHECK(f.min() > 0.0);
    CHECK(f.max() <= c0_bound(kParams, f.time()) + eps);
  }
  for (const auto& d : t.steps) CHECK(std::abs(d.mass_balance) <= 10.0 / 5.0 * eps);
}

TEST_CASE("tight corridor: breach, widening and continuation are recorded") {
  const Field u0 = smooth(51);
  RegularizationSpec tight = corridor_schedule(kParams, u0);
  tight.m_bar = 1.01 * u0.max();
  SolveOptions o;
  o.stride = 50;
  const Trajectory t = solve_regularized(u0, kParams, tight, config(1e-3), 1.0, o);
  REQUIRE(t.count(EventKind::CorridorBreach) == 1);
  REQUIRE(t.count(EventKind::ScheduleChange) == 1);
  CHECK(t.events[0].kind == EventKind::CorridorBreach);
  CHECK(t.events[1].kind == EventKind::ScheduleChange);
  CHECK(t.corridor.m_bar >= 2.0 * std::max(2.0 * kParams.M(), c0_bound(kParams, kParams.T())));
  CHECK(t.final().time() == doctest::Approx(1.0));
}

TEST_CASE("positive data: the split at t0 matches a direct solve") {
  const Field u0 = constant(101, 1.0);
  const double dt = 1e-3;
  const double schedule[] = {0.04, 0.02};
  const SingularSolve split = solve_singular(u0, kParams, schedule, config(dt), 1.0);
  const Trajectory direct =
      solve_regularized(u0, kParams, corridor_schedule(kParams, u0), config(dt), 1.0);
  CHECK(split.trajectory.count(EventKind::Restart) == 1);
  CHECK(l1_distance(split.trajectory.final(), direct.final()) <
        2.0 * epsilon_grid(u0.grid(), dt, kParams));
}

TEST_CASE("plateau data: delta solutions are Cauchy and positive at t0") {
  const Field u0 =
      make_initial({initial::Plateau{0.25, 0.75, 1.0}}, Grid::uniform(101), kParams);
  const double schedule[] = {0.08, 0.04, 0.02};
  const SingularSolve s = solve_singular(u0, kParams, schedule, config(1e-3), 0.2);
  const auto& rec = s.record;
  REQUIRE(rec.l1_at_t0.size() == 2);
  CHECK(rec.l1_at_t0[1] < rec.l1_at_t0[0]);
  for (double m : rec.min_at_t0) CHECK(m > 0.0);
  CHECK(s.trajectory.final().time() == doctest::Approx(0.2));
  for (const auto& f : s.trajectory.snapshots) CHECK(f.min() > 0.0);
}

TEST_CASE("repeated solves are bitwise identical") {
  const Field u0 = smooth(101);
  auto run = [&] {
    return solve_regularized(u0, kParams, corridor_schedule(kParams, u0), config(1e-3), 0.5);
  };
  const Trajectory a = run(), b = run();
  REQUIRE(a.snapshots.size() == b.snapshots.size());
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
    const auto va = a.snapshots[k].values(), vb = b.snapshots[k].values();
    CHECK(std::equal(va.begin(), va.end(), vb.begin()));
  }
}
