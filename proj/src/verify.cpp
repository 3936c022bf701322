#include "sdl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>

#include "sdl/bounds.hpp"
#include "sdl/kernels.hpp"
#include "sdl/regularization.hpp"

namespace sdl {

std::string_view to_string(Lemma lemma) noexcept {
  switch (lemma) {
    case Lemma::L1_Linfty: return "L1_Linfty";
    case Lemma::L2_gradient: return "L2_gradient";
    case Lemma::L3_mass: return "L3_mass";
    case Lemma::L4_contraction: return "L4_contraction";
    case Lemma::Thm_dependence: return "Thm_dependence";
    case Lemma::Eq26_energy: return "Eq26_energy";
  }
  return "unknown";
}

std::optional<double> EstimateReport::scalar(std::string_view name) const {
  for (const auto& [key, value] : scalars) {
    if (key == name) return value;
  }
  return std::nullopt;
}

double epsilon_grid(const Grid& grid, double dt, const ProblemParams& params, double c_tol) {
  const double dx = grid.dx();
  return c_tol * (dx * dx + dt) * std::max(1.0, c0_bound(params, params.T()));
}

double l1_distance(const Field& f, const Field& g) {
  if (!(f.grid() == g.grid())) throw Error(ErrorCode::GridMismatch, "fields live on different grids");
  return kernels::active().l1_distance(f.values(), g.values(), f.grid().dx());
}

double transformed_gradient_sup(const Field& f, double m) {
  if (!(f.min() > 0.0)) {
    throw Error(ErrorCode::NonpositiveData, "transformed gradient needs a strictly positive field");
  }
  const double e = m / q_exponent(m);
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = std::pow(f[i], e);
  return kernels::active().max_abs_centered_diff(v, 0.5 / f.grid().dx());
}

namespace {

// margin = min(bound - observed), or min(observed - bound) for lower bounds.
void finish(EstimateReport& r, bool lower_bound) {
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    const double gap = lower_bound ? r.observed[i] - r.bound[i] : r.bound[i] - r.observed[i];
    margin = std::min(margin, gap);
  }
  r.margin = r.times.empty() ? 0.0 : margin;
  r.pass = r.margin >= -r.tolerance;
}

ProblemParams data_params(const Trajectory& traj, const ProblemParams& params) {
  return params.with_M(std::max(params.M(), traj.initial().max()));
}

// Snapshot pairs whose times agree to rounding.
std::vector<std::pair<const Field*, const Field*>> shared_snapshots(const Trajectory& a,
                                                                    const Trajectory& b) {
  std::vector<std::pair<const Field*, const Field*>> out;
  std::size_t j = 0;
  for (const auto& fa : a.snapshots) {
    const double t = fa.time();
    const double tol = 1e-12 * std::max(1.0, std::abs(t));
    while (j < b.snapshots.size() && b.snapshots[j].time() < t - tol) ++j;
    if (j < b.snapshots.size() && std::abs(b.snapshots[j].time() - t) <= tol) {
      out.emplace_back(&fa, &b.snapshots[j]);
    }
  }
  return out;
}

Trajectory solve_data(const Field& u0, const ProblemParams& params,
                      std::span<const double> delta_schedule, const StepConfig& config,
                      double t_end) {
  if (u0.min() > 0.0) {
    return solve_regularized(u0, params, corridor_schedule(params, u0), config, t_end);
  }
  return solve_singular(u0, params, delta_schedule, config, t_end).trajectory;
}

double pow_l1(const Field& a, const Field& b, double p) {
  std::vector<double> pa(a.size());
  std::vector<double> pb(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa[i] = std::pow(a[i], p);
    pb[i] = std::pow(b[i], p);
  }
  return kernels::active().l1_distance(pa, pb, a.grid().dx());
}

}  // namespace

EstimateReport check_linfty(const Trajectory& traj, const ProblemParams& params) {
  const ProblemParams eff = data_params(traj, params);
  EstimateReport r;
  r.lemma = Lemma::L1_Linfty;
  r.tolerance = epsilon_grid(traj.initial().grid(), traj.dt_nominal, eff);
  double running = 0.0;
  for (const auto& f : traj.snapshots) {
    running = std::max(running, f.max());
    r.times.push_back(f.time());
    r.observed.push_back(running);
    r.bound.push_back(c0_bound(eff, f.time()));
  }
  r.scalars = {{"M_effective", eff.M()}};
  r.note = "running max of u against C0(t) with M' = max(M, max u0) = " + std::to_string(eff.M());
  finish(r, false);
  return r;
}

EstimateReport check_energy(const Trajectory& traj, const ProblemParams& params, const Field& u0,
                            double delta_finest) {
  if (!(u0.min() > 0.0)) {
    throw Error(ErrorCode::NonpositiveData, "energy check needs strictly positive initial data");
  }
  const double k = 2.0 - params.m() - params.alpha();
  const double e0 = power_integral(u0, k);
  const double cutoff = 10.0 * delta_finest;

  EstimateReport r;
  r.lemma = Lemma::Eq26_energy;
  double min_u = std::numeric_limits<double>::infinity();
  std::size_t skipped = 0;
  for (const auto& f : traj.snapshots) {
    const double lo = f.min();
    if (lo < cutoff) {
      ++skipped;
      continue;
    }
    min_u = std::min(min_u, lo);
    r.times.push_back(f.time());
    r.observed.push_back(power_integral(f, k));
    r.bound.push_back(energy_bound(params, e0, f.time()));
  }
  const double scale = std::isfinite(min_u) ? std::max(1.0, std::abs(k) * std::pow(min_u, k - 1.0)) : 1.0;
  r.tolerance = epsilon_grid(traj.initial().grid(), traj.dt_nominal, data_params(traj, params)) * scale;
  r.scalars = {{"tolerance_scale", scale}, {"min_u", min_u}, {"skipped", static_cast<double>(skipped)}};
  r.note = "tolerance scaled by max(1, |2-m-alpha| min_u^(1-m-alpha)) = " + std::to_string(scale) +
           "; " + std::to_string(skipped) + " snapshots with min u < " + std::to_string(cutoff) +
           " excluded";
  finish(r, false);
  return r;
}

EstimateReport check_mass(const Trajectory& traj, const ProblemParams& params, const Field& u0) {
  const BoundCurve curve = mass_lower_curve(params, u0);
  const auto& k = kernels::active();
  EstimateReport r;
  r.lemma = Lemma::L3_mass;
  r.tolerance = epsilon_grid(traj.initial().grid(), traj.dt_nominal, data_params(traj, params));
  for (const auto& f : traj.snapshots) {
    r.times.push_back(f.time());
    r.observed.push_back(k.trapezoid(f.values(), f.grid().dx()));
    r.bound.push_back(curve(f.time()));
  }
  r.note = "mass against the lower bound curve; observed >= bound - tolerance";
  finish(r, true);
  return r;
}

EstimateReport check_gradient(const Trajectory& traj, const ProblemParams& params,
                              std::span<const double> sample_times) {
  const double m = params.m();
  EstimateReport r;
  r.lemma = Lemma::L2_gradient;
  auto wanted = [&](double t) {
    if (sample_times.empty()) return true;
    return std::any_of(sample_times.begin(), sample_times.end(), [t](double s) {
      return std::abs(s - t) <= 1e-12 * std::max(1.0, std::abs(t));
    });
  };
  std::vector<double> shape;
  for (const auto& f : traj.snapshots) {
    if (!(f.time() > 0.0) || !wanted(f.time())) continue;
    r.times.push_back(f.time());
    r.observed.push_back(transformed_gradient_sup(f, m));
    shape.push_back(1.0 + 1.0 / std::sqrt(f.time()));
  }

  double c_hat = 0.0;
  double previous = 0.0;
  int jumps = 0;
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    c_hat = std::max(c_hat, r.observed[i] / shape[i]);
    r.scalars.emplace_back("c_hat@" + std::to_string(r.times[i]), c_hat);
    if (previous > 0.0 && c_hat > 10.0 * previous) ++jumps;
    previous = c_hat;
  }
  for (std::size_t i = 0; i < r.times.size(); ++i) r.bound.push_back(c_hat * shape[i]);
  r.scalars.insert(r.scalars.begin(), {"c_hat", c_hat});
  if (jumps > 0) {
    r.flags.push_back(std::to_string(jumps) + " jump(s) above 10x in c_hat between nested horizons");
  }
  r.tolerance = 0.0;
  r.note = "c_hat = max sup|(u^{m/q})_x| / (1 + t^{-1/2}); c_hat is nondecreasing across nested horizons";
  finish(r, false);
  return r;
}

EstimateReport check_contraction(const Trajectory& a, const Trajectory& b,
                                 const ProblemParams& params) {
  if (!(a.initial().grid() == b.initial().grid())) {
    throw Error(ErrorCode::GridMismatch, "contraction pair lives on different grids");
  }
  const auto shared = shared_snapshots(a, b);
  EstimateReport r;
  r.lemma = Lemma::L4_contraction;
  if (shared.empty()) throw Error(ErrorCode::InvalidArgument, "no shared snapshot times");
  const double t_first = shared.front().first->time();
  const double t_last = shared.back().first->time();
  double widest = 0.0;
  for (std::size_t i = 1; i < shared.size(); ++i) {
    widest = std::max(widest, shared[i].first->time() - shared[i - 1].first->time());
  }
  if (widest > (t_last - t_first) / 64.0 * (1.0 + 1e-9)) {
    throw Error(ErrorCode::InvalidArgument,
                "shared snapshots are spaced " + std::to_string(widest) + ", coarser than t_end/64");
  }

  const double d0 = l1_distance(*shared.front().first, *shared.front().second);
  double integral = 0.0;
  double prev_source = pow_l1(*shared.front().first, *shared.front().second, params.p());
  double prev_t = t_first;
  for (const auto& [fa, fb] : shared) {
    const double t = fa->time();
    const double source = pow_l1(*fa, *fb, params.p());
    integral += 0.5 * (t - prev_t) * (source + prev_source);
    prev_source = source;
    prev_t = t;
    r.times.push_back(t);
    r.observed.push_back(l1_distance(*fa, *fb));
    r.bound.push_back(d0 + integral);
  }
  r.tolerance = epsilon_grid(
      a.initial().grid(), std::max(a.dt_nominal, b.dt_nominal),
      params.with_M(std::max({params.M(), a.initial().max(), b.initial().max()})));
  r.note = "L1 distance against initial distance plus trapezoid-in-time source discrepancy";
  finish(r, false);
  return r;
}

DependenceRecord check_dependence(std::span<const std::pair<Field, Field>> pairs,
                                  const ProblemParams& params, const StepConfig& config,
                                  double t_star, double t_end,
                                  std::span<const double> delta_schedule) {
  DependenceRecord record;
  record.t_star = t_star;
  record.t_end = t_end;
  const double p = params.p();

  std::vector<std::future<std::pair<Trajectory, Trajectory>>> jobs;
  for (const auto& [u10, u20] : pairs) {
    jobs.push_back(std::async(std::launch::async, [&, u10 = u10, u20 = u20] {
      return std::pair{solve_data(u10, params, delta_schedule, config, t_end),
                       solve_data(u20, params, delta_schedule, config, t_end)};
    }));
  }

  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto [a, b] = jobs[k].get();
    const auto shared = shared_snapshots(a, b);
    DependencePair pr(pairs[k].first, pairs[k].second);
    pr.initial_l1 = l1_distance(pairs[k].first, pairs[k].second);
    const double tol = epsilon_grid(a.initial().grid(), config.dt_init,
                                    params.with_M(std::max({params.M(), a.initial().max(),
                                                            b.initial().max()})));
    record.tolerance = std::max(record.tolerance, tol);

    pr.xi = std::numeric_limits<double>::infinity();
    for (const auto& [fa, fb] : shared) {
      if (fa->time() >= t_star) pr.xi = std::min({pr.xi, fa->min(), fb->min()});
    }
    if (!(pr.xi > 0.0)) {
      throw Error(ErrorCode::XiNonpositive,
                  "solution minimum on [t*, t_end] is " + std::to_string(pr.xi));
    }
    const double rate = p * std::pow(pr.xi, p - 1.0);
    const double two_d0 = 2.0 * pr.initial_l1;
    pr.factor2_margin = std::numeric_limits<double>::infinity();
    pr.gronwall_margin = std::numeric_limits<double>::infinity();
    bool factor2_everywhere = true;
    for (const auto& [fa, fb] : shared) {
      const double t = fa->time();
      const double d = l1_distance(*fa, *fb);
      pr.max_l1 = std::max(pr.max_l1, d);
      if (d > two_d0 + tol) factor2_everywhere = false;
      if (t <= t_star) {
        pr.factor2_margin = std::min(pr.factor2_margin, two_d0 - d);
      } else {
        pr.gronwall_margin = std::min(pr.gronwall_margin, two_d0 * std::exp(rate * t) - d);
      }
    }
    pr.ratio = pr.initial_l1 > 0.0 ? pr.max_l1 / pr.initial_l1 : (pr.max_l1 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    pr.binding = factor2_everywhere ? "factor2" : "gronwall";
    pr.pass = pr.factor2_margin >= -tol && pr.gronwall_margin >= -tol;
    record.pass = record.pass && pr.pass;
    record.empirical_C = std::max(record.empirical_C, pr.ratio);
    record.pairs.push_back(std::move(pr));
  }
  return record;
}

DeltaStudy delta_convergence_study(const Field& u0, const ProblemParams& params,
                                   std::span<const double> schedule, const StepConfig& config,
                                   double t_probe) {
  SingularOptions options;
  options.t0 = t_probe;
  DeltaStudy study;
  if (schedule.size() < 2) {
    study.record.deltas.assign(schedule.begin(), schedule.end());
    return study;
  }
  if (u0.min() > 0.0) {
    // Mollify anyway so the study compares delta solutions.
    std::vector<Trajectory> runs;
    study.record.deltas.assign(schedule.begin(), schedule.end());
    study.record.t0 = t_probe;
    for (double delta : schedule) {
      const Field m = mollify_initial(u0, params, delta);
      runs.push_back(solve_regularized(m, params, corridor_schedule(params, m), config, t_probe));
      study.record.min_at_t0.push_back(runs.back().final().min());
    }
    for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
      study.record.l1_at_t0.push_back(l1_distance(runs[k].final(), runs[k + 1].final()));
      study.record.sup_at_t0.push_back(
          kernels::active().max_abs_diff(runs[k].final().values(), runs[k + 1].final().values()));
    }
  } else {
    study.record = solve_singular(u0, params, schedule, config, t_probe, {}, options).record;
  }
  const auto& l1 = study.record.l1_at_t0;
  for (std::size_t k = 0; k + 1 < l1.size(); ++k) {
    if (!(l1[k + 1] < l1[k])) study.decreasing = false;
  }
  return study;
}

namespace {

// Values of a nested-grid solution at the nodes of a grid with nc nodes.
std::vector<double> restrict_to(const Field& f, std::size_t nc) {
  const std::size_t nf = f.size();
  if ((nf - 1) % (nc - 1) != 0) {
    throw Error(ErrorCode::GridMismatch, "grids with " + std::to_string(nc) + " and " +
                                             std::to_string(nf) + " nodes are not nested");
  }
  const std::size_t r = (nf - 1) / (nc - 1);
  std::vector<double> out(nc);
  for (std::size_t i = 0; i < nc; ++i) out[i] = f[i * r];
  return out;
}

void fill_orders(ConvergenceStudy& study) {
  for (std::size_t k = 0; k + 1 < study.errors.size(); ++k) {
    const double ratio = study.levels[k] > study.levels[k + 1]
                             ? study.levels[k] / study.levels[k + 1]
                             : (study.levels[k + 1] - 1.0) / (study.levels[k] - 1.0);
    study.orders.push_back(std::log(study.errors[k] / study.errors[k + 1]) / std::log(ratio));
  }
}

}  // namespace

ConvergenceStudy grid_convergence_study(const InitialSpec& u0, const ProblemParams& params,
                                        std::span<const std::size_t> n_list,
                                        const StepConfig& config, double t_probe,
                                        std::optional<double> mollify_delta, ModelTerms terms) {
  std::vector<std::future<Field>> jobs;
  for (std::size_t n : n_list) {
    jobs.push_back(std::async(std::launch::async, [&, n] {
      Field data = make_initial(u0, Grid::uniform(n), params);
      if (!(data.min() > 0.0)) {
        if (!mollify_delta) {
          throw Error(ErrorCode::NonpositiveData, "grid study on data with zeros needs a mollifier");
        }
        data = mollify_initial(data, params, *mollify_delta);
      }
      SolveOptions options;
      options.stride = std::numeric_limits<std::size_t>::max();
      options.terms = terms;
      return solve_regularized(data, params, corridor_schedule(params, data), config, t_probe,
                               options)
          .final();
    }));
  }
  std::vector<Field> finals;
  for (auto& j : jobs) finals.push_back(j.get());

  ConvergenceStudy study;
  for (std::size_t n : n_list) study.levels.push_back(static_cast<double>(n));
  // Every gap is measured on the coarsest nodes so the gaps are comparable.
  const Field& coarsest = finals.front();
  for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
    study.errors.push_back(kernels::active().l1_distance(restrict_to(finals[k], coarsest.size()),
                                                         restrict_to(finals[k + 1], coarsest.size()),
                                                         coarsest.grid().dx()));
  }
  fill_orders(study);
  return study;
}

ConvergenceStudy time_convergence_study(const Field& u0, const ProblemParams& params,
                                        std::span<const double> dt_list, const StepConfig& config,
                                        double t_probe, ModelTerms terms) {
  std::vector<Field> finals;
  for (double dt : dt_list) {
    StepConfig c = config;
    c.dt_init = dt;
    c.dt_min = std::min(c.dt_min, dt);
    c.dt_max = std::max(c.dt_max, dt);
    SolveOptions options;
    options.stride = std::numeric_limits<std::size_t>::max();
    options.terms = terms;
    finals.push_back(
        solve_regularized(u0, params, corridor_schedule(params, u0), c, t_probe, options).final());
  }
  ConvergenceStudy study;
  study.levels.assign(dt_list.begin(), dt_list.end());
  for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
    study.errors.push_back(l1_distance(finals[k], finals[k + 1]));
  }
  fill_orders(study);
  return study;
}

}  // namespace sdl
