#include "semidev/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace semidev {

namespace {

void validate(const Schedule& s) {
  switch (s.variant) {
    case ScheduleVariant::ConvexSubharmonic:
      if (!(s.epsilon >= 0.0 && s.epsilon < 1.0))
        throw std::invalid_argument("schedule: epsilon must lie in [0,1)");
      if (!(s.delta > 0.0 && s.delta < 1.0))
        throw std::invalid_argument("schedule: delta must lie in (0,1)");
      if (!(s.zeta > 0.0 && s.zeta < 1.0))
        throw std::invalid_argument("schedule: zeta must lie in (0,1)");
      if (!(s.delta >= s.zeta))
        throw std::invalid_argument("schedule: delta must be >= zeta");
      break;
    case ScheduleVariant::StronglyConvexSubharmonic:
      if (!(s.sigma > 0.0)) throw std::invalid_argument("schedule: sigma must be > 0");
      if (!(s.epsilon >= 0.0 && s.epsilon < 1.0))
        throw std::invalid_argument("schedule: epsilon must lie in [0,1)");
      if (!(s.delta > 0.0 && s.delta < 1.0))
        throw std::invalid_argument("schedule: delta must lie in (0,1)");
      break;
    case ScheduleVariant::Constant:
      if (!(s.sigma > 0.0)) throw std::invalid_argument("schedule: sigma must be > 0");
      if (!(s.alpha > 0.0 && s.alpha < 1.0))
        throw std::invalid_argument("schedule: alpha must lie in (0,1)");
      if (!(s.beta > 0.0 && s.beta <= 1.0))
        throw std::invalid_argument("schedule: beta must lie in (0,1]");
      if (!(s.gamma > 0.0 && s.gamma <= 1.0))
        throw std::invalid_argument("schedule: gamma must lie in (0,1]");
      if (!(s.alpha < std::min(s.beta, s.gamma)))
        throw std::invalid_argument("schedule: alpha must be < min{beta, gamma}");
      break;
  }
}

double require_finite(double v, const char* what) {
  if (!std::isfinite(v))
    throw std::runtime_error(std::string("solver: non-finite ") + what +
                             " (mu may be too small for the cost scale)");
  return v;
}

}  // namespace

Schedule Schedule::convex(double epsilon, double delta, double zeta) {
  Schedule s;
  s.variant = ScheduleVariant::ConvexSubharmonic;
  s.epsilon = epsilon;
  s.delta = delta;
  s.zeta = zeta;
  validate(s);
  return s;
}

Schedule Schedule::strongly_convex(double sigma, double epsilon, double delta) {
  Schedule s;
  s.variant = ScheduleVariant::StronglyConvexSubharmonic;
  s.sigma = sigma;
  s.epsilon = epsilon;
  s.delta = delta;
  validate(s);
  return s;
}

Schedule Schedule::constant(double sigma, double alpha, double beta, double gamma) {
  Schedule s;
  s.variant = ScheduleVariant::Constant;
  s.sigma = sigma;
  s.alpha = alpha;
  s.beta = beta;
  s.gamma = gamma;
  validate(s);
  return s;
}

StepSizes stepsizes(const Schedule& schedule, double p, std::uint64_t n) {
  validate(schedule);
  if (!(p >= 1.0 && p <= 2.0)) throw std::invalid_argument("stepsizes: p must lie in [1,2]");
  const bool first_order = (p == 1.0);
  const double nd = static_cast<double>(n);
  switch (schedule.variant) {
    case ScheduleVariant::ConvexSubharmonic: {
      if (n == 0) return {1.0, 1.0, 1.0};
      const double e = schedule.epsilon;
      const double tau1 = first_order ? (3.0 + e) / 4.0 : (7.0 + e) / 8.0;
      const double tau2 = first_order ? (1.0 + schedule.delta * e) / 2.0
                                      : (3.0 + schedule.delta * e) / 4.0;
      const double tau3 = (1.0 + schedule.zeta * e) / 2.0;
      return {std::pow(nd, -tau1), std::pow(nd, -tau2), std::pow(nd, -tau3)};
    }
    case ScheduleVariant::StronglyConvexSubharmonic: {
      if (n == 0) return {1.0 / schedule.sigma, 1.0, 1.0};
      const double e = schedule.epsilon;
      const double tau2 = first_order ? 2.0 / 3.0 : (3.0 + e) / 4.0;
      const double tau3 = (1.0 + schedule.delta * e) / 2.0;
      return {1.0 / (schedule.sigma * nd), std::pow(nd, -tau2), std::pow(nd, -tau3)};
    }
    case ScheduleVariant::Constant:
      return {schedule.alpha / schedule.sigma, schedule.beta, schedule.gamma};
  }
  throw std::logic_error("stepsizes: unknown schedule variant");
}

std::size_t burn_in(double tau2) {
  if (!(tau2 > 0.0 && tau2 < 1.0))
    throw std::invalid_argument("burn_in: tau2 must lie in (0,1)");
  const double root = std::pow(tau2, 1.0 / (tau2 + 1.0));
  const double value = std::ceil(1.0 / (1.0 - root));
  // Every schedule this library produces has tau2 >= 1/2, where the ceiling
  // is already >= 3; the clamp keeps the declared floor on the rest of the
  // admissible interval, where the raw expression can dip to 2.
  return std::max<std::size_t>(3, static_cast<std::size_t>(value));
}

AuxiliarySets auxiliary_sets(const RiskSpec& spec, const SmoothingPlan& plan, double G,
                             double V) {
  if (!(G >= 0.0 && V >= 0.0))
    throw std::invalid_argument("auxiliary_sets: G and V must be nonnegative");
  const double eta = spec.profile.eta();
  if (spec.p > 1.0 && !(eta > 0.0))
    throw std::domain_error("auxiliary_sets: p > 1 requires a profile floor eta > 0");
  const double mu_pow = std::pow(plan.mu, 1.0 + plan.epsilon);
  AuxiliarySets sets;
  sets.y_lo = -V;
  sets.y_hi = mu_pow * G * plan.D1 + V;
  sets.z_bypassed = (spec.p == 1.0);
  if (sets.z_bypassed) {
    sets.z_lo = sets.z_hi = 1.0;
  } else {
    const double top = spec.profile.at_zero() + 2.0 * V +
                       mu_pow * G * (plan.D1 + plan.D2) + plan.mu * (plan.T2 + 1.0);
    sets.z_lo = std::pow(eta, spec.p);
    sets.z_hi = std::pow(top, spec.p);
    if (!(sets.z_lo <= sets.z_hi))
      throw std::domain_error("auxiliary_sets: Z interval is empty");
  }
  return sets;
}

std::vector<double> quasi_gradient(std::span<const double> x, double y, double z,
                                   const QuasiGradientDraws& draws,
                                   const RiskSpec& spec, double mu) {
  const std::size_t N = x.size();
  if (draws.u1.size() != N || draws.u2.size() != N)
    throw std::invalid_argument("quasi_gradient: Gaussian block dimension mismatch");
  if (!(mu > 0.0)) throw std::invalid_argument("quasi_gradient: mu must be > 0");
  if (spec.p > 1.0 && !(z > 0.0))
    throw std::domain_error("quasi_gradient: z must be > 0 when p > 1");

  const auto& R = spec.profile;
  const double d1 = require_finite((draws.f_u1 - draws.f_base1) / mu, "Delta1");
  const double r_shifted = std::pow(R(draws.f_u2 - mu * draws.u - y), spec.p);
  const double r_base = std::pow(R(draws.f_base2 - y), spec.p);
  const double d2 = require_finite((r_shifted - r_base) / mu, "Delta2");
  const double factor =
      (spec.p == 1.0) ? 1.0 : std::pow(z, (1.0 - spec.p) / spec.p);

  std::vector<double> g(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double d1u1 = d1 * draws.u1[i];
    g[i] = require_finite(
        d1u1 + spec.c * factor * (draws.u2[i] + d1u1 * draws.u) * d2, "update direction");
  }
  return g;
}

SolverState step_with_draws(const SolverState& state, const Problem& problem,
                            const RiskSpec& spec, const SmoothingPlan& plan,
                            const AuxiliarySets& sets, const Schedule& schedule,
                            const StepDraws& draws) {
  const std::size_t N = problem.dim;
  if (state.x.size() != N) throw std::invalid_argument("step: state dimension mismatch");
  if (draws.u1.size() != N || draws.u2.size() != N)
    throw std::invalid_argument("step: Gaussian block dimension mismatch");
  const double mu = plan.mu;
  if (!(mu > 0.0)) throw std::invalid_argument("step: plan.mu must be > 0");

  const StepSizes steps = stepsizes(schedule, spec.p, state.n);
  SolverState next = state;

  std::vector<double> shifted(N);
  for (std::size_t i = 0; i < N; ++i) shifted[i] = state.x[i] + mu * draws.u1[i];
  const double f_u1 = evaluate(problem, shifted, draws.w1, next.counter);

  // First level: y tracks the smoothed mean cost. The snapshot y feeds the
  // remaining levels of this iteration.
  const double y_pre = state.y;
  next.y = project_interval(
      require_finite((1.0 - steps.beta) * y_pre + steps.beta * f_u1, "y update"),
      sets.y_lo, sets.y_hi);

  for (std::size_t i = 0; i < N; ++i) shifted[i] = state.x[i] + mu * draws.u2[i];
  const double f_u2 = evaluate(problem, shifted, draws.w2, next.counter);

  // Second level: z tracks the smoothed semideviation power.
  const double z_pre = state.z;
  const double r_shifted = std::pow(spec.profile(f_u2 - mu * draws.u - y_pre), spec.p);
  if (spec.p == 1.0) {
    next.z = 1.0;
  } else {
    next.z = project_interval(
        require_finite((1.0 - steps.gamma) * z_pre + steps.gamma * r_shifted,
                       "z update"),
        sets.z_lo, sets.z_hi);
  }

  const double f_base1 = evaluate(problem, state.x, draws.w1, next.counter);
  const double f_base2 = evaluate(problem, state.x, draws.w2, next.counter);

  // Third level: projected quasi-gradient step, built from the pre-update
  // (y, z) snapshots.
  QuasiGradientDraws qd;
  qd.u1 = draws.u1;
  qd.u2 = draws.u2;
  qd.u = draws.u;
  qd.f_u1 = f_u1;
  qd.f_base1 = f_base1;
  qd.f_u2 = f_u2;
  qd.f_base2 = f_base2;
  const std::vector<double> g = quasi_gradient(state.x, y_pre, z_pre, qd, spec, mu);

  std::vector<double> moved(N);
  for (std::size_t i = 0; i < N; ++i)
    moved[i] = require_finite(state.x[i] - steps.alpha * g[i], "x update");
  next.x = problem.region.project(moved);
  next.n = state.n + 1;
  return next;
}

SolverState step(const SolverState& state, const Problem& problem, const RiskSpec& spec,
                 const SmoothingPlan& plan, const AuxiliarySets& sets,
                 const Schedule& schedule, RandomStreams& streams) {
  const std::size_t N = problem.dim;
  StepDraws draws;
  draws.u1 = gaussian_vector(streams, N);
  draws.w1 = sample_scenario(problem, streams.w1());
  std::vector<double> joint = gaussian_vector(streams, N + 1);
  draws.u = joint.back();
  joint.pop_back();
  draws.u2 = std::move(joint);
  draws.w2 = sample_scenario(problem, streams.w2());
  return step_with_draws(state, problem, spec, plan, sets, schedule, draws);
}

RecordPlan RecordPlan::everything() { return RecordPlan(false); }
RecordPlan RecordPlan::thinned() { return RecordPlan(true); }

std::vector<std::uint64_t> RecordPlan::indices(std::uint64_t iterations) const {
  std::vector<std::uint64_t> out;
  if (!thin_ || iterations <= 10000) {
    out.reserve(iterations + 1);
    for (std::uint64_t n = 0; n <= iterations; ++n) out.push_back(n);
    return out;
  }
  for (std::uint64_t n = 0; n <= 100; ++n) out.push_back(n);
  double mark = 100.0;
  std::uint64_t last = 100;
  while (last < iterations) {
    mark *= 1.05;
    std::uint64_t n = std::max<std::uint64_t>(last + 1, static_cast<std::uint64_t>(mark));
    n = std::min(n, iterations);
    out.push_back(n);
    last = n;
  }
  return out;
}

Trajectory run(const Problem& problem, const RiskSpec& spec, const SmoothingPlan& plan,
               const Schedule& schedule, std::uint64_t iterations,
               RandomStreams& streams, const RunOptions& options) {
  const AuxiliarySets sets = auxiliary_sets(spec, plan, problem.G, problem.V);

  SolverState state;
  state.x = options.x0 ? problem.region.project(*options.x0)
                       : problem.region.interior_point();
  state.y = options.y0 ? project_interval(*options.y0, sets.y_lo, sets.y_hi)
                       : 0.5 * (sets.y_lo + sets.y_hi);
  if (sets.z_bypassed) {
    state.z = 1.0;
  } else {
    state.z = options.z0 ? project_interval(*options.z0, sets.z_lo, sets.z_hi)
                         : sets.z_lo;
  }

  const std::vector<std::uint64_t> wanted = options.plan.indices(iterations);
  Trajectory trajectory;
  trajectory.records.reserve(wanted.size());

  const auto record = [&](const SolverState& s) {
    const StepSizes steps = stepsizes(schedule, spec.p, s.n);
    TrajectoryRecord r;
    r.n = s.n;
    r.alpha = steps.alpha;
    r.beta = steps.beta;
    r.gamma = steps.gamma;
    r.x = s.x;
    r.y = s.y;
    r.z = s.z;
    r.oracle_calls = s.counter.calls;
    trajectory.records.push_back(std::move(r));
  };

  std::size_t cursor = 0;
  if (cursor < wanted.size() && wanted[cursor] == 0) {
    record(state);
    ++cursor;
  }

  const std::uint64_t half = (iterations + 1) / 2;  // ceil(n/2)
  const std::uint64_t avg_from = iterations - half + 1;
  std::vector<double> x_sum(problem.dim, 0.0);

  for (std::uint64_t n = 0; n < iterations; ++n) {
    state = step(state, problem, spec, plan, sets, schedule, streams);
    if (options.average && state.n >= avg_from)
      for (std::size_t i = 0; i < problem.dim; ++i) x_sum[i] += state.x[i];
    if (cursor < wanted.size() && wanted[cursor] == state.n) {
      record(state);
      ++cursor;
    }
  }

  if (options.average && iterations > 0) {
    for (double& v : x_sum) v /= static_cast<double>(half);
    trajectory.x_hat = std::move(x_sum);
  }
  return trajectory;
}

}  // namespace semidev
