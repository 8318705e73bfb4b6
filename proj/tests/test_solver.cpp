#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "semidev/problems.hpp"
#include "semidev/risk.hpp"
#include "semidev/rng.hpp"
#include "semidev/smoothing.hpp"
#include "semidev/solver.hpp"

using namespace semidev;

namespace {

RiskSpec relu_spec(double p, double c, double eta) {
  return RiskSpec::make(p, c, RiskProfile::relu_shift(eta));
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("schedule construction validates parameter domains") {
  CHECK_NOTHROW(Schedule::convex(0.5, 0.6, 0.4));
  CHECK_THROWS_AS(Schedule::convex(1.0, 0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(Schedule::convex(-0.1, 0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(Schedule::convex(0.5, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(Schedule::convex(0.5, 0.4, 0.6), std::invalid_argument);  // delta < zeta
  CHECK_THROWS_AS(Schedule::strongly_convex(0.0), std::invalid_argument);
  CHECK_THROWS_AS(Schedule::strongly_convex(1.0, 1.2), std::invalid_argument);
  CHECK_NOTHROW(Schedule::constant(0.5, 0.05, 0.3, 0.3));
  CHECK_THROWS_AS(Schedule::constant(0.5, 0.3, 0.3, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(Schedule::constant(0.5, 0.05, 0.0, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(Schedule::constant(0.0, 0.05, 0.3, 0.3), std::invalid_argument);
}

TEST_CASE("stepsize examples pinned to the schedule formulas") {
  {
    const Schedule s = Schedule::strongly_convex(2.0);
    const StepSizes at8 = stepsizes(s, 1.0, 8);
    CHECK(at8.alpha == doctest::Approx(0.0625).epsilon(1e-15));
    CHECK(at8.beta == doctest::Approx(0.25).epsilon(1e-12));
    const StepSizes at0 = stepsizes(s, 1.0, 0);
    CHECK(at0.alpha == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(at0.beta == doctest::Approx(1.0));
    CHECK(at0.gamma == doctest::Approx(1.0));
  }
  {
    const Schedule s = Schedule::convex(0.0, 0.5, 0.5);
    const StepSizes at16 = stepsizes(s, 2.0, 16);
    CHECK(at16.alpha == doctest::Approx(std::pow(16.0, -7.0 / 8.0)).epsilon(1e-15));
    CHECK(at16.beta == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(at16.gamma == doctest::Approx(0.25).epsilon(1e-15));
    const StepSizes at0 = stepsizes(s, 2.0, 0);
    CHECK(at0.alpha == doctest::Approx(1.0));
    CHECK(at0.beta == doctest::Approx(1.0));
    CHECK(at0.gamma == doctest::Approx(1.0));
  }
  {
    const Schedule s = Schedule::constant(2.0, 0.1, 0.3, 0.4);
    for (std::uint64_t n : {std::uint64_t{0}, std::uint64_t{5}}) {
      const StepSizes c = stepsizes(s, 1.0, n);
      CHECK(c.alpha == doctest::Approx(0.05));
      CHECK(c.beta == doctest::Approx(0.3));
      CHECK(c.gamma == doctest::Approx(0.4));
    }
  }
  // beta_n and gamma_n stay inside (0, 1] across variants and orders.
  for (double p : {1.0, 2.0}) {
    const Schedule variants[] = {Schedule::convex(0.3, 0.7, 0.6),
                                 Schedule::strongly_convex(0.5, 0.3, 0.7)};
    for (const Schedule& s : variants) {
      for (std::uint64_t n = 1; n <= 100; ++n) {
        const StepSizes v = stepsizes(s, p, n);
        CHECK(v.beta > 0.0);
        CHECK(v.beta <= 1.0);
        CHECK(v.gamma > 0.0);
        CHECK(v.gamma <= 1.0);
      }
    }
  }
}

TEST_CASE("burn-in index") {
  CHECK(burn_in(2.0 / 3.0) == 5);
  {
    // Independent numeric oracle for tau2 = 3/4.
    const double tau2 = 0.75;
    const double expected =
        std::ceil(1.0 / (1.0 - std::pow(tau2, 1.0 / (tau2 + 1.0))));
    CHECK(burn_in(tau2) == static_cast<std::size_t>(expected));
  }
  for (double tau2 : {0.05, 0.2, 0.4, 0.6, 0.8, 0.95})
    CHECK(burn_in(tau2) >= 3);
  CHECK_THROWS_AS(burn_in(0.0), std::invalid_argument);
  CHECK_THROWS_AS(burn_in(1.0), std::invalid_argument);
}

TEST_CASE("auxiliary interval construction") {
  const SmoothingPlan plan = SmoothingPlan::make(CostClass::Lipschitz, 0.1, 0.8, 1.0, 0.0);
  {
    const AuxiliarySets sets = auxiliary_sets(relu_spec(1.0, 0.5, 0.0), plan, 1.0, 1.0);
    CHECK(sets.y_lo == doctest::Approx(-1.0));
    CHECK(sets.y_hi == doctest::Approx(1.08).epsilon(1e-12));
    CHECK(sets.z_bypassed);
  }
  {
    const AuxiliarySets sets = auxiliary_sets(relu_spec(2.0, 0.5, 0.1), plan, 1.0, 1.0);
    CHECK_FALSE(sets.z_bypassed);
    CHECK(sets.z_lo == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(sets.z_hi == doctest::Approx(5.6644).epsilon(1e-12));
  }
  const RiskSpec p2_eta0 =
      RiskSpec::make_diagnostic(2.0, 0.5, RiskProfile::relu_shift(0.0));
  CHECK_THROWS_AS(auxiliary_sets(p2_eta0, plan, 1.0, 1.0), std::domain_error);
}

TEST_CASE("quasi-gradient branch structure") {
  QuasiGradientDraws draws;
  draws.u1 = {1.0, -2.0};
  draws.u2 = {0.5, 0.25};
  draws.u = 2.0;
  draws.f_u1 = 3.0;
  draws.f_base1 = 1.0;
  draws.f_u2 = 4.0;
  draws.f_base2 = 2.0;
  const std::vector<double> x = {0.0, 0.0};
  const double mu = 0.5;
  const double d1 = (3.0 - 1.0) / 0.5;  // 4

  {
    // Penalty off: direction is Delta1 U1 alone.
    const std::vector<double> g =
        quasi_gradient(x, 0.0, 1.0, draws, relu_spec(1.0, 0.0, 0.0), mu);
    CHECK(g[0] == doctest::Approx(d1 * 1.0));
    CHECK(g[1] == doctest::Approx(d1 * -2.0));
  }
  {
    // p = 1: factor z^0 = 1 regardless of z.
    const RiskSpec spec = relu_spec(1.0, 1.0, 0.0);
    const double y = 0.5;
    const double r_shift = std::max(4.0 - mu * 2.0 - y, 0.0);  // R(f_u2 - mu u - y)
    const double r_base = std::max(2.0 - y, 0.0);
    const double d2 = (r_shift - r_base) / mu;
    const std::vector<double> g = quasi_gradient(x, y, 1.0, draws, spec, mu);
    CHECK(g[0] == doctest::Approx(d1 * 1.0 + (0.5 + d1 * 1.0 * 2.0) * d2));
    CHECK(g[1] == doctest::Approx(d1 * -2.0 + (0.25 + d1 * -2.0 * 2.0) * d2));
  }
  {
    // p = 2, z = 4: factor z^{-1/2} = 0.5.
    const RiskSpec spec = relu_spec(2.0, 1.0, 0.1);
    const double y = 0.5;
    const double r_shift = std::max(4.0 - mu * 2.0 - y, 0.0) + 0.1;
    const double r_base = std::max(2.0 - y, 0.0) + 0.1;
    const double d2 = (r_shift * r_shift - r_base * r_base) / mu;
    const std::vector<double> g = quasi_gradient(x, y, 4.0, draws, spec, mu);
    CHECK(g[0] == doctest::Approx(d1 * 1.0 + 0.5 * (0.5 + d1 * 1.0 * 2.0) * d2));
    CHECK(g[1] == doctest::Approx(d1 * -2.0 + 0.5 * (0.25 + d1 * -2.0 * 2.0) * d2));
    CHECK_THROWS_AS(quasi_gradient(x, y, 0.0, draws, spec, mu), std::domain_error);
  }
}

TEST_CASE("hand-traced single step of the scalar tracking problem") {
  // F = 0.5 (x - w)^2, p = 1, c = 0, x0 = 2, y0 = 0, mu = 0.5, alpha0 = beta0 = 1,
  // forced draws U1 = 1, w1 = 0: F(2.5, 0) = 3.125, F(2, 0) = 2, Delta1 = 2.25,
  // x1 = 2 - 2.25 = -0.25, y1 = 3.125.
  Problem p;
  p.name = "scalar-tracking";
  p.dim = 1;
  p.scenario_dim = 1;
  p.region = FeasibleRegion::box({-10.0}, {10.0});
  p.cost_class = CostClass::Smooth;
  p.G = 1.0;
  p.V = 10.0;
  p.V_p = 10.0;
  p.sigma = 1.0;
  p.sample = [](Rng&) { return std::vector<double>{0.0}; };
  p.cost = [](std::span<const double> x, std::span<const double> w) {
    return 0.5 * (x[0] - w[0]) * (x[0] - w[0]);
  };

  const RiskSpec spec = relu_spec(1.0, 0.0, 0.0);
  const SmoothingPlan plan = SmoothingPlan::make(CostClass::Smooth, 0.5, 1.0, 2.0, 0.0);
  AuxiliarySets sets;
  sets.y_lo = -10.0;
  sets.y_hi = 10.0;
  sets.z_bypassed = true;
  const Schedule schedule = Schedule::strongly_convex(1.0);  // alpha0 = 1, beta0 = 1

  SolverState state;
  state.x = {2.0};
  state.y = 0.0;
  state.z = 1.0;
  state.n = 0;

  StepDraws draws;
  draws.u1 = {1.0};
  draws.u2 = {0.3};
  draws.u = -0.2;
  draws.w1 = {0.0};
  draws.w2 = {0.0};

  const SolverState next = step_with_draws(state, p, spec, plan, sets, schedule, draws);
  CHECK(next.x[0] == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(next.y == doctest::Approx(3.125).epsilon(1e-15));
  CHECK(next.z == doctest::Approx(1.0));
  CHECK(next.n == 1);
  CHECK(next.counter.calls == 4);
}

TEST_CASE("constant cost leaves x in place and y converges to the constant") {
  Problem p;
  p.name = "constant-cost";
  p.dim = 2;
  p.scenario_dim = 1;
  p.region = FeasibleRegion::box({-5, -5}, {5, 5});
  p.cost_class = CostClass::Lipschitz;
  p.G = 0.0;
  p.V = 7.0;
  p.V_p = 7.0;
  p.sample = [](Rng&) { return std::vector<double>{0.0}; };
  p.cost = [](std::span<const double>, std::span<const double>) { return 7.0; };

  const RiskSpec spec = relu_spec(1.0, 0.0, 0.0);
  const SmoothingPlan plan = SmoothingPlan::make(CostClass::Lipschitz, 0.5,
                                                 std::sqrt(2.0 / M_PI) * 1.4, 1.5, 0.0);
  const AuxiliarySets sets = auxiliary_sets(spec, plan, p.G, p.V);
  const Schedule schedule = Schedule::strongly_convex(1.0);

  SolverState state;
  state.x = {1.0, -2.0};
  state.y = 0.0;
  state.z = 1.0;
  state.n = 3;

  StepDraws draws;
  draws.u1 = {0.7, -0.4};
  draws.u2 = {0.1, 0.2};
  draws.u = 0.5;
  draws.w1 = {0.0};
  draws.w2 = {0.0};

  const SolverState next = step_with_draws(state, p, spec, plan, sets, schedule, draws);
  CHECK(next.x[0] == doctest::Approx(1.0));
  CHECK(next.x[1] == doctest::Approx(-2.0));
  const double beta3 = stepsizes(schedule, 1.0, 3).beta;
  CHECK(next.y == doctest::Approx((1.0 - beta3) * 0.0 + beta3 * 7.0));
}

TEST_CASE("run keeps the state feasible and counts four calls per iteration") {
  const Problem qt = quadratic_tracking({0.5, -0.5});
  const RiskSpec spec = relu_spec(2.0, 0.5, 0.1);
  RandomStreams plan_streams(51);
  const SmoothingPlan plan = make_plan(qt, 0.1, plan_streams, 2000);
  const AuxiliarySets sets = auxiliary_sets(spec, plan, qt.G, qt.V);
  const Schedule schedule = Schedule::strongly_convex(qt.sigma);

  RandomStreams streams(52);
  const Trajectory traj = run(qt, spec, plan, schedule, 500, streams);
  REQUIRE(traj.records.size() == 501);
  for (const TrajectoryRecord& r : traj.records) {
    CHECK(qt.region.contains(r.x, 1e-9));
    CHECK(r.y >= -qt.V - 1e-12);
    CHECK(r.z >= sets.z_lo - 1e-12);
    CHECK(r.z <= sets.z_hi + 1e-12);
    CHECK(r.oracle_calls == 4 * r.n);
  }
}

TEST_CASE("p = 1 keeps z pinned at one over a whole run") {
  const Problem nv = newsvendor();
  const RiskSpec spec = relu_spec(1.0, 1.0, 0.0);
  RandomStreams plan_streams(61);
  const SmoothingPlan plan = make_plan(nv, 0.1, plan_streams);
  const Schedule schedule = Schedule::convex(0.5, 0.5, 0.5);
  RandomStreams streams(62);
  const Trajectory traj = run(nv, spec, plan, schedule, 300, streams);
  for (const TrajectoryRecord& r : traj.records) CHECK(r.z == 1.0);
}

TEST_CASE("zero iterations produce only the initial record") {
  const Problem nv = newsvendor();
  const RiskSpec spec = relu_spec(1.0, 0.0, 0.0);
  RandomStreams plan_streams(71);
  const SmoothingPlan plan = make_plan(nv, 0.2, plan_streams);
  const Schedule schedule = Schedule::convex(0.5, 0.5, 0.5);
  RandomStreams streams(72);
  const Trajectory traj = run(nv, spec, plan, schedule, 0, streams);
  REQUIRE(traj.records.size() == 1);
  CHECK(traj.records[0].n == 0);
  CHECK(traj.records[0].oracle_calls == 0);
}

TEST_CASE("identical seeds give identical trajectories") {
  const Problem qt = quadratic_tracking({1.0});
  const RiskSpec spec = relu_spec(1.0, 0.5, 0.0);
  RandomStreams plan_streams(81);
  const SmoothingPlan plan = make_plan(qt, 0.1, plan_streams, 2000);
  const Schedule schedule = Schedule::strongly_convex(qt.sigma);
  RandomStreams s1(83), s2(83);
  const Trajectory a = run(qt, spec, plan, schedule, 200, s1);
  const Trajectory b = run(qt, spec, plan, schedule, 200, s2);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].x == b.records[i].x);
    CHECK(a.records[i].y == b.records[i].y);
    CHECK(a.records[i].z == b.records[i].z);
  }
}

TEST_CASE("risk-neutral update direction is exactly Delta1 U1") {
  const Problem qt = quadratic_tracking({0.0, 0.0});
  const RiskSpec spec = relu_spec(1.0, 0.0, 0.0);
  const SmoothingPlan plan = SmoothingPlan::make(CostClass::Smooth, 0.2, 2.0,
                                                 std::sqrt(8.0), 3.0);
  const AuxiliarySets sets = auxiliary_sets(spec, plan, qt.G, qt.V);
  const Schedule schedule = Schedule::strongly_convex(qt.sigma);

  SolverState state;
  state.x = {1.0, 1.0};
  state.y = 0.3;
  state.z = 1.0;
  state.n = 2;

  StepDraws draws;
  draws.u1 = {0.9, -1.1};
  draws.u2 = {0.4, 0.6};
  draws.u = -0.7;
  draws.w1 = {0.25, -0.5};
  draws.w2 = {1.5, 0.75};

  const SolverState next = step_with_draws(state, qt, spec, plan, sets, schedule, draws);

  OracleCounter scratch;
  std::vector<double> xu(2);
  for (int i = 0; i < 2; ++i) xu[i] = state.x[i] + plan.mu * draws.u1[i];
  const double d1 =
      (evaluate(qt, xu, draws.w1, scratch) - evaluate(qt, state.x, draws.w1, scratch)) /
      plan.mu;
  const double alpha = stepsizes(schedule, 1.0, 2).alpha;
  std::vector<double> expected(2);
  for (int i = 0; i < 2; ++i) expected[i] = state.x[i] - alpha * d1 * draws.u1[i];
  const std::vector<double> projected = qt.region.project(expected);
  CHECK(next.x[0] == doctest::Approx(projected[0]).epsilon(1e-14));
  CHECK(next.x[1] == doctest::Approx(projected[1]).epsilon(1e-14));
}

TEST_CASE("subharmonic schedules satisfy the summability pattern on prefixes") {
  // alpha must diverge in sum while alpha^2, beta^2 and alpha^2/beta stay
  // summable; checked on prefixes of the epsilon = 0.5 convex schedule.
  const Schedule s = Schedule::convex(0.5, 0.6, 0.5);
  double sum_alpha = 0.0, snapshot_1e3 = 0.0;
  double convergent = 0.0;
  for (std::uint64_t n = 1; n <= 1000000; ++n) {
    const StepSizes v = stepsizes(s, 1.0, n);
    sum_alpha += v.alpha;
    convergent +=
        v.alpha * v.alpha + v.beta * v.beta + (v.alpha * v.alpha) / v.beta;
    if (n == 1000) snapshot_1e3 = sum_alpha;
  }
  CHECK(sum_alpha > 2.0 * snapshot_1e3);  // divergent part keeps growing
  CHECK(convergent < 50.0);               // convergent part stays bounded
}

TEST_CASE("record thinning keeps the head, geometric spine, and tail") {
  const std::vector<std::uint64_t> all = RecordPlan::everything().indices(12);
  REQUIRE(all.size() == 13);
  CHECK(all.front() == 0);
  CHECK(all.back() == 12);

  const std::vector<std::uint64_t> small = RecordPlan::thinned().indices(10000);
  CHECK(small.size() == 10001);  // thinning only engages beyond 1e4

  const std::vector<std::uint64_t> big = RecordPlan::thinned().indices(100000);
  CHECK(big.size() < 400);
  CHECK(big.front() == 0);
  CHECK(big.back() == 100000);
  for (std::uint64_t i = 0; i <= 100; ++i) CHECK(big[i] == i);
  for (std::size_t i = 1; i < big.size(); ++i) CHECK(big[i] > big[i - 1]);
}

TEST_CASE("averaging covers the trailing half of the iterates") {
  const Problem qt = quadratic_tracking({0.0});
  const RiskSpec spec = relu_spec(1.0, 0.0, 0.0);
  RandomStreams plan_streams(91);
  const SmoothingPlan plan = make_plan(qt, 0.1, plan_streams, 2000);
  const Schedule schedule = Schedule::strongly_convex(qt.sigma);
  RandomStreams streams(92);
  RunOptions options;
  options.average = true;
  const Trajectory traj = run(qt, spec, plan, schedule, 9, streams, options);
  REQUIRE(traj.x_hat.has_value());
  // ceil(9/2) = 5 trailing iterates: n = 5..9.
  double mean = 0.0;
  for (std::size_t n = 5; n <= 9; ++n) mean += traj.records[n].x[0];
  mean /= 5.0;
  CHECK((*traj.x_hat)[0] == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("strongly convex run closes most of the initial distance") {
  const Problem qt = quadratic_tracking({1.0, -1.0});
  const RiskSpec spec = relu_spec(2.0, 0.5, 0.1);
  RandomStreams plan_streams(95);
  const SmoothingPlan plan = make_plan(qt, 0.05, plan_streams, 2000);
  const Schedule schedule = Schedule::strongly_convex(qt.sigma);
  RandomStreams streams(96);
  RunOptions options;
  options.x0 = std::vector<double>{5.0, 3.0};  // projected onto the ball
  const Trajectory traj = run(qt, spec, plan, schedule, 10000, streams, options);
  const std::vector<double> star = {1.0, -1.0};  // risk term is symmetric around m
  const double initial = sq_dist(traj.records.front().x, star);
  const double last = sq_dist(traj.records.back().x, star);
  CHECK(last * 10.0 <= initial);
}

}  // TEST_SUITE
