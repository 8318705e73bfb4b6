// Microbenchmarks for the hot paths: Gaussian draws, single solver steps on
// both risk-order branches, direction assembly, and the scalar MC estimators
// the diagnostics lean on. Numbers here guide budget choices (pair_k,
// diagnostic K, replication counts); nothing asserts.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "semidev/diagnostics.hpp"
#include "semidev/problems.hpp"
#include "semidev/risk.hpp"
#include "semidev/rng.hpp"
#include "semidev/smoothing.hpp"
#include "semidev/solver.hpp"

namespace {

using namespace semidev;

void bench_gaussian_vector(benchmark::State& state) {
  RandomStreams streams(0xbe9c4);
  const std::size_t dim = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    std::vector<double> v = gaussian_vector(streams, dim);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bench_gaussian_vector)->Arg(2)->Arg(8)->Arg(64);

// One full iteration (4 oracle calls) of the tracking problem in dimension 5,
// matching the long-run experiment setups.
void bench_step(benchmark::State& state, double order) {
  const Problem problem = quadratic_tracking(std::vector<double>(5, 0.0));
  const RiskSpec spec =
      order == 1.0 ? RiskSpec::make(1.0, 0.5, RiskProfile::relu_shift(0.0))
                   : RiskSpec::make(2.0, 0.5, RiskProfile::relu_shift(0.1));
  const SmoothingPlan plan =
      SmoothingPlan::make(CostClass::Smooth, 0.05, 5.0, std::sqrt(35.0), 1.0);
  const AuxiliarySets sets = auxiliary_sets(spec, plan, problem.G, problem.V);
  const Schedule schedule = Schedule::strongly_convex(problem.sigma);
  RandomStreams streams(0xbe9c5);

  SolverState s;
  s.x = problem.region.interior_point();
  s.y = 0.5 * (sets.y_lo + sets.y_hi);
  s.z = sets.z_lo;
  for (auto _ : state) {
    s = step(s, problem, spec, plan, sets, schedule, streams);
    benchmark::DoNotOptimize(s.x.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK_CAPTURE(bench_step, first_order, 1.0);
BENCHMARK_CAPTURE(bench_step, second_order, 2.0);

// Direction assembly alone, with the oracle values already in hand.
void bench_quasi_gradient(benchmark::State& state) {
  const RiskSpec spec = RiskSpec::make(2.0, 0.5, RiskProfile::relu_shift(0.1));
  const std::vector<double> x = {0.4, -0.3, 0.0, 0.7, -1.1};
  QuasiGradientDraws draws;
  draws.u1 = {0.3, -1.2, 0.8, 0.1, -0.5};
  draws.u2 = {-0.9, 0.4, 1.3, -0.2, 0.6};
  draws.u = 0.7;
  draws.f_u1 = 1.8;
  draws.f_base1 = 1.5;
  draws.f_u2 = 2.1;
  draws.f_base2 = 1.6;
  for (auto _ : state) {
    std::vector<double> g = quasi_gradient(x, 1.2, 0.8, draws, spec, 0.05);
    benchmark::DoNotOptimize(g.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bench_quasi_gradient);

void bench_estimate_s_mu(benchmark::State& state) {
  const Problem nv = newsvendor();
  RandomStreams streams(0xbe9c6);
  const std::vector<double> x = {0.3};
  const std::size_t K = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    McEstimate est = estimate_s_mu(nv, x, 0.1, streams, K);
    benchmark::DoNotOptimize(est.value);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bench_estimate_s_mu)->Arg(1 << 12)->Arg(1 << 15);

void bench_smoothed_gradient(benchmark::State& state) {
  const ScalarField f = [](std::span<const double> v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return s;
  };
  RandomStreams streams(0xbe9c7);
  const std::vector<double> x = {1.0, -1.0, 0.5, 2.0};
  for (auto _ : state) {
    MeanVectorEstimate est = smoothed_gradient(f, x, 0.1, streams.gauss(), 4096);
    benchmark::DoNotOptimize(est.value.data());
  }
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(bench_smoothed_gradient);

}  // namespace

BENCHMARK_MAIN();
