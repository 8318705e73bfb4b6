#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "semidev/problems.hpp"
#include "semidev/risk.hpp"
#include "semidev/rng.hpp"
#include "semidev/smoothing.hpp"
#include "semidev/solver.hpp"

namespace semidev {

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

// MC mean of F(x + mu U, W) over fresh (U, W) pairs; mu = 0 estimates the
// plain expected cost.
McEstimate estimate_s_mu(const Problem& problem, std::span<const double> x, double mu,
                         RandomStreams& streams, std::size_t K);

// MC mean of (R(F(x + mu U, W) - y - mu U))^p with the (N+1)-dimensional
// joint Gaussian block [U; U].
McEstimate estimate_g_mu(const Problem& problem, const RiskSpec& spec,
                         std::span<const double> x, double y, double mu,
                         RandomStreams& streams, std::size_t K);

// Nested estimate of the full risk objective at smoothing radius mu (mu = 0
// gives the unsmoothed objective): an inner batch estimates the mean, an
// independent outer batch the p-th semideviation power, combined as
// mean + c * (outer)^(1/p) with delta-method error propagation.
McEstimate estimate_phi(const Problem& problem, const RiskSpec& spec,
                        std::span<const double> x, double mu, RandomStreams& streams,
                        std::size_t K);

struct TrackingPoint {
  std::uint64_t n = 0;
  double y_err_sq = 0.0;     // |y^n - s_mu(x^n)|^2
  double z_err_sq = 0.0;     // |z^n - g_mu(x^n, y^n)|^2
  bool z_applicable = true;  // false when the z-level is bypassed (p = 1)
};

// Squared tracking errors of the two auxiliary recursions at every record of
// a trajectory, with per-record MC budgets of K samples each.
std::vector<TrackingPoint> tracking_errors(const Trajectory& trajectory,
                                           const Problem& problem, const RiskSpec& spec,
                                           const SmoothingPlan& plan,
                                           RandomStreams& streams, std::size_t K);

// Budget of the brute-force minimizer search: projected descent on the
// nested risk estimate with central finite differences sharing common random
// numbers per iteration.
struct RefBudget {
  double fd_step = 1e-3;
  std::size_t batch = 100000;
  std::size_t iterations = 500;
  double step_scale = 1.0;  // descent step at iteration k is step_scale/(k+1)
  double grad_tol = 0.5;    // stabilization threshold on the final gradient norm
  std::uint64_t seed = 0x0b5e55ed5eedull;  // fixed so the oracle is reproducible
};

// Minimizer of the (smoothed when mu > 0) risk objective over the feasible
// set: the declared analytic optimum when the risk penalty is off, otherwise
// the descent search above. Throws when the final gradient estimate exceeds
// grad_tol.
std::vector<double> reference_optimum(const Problem& problem, const RiskSpec& spec,
                                      double mu, const RefBudget& budget = {});

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::uint64_t n_start = 0;
  std::uint64_t n_end = 0;
};

// Least-squares slope of log(value) against log(n) over the trailing
// window_fraction of the series (points with n = 0 are excluded up front).
// Requires at least 10 window points and positive values.
RateFit fit_rate(const std::vector<std::pair<std::uint64_t, double>>& series,
                 double window_fraction);

// Iterations sufficient for a target accuracy delta given the burn-in n_o and
// the caller's rate constant:
//   p = 1: max{n_o, ceil((2 Sigma/delta (n_o + 3))^(3/2))},
//   p > 1: max{n_o, ceil((2 Sigma/delta (n_o + 2/(1-eps)))^(2/(1-eps)))}.
// The cost class does not change the shape; it is accepted because the
// caller's Sigma carries the class-dependent constants.
std::uint64_t iteration_budget(double p, CostClass cost_class, double delta,
                               double epsilon, std::size_t n_o, double Sigma);

}  // namespace semidev
