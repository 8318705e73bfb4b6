#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semidev/region.hpp"
#include "semidev/rng.hpp"

namespace semidev {

enum class CostClass { Lipschitz, Smooth };

struct OracleCounter {
  std::uint64_t calls = 0;
};

// A stochastic cost with zeroth-order access only: a scenario sampler, a
// deterministic evaluator F(x, w), and the declared regularity metadata the
// solver needs before iteration 0 (class, G, V, V_p, strong-convexity
// modulus sigma under the alpha(1-alpha)*sigma*||x-y||^2 convention).
struct Problem {
  std::string name;
  std::size_t dim = 0;           // decision dimension N
  std::size_t scenario_dim = 0;  // dimension of W
  FeasibleRegion region = FeasibleRegion::all_space(1);
  CostClass cost_class = CostClass::Lipschitz;

  double G = 0.0;      // class-specific regularity constant
  double V = 0.0;      // sup_x ||F(x, W)||_{L2}
  double V_p = 0.0;    // sup_x ||F(x, W)||_{L4} (valid for every order p <= 2)
  double sigma = 0.0;  // 0 when merely convex

  std::function<std::vector<double>(Rng&)> sample;
  std::function<double(std::span<const double>, std::span<const double>)> cost;

  // Risk-neutral expected cost s(x) = E F(x, W), when available in closed form.
  std::function<double(std::span<const double>)> analytic_s;
  // Risk-neutral minimizer, when known.
  std::optional<std::vector<double>> analytic_optimum;
};

// The counted oracle: every cost evaluation anywhere in the solver goes
// through here, so the calls-per-iteration accounting is falsifiable.
double evaluate(const Problem& problem, std::span<const double> x,
                std::span<const double> w, OracleCounter& counter);

std::vector<double> sample_scenario(const Problem& problem, Rng& stream);

// ---------------------------------------------------------------------------
// Built-in benchmark problems
// ---------------------------------------------------------------------------

// Scalar |x - W| with W uniform on a finite level set and a box decision set.
// Lipschitz with G = 1; V, V_p exact at the box endpoints.
Problem newsvendor(std::vector<double> levels = {0.0, 1.0},
                   double x_lo = -2.0, double x_hi = 2.0);

// 0.5 ||x - W||^2 with W ~ N(m, I) truncated to ||W - m|| <= 10 sqrt(N) and
// an l2-ball decision set around m. Smooth with G = 1/2, sigma = 1/2.
Problem quadratic_tracking(std::vector<double> m, double radius = 5.0);

// ||y + W - A x||^2 with W zero-mean uniform noise on [-hw, hw]^rows.
// Smooth; the smoothing gap is exactly mu^2 tr(A^T A) when hw = 0.
Problem quadratic_fit(std::vector<std::vector<double>> A, std::vector<double> y,
                      double noise_half_width = 0.0, double radius = 5.0);

// max_i (a_i^T x - W_i) with W_i i.i.d. uniform on [-hw, hw]; nonsmooth
// Lipschitz with G = max_i ||a_i||_2.
Problem piecewise_linear(std::vector<std::vector<double>> a,
                         double noise_half_width = 0.5, double radius = 2.0);

}  // namespace semidev
