#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "semidev/problems.hpp"
#include "semidev/risk.hpp"
#include "semidev/rng.hpp"

namespace semidev {

// Everything the surrogate-gap machinery needs to know about the Gaussian
// perturbation: the radius mu, the divergence efficiency exponent epsilon,
// and the divergence-pair moments D1 = E d(U), D2 = ||d(U)||_{L2},
// T2 = sup_x ||t2(x, U)||_{L2}.
struct SmoothingPlan {
  double mu = 0.0;
  double epsilon = 0.0;
  double D1 = 0.0;
  double D2 = 0.0;
  double T2 = 0.0;
  CostClass cost_class = CostClass::Lipschitz;

  // Validates mu > 0, D1 <= D2, and the class rules (Lipschitz pairs have
  // epsilon = 0 and T2 = 0; smooth pairs have epsilon = 1).
  static SmoothingPlan make(CostClass cost_class, double mu, double D1, double D2,
                            double T2);
};

struct PairConstantsReport {
  double D1 = 0.0;
  double D2 = 0.0;
  double T2 = 0.0;
  double T2_stderr = 0.0;  // zero when T2 is structural (Lipschitz class)
};

struct MeanEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct MeanVectorEstimate {
  std::vector<double> value;
  std::vector<double> std_error;
};

using ScalarField = std::function<double(std::span<const double>)>;

// Sample mean of f(x + mu * U) over K Gaussian draws.
MeanEstimate smoothed_value(const ScalarField& f, std::span<const double> x,
                            double mu, Rng& stream, std::size_t K);

// Single-point gradient estimator: mean of [(f(x + mu U) - f(x)) / mu] * U.
MeanVectorEstimate smoothed_gradient(const ScalarField& f, std::span<const double> x,
                                     double mu, Rng& stream, std::size_t K);

// Divergence-pair moments. The Lipschitz pair (d = ||.||_2) is closed form:
// D1 = sqrt(2) Gamma((N+1)/2) / Gamma(N/2), D2 = sqrt(N), T2 = 0. The smooth
// pair (d = ||.||_2^2) has D1 = N, D2 = sqrt(N (N+2)) closed form and T2
// estimated as the sup over a 32-point feasible grid of the Monte Carlo
// scenario gradient second moment (central differences, step 1e-5).
PairConstantsReport pair_constants(CostClass cost_class, std::size_t N,
                                   const Problem* problem, RandomStreams& streams,
                                   std::size_t K = 20000);

// pair_constants + choose of mu assembled into a validated plan.
SmoothingPlan make_plan(const Problem& problem, double mu, RandomStreams& streams,
                        std::size_t K = 20000);

// Uniform bound on |phi_mu - phi| over the feasible set:
//   mu^(1+eps) G D1 + c C(mu) (mu^(1+eps) G (D1 + D2) + mu (T2 + 1)),
// C(mu) = 1 for p = 1 and eta^(-p/2) (R0 + 2V + mu^(1+eps) G (D1+D2)
// + mu (T2+1))^(p/2) for p in (1,2]. Throws for p > 1 with eta = 0.
double surrogate_gap_bound(const RiskSpec& spec, const SmoothingPlan& plan, double G,
                           double V, double R0);

// The limiting-accuracy constant
//   2 max{ G D1, C(mu) (mu^eps G (D1 + D2) + (T2 + 1)) };
// the optimality neighborhood radius is sigma_o * mu * (mu^eps + c).
// V and R0 feed C(mu) and are ignored when p = 1.
double sigma_o(const RiskSpec& spec, const SmoothingPlan& plan, double G, double V,
               double R0);

// Dimension-aware perturbation radius: M / sqrt(N) for the Lipschitz class,
// M / N^(3/2) for the smooth class.
double choose_mu(CostClass cost_class, std::size_t N, double M);

using Divergence = std::function<double(std::span<const double>)>;
using Remainder = std::function<double(std::span<const double>, std::span<const double>)>;

// Max over the grids of |f(x+u) - f(x) - T(x,u)| - L * D(u); a nonpositive
// result means the shifted-Lipschitz property holds on the grid.
double slipschitz_check(const ScalarField& f, const Divergence& D, const Remainder& T,
                        double L, const std::vector<std::vector<double>>& x_grid,
                        const std::vector<std::vector<double>>& u_grid);

}  // namespace semidev
