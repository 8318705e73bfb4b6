#include "semidev/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "chunked_mc.hpp"

namespace semidev {

namespace {

void check_mc_args(double mu, std::size_t K, bool positive_mu) {
  if (positive_mu ? !(mu > 0.0) : !(mu >= 0.0))
    throw std::invalid_argument("smoothing: invalid mu");
  if (K < 2) throw std::invalid_argument("smoothing: K must be >= 2");
}

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw std::runtime_error(std::string("smoothing: non-finite ") + what);
  return v;
}

}  // namespace

SmoothingPlan SmoothingPlan::make(CostClass cost_class, double mu, double D1, double D2,
                                  double T2) {
  if (!(mu > 0.0)) throw std::invalid_argument("SmoothingPlan: mu must be > 0");
  if (!(D1 >= 0.0 && D2 >= 0.0 && T2 >= 0.0))
    throw std::invalid_argument("SmoothingPlan: constants must be nonnegative");
  if (D1 > D2 * (1.0 + 1e-12))
    throw std::invalid_argument("SmoothingPlan: D1 must not exceed D2");
  if (cost_class == CostClass::Lipschitz && T2 != 0.0)
    throw std::invalid_argument("SmoothingPlan: Lipschitz pair has T2 = 0");
  SmoothingPlan plan;
  plan.mu = mu;
  plan.epsilon = (cost_class == CostClass::Lipschitz) ? 0.0 : 1.0;
  plan.D1 = D1;
  plan.D2 = D2;
  plan.T2 = T2;
  plan.cost_class = cost_class;
  return plan;
}

MeanEstimate smoothed_value(const ScalarField& f, std::span<const double> x, double mu,
                            Rng& stream, std::size_t K) {
  check_mc_args(mu, K, /*positive_mu=*/false);
  const std::uint64_t base = stream.next_u64();
  const std::size_t n = x.size();
  const std::vector<double> x0(x.begin(), x.end());
  auto stats = detail::mc_scalar(base, K, [&](Rng& rng) {
    std::vector<double> pt = x0;
    if (mu > 0.0) {
      for (std::size_t i = 0; i < n; ++i) pt[i] += mu * rng.normal();
    }
    return checked(f(pt), "smoothed value sample");
  });
  return {stats.mean, stats.stderr_};
}

MeanVectorEstimate smoothed_gradient(const ScalarField& f, std::span<const double> x,
                                     double mu, Rng& stream, std::size_t K) {
  check_mc_args(mu, K, /*positive_mu=*/true);
  const std::uint64_t base = stream.next_u64();
  const std::size_t n = x.size();
  const std::vector<double> x0(x.begin(), x.end());
  const double f_base = checked(f(x0), "base value");
  auto stats = detail::mc_vector(base, K, n, [&](Rng& rng, std::vector<double>& out) {
    std::vector<double> pt(n);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = rng.normal();
      pt[i] = x0[i] + mu * out[i];
    }
    const double d = (checked(f(pt), "perturbed value") - f_base) / mu;
    for (std::size_t i = 0; i < n; ++i) out[i] *= d;
  });
  return {std::move(stats.mean), std::move(stats.stderr_)};
}

PairConstantsReport pair_constants(CostClass cost_class, std::size_t N,
                                   const Problem* problem, RandomStreams& streams,
                                   std::size_t K) {
  if (N < 1) throw std::invalid_argument("pair_constants: N must be >= 1");
  PairConstantsReport report;
  const double nd = static_cast<double>(N);
  if (cost_class == CostClass::Lipschitz) {
    // E ||U||_2 is the chi-distribution mean; exact, tighter than sqrt(N).
    report.D1 = std::exp(0.5 * std::log(2.0) +
                         std::lgamma(0.5 * (nd + 1.0)) - std::lgamma(0.5 * nd));
    report.D2 = std::sqrt(nd);
    report.T2 = 0.0;
    return report;
  }

  report.D1 = nd;
  report.D2 = std::sqrt(nd * (nd + 2.0));
  if (problem == nullptr)
    throw std::invalid_argument("pair_constants: smooth class needs a problem for T2");
  if (problem->dim != N)
    throw std::invalid_argument("pair_constants: problem dimension mismatch");

  // T2^2 = sup_x E_W ||grad_x F(x, W)||^2, sup over a fixed feasible grid,
  // per-scenario gradients by central differences.
  constexpr std::size_t kGridPoints = 32;
  constexpr double kStep = 1e-5;
  RandomStreams grid_streams = streams.fork(0x512D);
  double best = -1.0, best_se = 0.0;
  for (std::size_t g = 0; g < kGridPoints; ++g) {
    const std::vector<double> xg = problem->region.random_point(grid_streams.gauss());
    const std::uint64_t base = mix64(grid_streams.master_seed() ^ mix64(g));
    auto stats = detail::mc_scalar(base, K, [&](Rng& rng) {
      const std::vector<double> w = problem->sample(rng);
      std::vector<double> pt = xg;
      double sq = 0.0;
      for (std::size_t j = 0; j < N; ++j) {
        pt[j] = xg[j] + kStep;
        const double hi = problem->cost(pt, w);
        pt[j] = xg[j] - kStep;
        const double lo = problem->cost(pt, w);
        pt[j] = xg[j];
        const double gj = (hi - lo) / (2.0 * kStep);
        sq += gj * gj;
      }
      return checked(sq, "gradient second moment sample");
    });
    if (stats.mean > best) {
      best = stats.mean;
      best_se = stats.stderr_;
    }
  }
  report.T2 = std::sqrt(std::max(0.0, best));
  report.T2_stderr = (report.T2 > 0.0) ? best_se / (2.0 * report.T2) : best_se;
  return report;
}

SmoothingPlan make_plan(const Problem& problem, double mu, RandomStreams& streams,
                        std::size_t K) {
  const PairConstantsReport consts =
      pair_constants(problem.cost_class, problem.dim, &problem, streams, K);
  return SmoothingPlan::make(problem.cost_class, mu, consts.D1, consts.D2, consts.T2);
}

namespace {

// C(mu) from the surrogate bound; 1 for p = 1.
double gap_c_factor(const RiskSpec& spec, const SmoothingPlan& plan, double G, double V,
                    double R0) {
  if (spec.p == 1.0) return 1.0;
  const double eta = spec.profile.eta();
  if (!(eta > 0.0))
    throw std::domain_error("surrogate bound: p > 1 requires a profile floor eta > 0");
  const double inner = R0 + 2.0 * V +
                       std::pow(plan.mu, 1.0 + plan.epsilon) * G * (plan.D1 + plan.D2) +
                       plan.mu * (plan.T2 + 1.0);
  return std::pow(eta, -0.5 * spec.p) * std::pow(inner, 0.5 * spec.p);
}

}  // namespace

double surrogate_gap_bound(const RiskSpec& spec, const SmoothingPlan& plan, double G,
                           double V, double R0) {
  const double c_factor = gap_c_factor(spec, plan, G, V, R0);
  const double mu_pow = std::pow(plan.mu, 1.0 + plan.epsilon);
  return mu_pow * G * plan.D1 +
         spec.c * c_factor * (mu_pow * G * (plan.D1 + plan.D2) + plan.mu * (plan.T2 + 1.0));
}

double sigma_o(const RiskSpec& spec, const SmoothingPlan& plan, double G, double V,
               double R0) {
  const double c_factor = gap_c_factor(spec, plan, G, V, R0);
  const double second = c_factor * (std::pow(plan.mu, plan.epsilon) * G * (plan.D1 + plan.D2) +
                                    plan.T2 + 1.0);
  return 2.0 * std::max(G * plan.D1, second);
}

double choose_mu(CostClass cost_class, std::size_t N, double M) {
  if (N < 1) throw std::invalid_argument("choose_mu: N must be >= 1");
  if (!(M > 0.0)) throw std::invalid_argument("choose_mu: M must be > 0");
  const double nd = static_cast<double>(N);
  return (cost_class == CostClass::Lipschitz) ? M / std::sqrt(nd)
                                              : M / (nd * std::sqrt(nd));
}

double slipschitz_check(const ScalarField& f, const Divergence& D, const Remainder& T,
                        double L, const std::vector<std::vector<double>>& x_grid,
                        const std::vector<std::vector<double>>& u_grid) {
  if (x_grid.empty() || u_grid.empty())
    throw std::invalid_argument("slipschitz_check: empty grid");
  std::vector<double> weighted_div(u_grid.size());
  for (std::size_t j = 0; j < u_grid.size(); ++j) {
    const double div = D(u_grid[j]);
    if (!(div >= 0.0))
      throw std::invalid_argument("slipschitz_check: divergence must be nonnegative");
    weighted_div[j] = L * div;
  }
  double worst = -std::numeric_limits<double>::infinity();
  std::vector<double> shifted;
  for (const auto& x : x_grid) {
    const double fx = f(x);
    shifted.resize(x.size());
    for (std::size_t j = 0; j < u_grid.size(); ++j) {
      const auto& u = u_grid[j];
      for (std::size_t i = 0; i < x.size(); ++i) shifted[i] = x[i] + u[i];
      const double lhs = std::abs(f(shifted) - fx - T(x, u));
      worst = std::max(worst, lhs - weighted_div[j]);
    }
  }
  return worst;
}

}  // namespace semidev
