#include "semidev/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "chunked_mc.hpp"

namespace semidev {

namespace {

double checked(double v, const char* what) {
  if (!std::isfinite(v))
    throw std::runtime_error(std::string("diagnostics: non-finite ") + what);
  return v;
}

McEstimate s_mu_impl(const Problem& problem, std::span<const double> x, double mu,
                     std::uint64_t base, std::size_t K) {
  const std::size_t N = problem.dim;
  const std::vector<double> x0(x.begin(), x.end());
  auto stats = detail::mc_scalar(base, K, [&](Rng& rng) {
    std::vector<double> pt = x0;
    if (mu > 0.0)
      for (std::size_t i = 0; i < N; ++i) pt[i] += mu * rng.normal();
    const std::vector<double> w = problem.sample(rng);
    return checked(problem.cost(pt, w), "cost sample");
  });
  return {stats.mean, stats.stderr_, K};
}

McEstimate g_mu_impl(const Problem& problem, const RiskSpec& spec,
                     std::span<const double> x, double y, double mu,
                     std::uint64_t base, std::size_t K) {
  const std::size_t N = problem.dim;
  const std::vector<double> x0(x.begin(), x.end());
  auto stats = detail::mc_scalar(base, K, [&](Rng& rng) {
    std::vector<double> pt = x0;
    double u = 0.0;
    if (mu > 0.0) {
      for (std::size_t i = 0; i < N; ++i) pt[i] += mu * rng.normal();
      u = rng.normal();
    }
    const std::vector<double> w = problem.sample(rng);
    const double f = problem.cost(pt, w);
    return checked(std::pow(spec.profile(f - y - mu * u), spec.p),
                   "semideviation sample");
  });
  return {stats.mean, stats.stderr_, K};
}

McEstimate phi_impl(const Problem& problem, const RiskSpec& spec,
                    std::span<const double> x, double mu, std::uint64_t base_mean,
                    std::uint64_t base_dev, std::size_t K) {
  if (spec.mean_only()) {
    McEstimate mean = s_mu_impl(problem, x, mu, base_mean, K);
    mean.samples = K;
    return mean;
  }
  const std::size_t K_mean = K / 2;
  const std::size_t K_dev = K - K_mean;
  const McEstimate mean = s_mu_impl(problem, x, mu, base_mean, K_mean);
  const McEstimate dev = g_mu_impl(problem, spec, x, mean.value, mu, base_dev, K_dev);

  const double inv_p = 1.0 / spec.p;
  const double root = (dev.value > 0.0) ? std::pow(dev.value, inv_p) : 0.0;
  const double d_root =
      (spec.p == 1.0) ? 1.0
                      : ((dev.value > 0.0) ? inv_p * std::pow(dev.value, inv_p - 1.0)
                                           : 0.0);
  const double se_dev = spec.c * d_root * dev.std_error;
  McEstimate out;
  out.value = mean.value + spec.c * root;
  out.std_error = std::sqrt(mean.std_error * mean.std_error + se_dev * se_dev);
  out.samples = K;
  return out;
}

void check_k(std::size_t K) {
  if (K < 2) throw std::invalid_argument("diagnostics: K must be >= 2");
}

}  // namespace

McEstimate estimate_s_mu(const Problem& problem, std::span<const double> x, double mu,
                         RandomStreams& streams, std::size_t K) {
  check_k(K);
  return s_mu_impl(problem, x, mu, streams.gauss().next_u64(), K);
}

McEstimate estimate_g_mu(const Problem& problem, const RiskSpec& spec,
                         std::span<const double> x, double y, double mu,
                         RandomStreams& streams, std::size_t K) {
  check_k(K);
  return g_mu_impl(problem, spec, x, y, mu, streams.gauss().next_u64(), K);
}

McEstimate estimate_phi(const Problem& problem, const RiskSpec& spec,
                        std::span<const double> x, double mu, RandomStreams& streams,
                        std::size_t K) {
  check_k(K);
  const std::uint64_t base_mean = streams.gauss().next_u64();
  const std::uint64_t base_dev = streams.gauss().next_u64();
  return phi_impl(problem, spec, x, mu, base_mean, base_dev, K);
}

std::vector<TrackingPoint> tracking_errors(const Trajectory& trajectory,
                                           const Problem& problem, const RiskSpec& spec,
                                           const SmoothingPlan& plan,
                                           RandomStreams& streams, std::size_t K) {
  if (trajectory.records.empty())
    throw std::invalid_argument("tracking_errors: empty trajectory");
  check_k(K);
  const std::uint64_t session = streams.gauss().next_u64();
  std::vector<TrackingPoint> out;
  out.reserve(trajectory.records.size());
  // The inner estimators already fan out over worker threads, so the record
  // loop stays sequential.
  for (std::size_t i = 0; i < trajectory.records.size(); ++i) {
    const TrajectoryRecord& rec = trajectory.records[i];
    const std::uint64_t b1 = mix64(session ^ mix64(2 * i));
    const std::uint64_t b2 = mix64(session ^ mix64(2 * i + 1));
    const McEstimate s_hat = s_mu_impl(problem, rec.x, plan.mu, b1, K);
    const McEstimate g_hat = g_mu_impl(problem, spec, rec.x, rec.y, plan.mu, b2, K);
    TrackingPoint point;
    point.n = rec.n;
    point.y_err_sq = (rec.y - s_hat.value) * (rec.y - s_hat.value);
    point.z_err_sq = (rec.z - g_hat.value) * (rec.z - g_hat.value);
    point.z_applicable = !spec.first_order();
    out.push_back(point);
  }
  return out;
}

namespace {

std::vector<double> phi_fd_gradient(const Problem& problem, const RiskSpec& spec,
                                    const std::vector<double>& x, double mu,
                                    double h, std::uint64_t base_mean,
                                    std::uint64_t base_dev, std::size_t batch) {
  const std::size_t N = problem.dim;
  std::vector<double> grad(N);
  std::vector<double> probe = x;
  for (std::size_t i = 0; i < N; ++i) {
    probe[i] = x[i] + h;
    const double hi = phi_impl(problem, spec, probe, mu, base_mean, base_dev, batch).value;
    probe[i] = x[i] - h;
    const double lo = phi_impl(problem, spec, probe, mu, base_mean, base_dev, batch).value;
    probe[i] = x[i];
    grad[i] = (hi - lo) / (2.0 * h);
  }
  return grad;
}

}  // namespace

std::vector<double> reference_optimum(const Problem& problem, const RiskSpec& spec,
                                      double mu, const RefBudget& budget) {
  if (spec.mean_only() && problem.analytic_optimum)
    return problem.region.project(*problem.analytic_optimum);

  if (!(budget.fd_step > 0.0) || budget.batch < 2 || budget.iterations < 1)
    throw std::invalid_argument("reference_optimum: invalid budget");
  std::vector<double> x = problem.region.interior_point();
  for (std::size_t k = 0; k < budget.iterations; ++k) {
    // One pair of bases per iteration: all 2N probes of the central
    // difference replay the same draws, so the noise in each difference is
    // O(h) instead of O(1).
    const std::uint64_t base_mean = mix64(budget.seed ^ mix64(2 * k));
    const std::uint64_t base_dev = mix64(budget.seed ^ mix64(2 * k + 1));
    const std::vector<double> grad = phi_fd_gradient(problem, spec, x, mu,
                                                     budget.fd_step, base_mean,
                                                     base_dev, budget.batch);
    const double a = budget.step_scale / static_cast<double>(k + 1);
    for (std::size_t i = 0; i < problem.dim; ++i)
      x[i] = checked(x[i] - a * grad[i], "descent update");
    x = problem.region.project(x);
  }

  const std::uint64_t base_mean = mix64(budget.seed ^ mix64(0x600df17ull));
  const std::uint64_t base_dev = mix64(budget.seed ^ mix64(0x600df18ull));
  const std::vector<double> grad = phi_fd_gradient(problem, spec, x, mu, budget.fd_step,
                                                   base_mean, base_dev, budget.batch);
  double norm_sq = 0.0;
  for (double g : grad) norm_sq += g * g;
  if (!(std::sqrt(norm_sq) <= budget.grad_tol))
    throw std::runtime_error(
        "reference_optimum: descent budget exhausted without stabilization "
        "(final gradient-norm estimate above threshold)");
  return x;
}

RateFit fit_rate(const std::vector<std::pair<std::uint64_t, double>>& series,
                 double window_fraction) {
  if (!(window_fraction > 0.0 && window_fraction <= 1.0))
    throw std::invalid_argument("fit_rate: window_fraction must lie in (0,1]");
  std::vector<std::pair<std::uint64_t, double>> pts;
  pts.reserve(series.size());
  for (const auto& p : series)
    if (p.first >= 1) pts.push_back(p);
  const std::size_t want =
      static_cast<std::size_t>(std::ceil(window_fraction * static_cast<double>(pts.size())));
  if (want < 10)
    throw std::invalid_argument("fit_rate: window has fewer than 10 points");
  const std::size_t begin = pts.size() - want;

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = begin; i < pts.size(); ++i) {
    if (!(pts[i].second > 0.0))
      throw std::domain_error("fit_rate: nonpositive value in window");
    const double lx = std::log(static_cast<double>(pts[i].first));
    const double ly = std::log(pts[i].second);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(want);
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_rate: degenerate abscissa");
  RateFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double y_bar = sy / n;
  for (std::size_t i = begin; i < pts.size(); ++i) {
    const double lx = std::log(static_cast<double>(pts[i].first));
    const double ly = std::log(pts[i].second);
    const double res = ly - (fit.intercept + fit.slope * lx);
    ss_res += res * res;
    ss_tot += (ly - y_bar) * (ly - y_bar);
  }
  fit.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
  fit.n_start = pts[begin].first;
  fit.n_end = pts.back().first;
  return fit;
}

std::uint64_t iteration_budget(double p, CostClass /*cost_class*/, double delta,
                               double epsilon, std::size_t n_o, double Sigma) {
  if (!(p >= 1.0 && p <= 2.0))
    throw std::invalid_argument("iteration_budget: p must lie in [1,2]");
  if (!(delta > 0.0)) throw std::invalid_argument("iteration_budget: delta must be > 0");
  if (!(Sigma > 0.0)) throw std::invalid_argument("iteration_budget: Sigma must be > 0");
  double raw;
  if (p == 1.0) {
    raw = std::pow(2.0 * Sigma / delta * (static_cast<double>(n_o) + 3.0), 1.5);
  } else {
    if (!(epsilon >= 0.0 && epsilon < 1.0))
      throw std::domain_error("iteration_budget: epsilon must lie in [0,1) when p > 1");
    const double exponent = 2.0 / (1.0 - epsilon);
    raw = std::pow(2.0 * Sigma / delta *
                       (static_cast<double>(n_o) + 2.0 / (1.0 - epsilon)),
                   exponent);
  }
  const auto grown = static_cast<std::uint64_t>(std::ceil(raw));
  return std::max<std::uint64_t>(n_o, grown);
}

}  // namespace semidev
