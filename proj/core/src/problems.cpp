#include "semidev/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>

namespace semidev {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sq_norm(std::span<const double> v) { return dot(v, v); }

double frobenius_sq(const std::vector<std::vector<double>>& A) {
  double s = 0.0;
  for (const auto& row : A)
    for (double e : row) s += e * e;
  return s;
}

}  // namespace

double evaluate(const Problem& problem, std::span<const double> x,
                std::span<const double> w, OracleCounter& counter) {
  if (x.size() != problem.dim)
    throw std::invalid_argument("evaluate: decision dimension mismatch for " + problem.name);
  if (w.size() != problem.scenario_dim)
    throw std::invalid_argument("evaluate: scenario dimension mismatch for " + problem.name);
  ++counter.calls;
  const double value = problem.cost(x, w);
  if (!std::isfinite(value))
    throw std::runtime_error("evaluate: non-finite cost value from " + problem.name);
  return value;
}

std::vector<double> sample_scenario(const Problem& problem, Rng& stream) {
  return problem.sample(stream);
}

Problem newsvendor(std::vector<double> levels, double x_lo, double x_hi) {
  if (levels.empty()) throw std::invalid_argument("newsvendor: empty level set");
  if (!(x_lo < x_hi)) throw std::invalid_argument("newsvendor: requires x_lo < x_hi");

  Problem p;
  p.name = "newsvendor";
  p.dim = 1;
  p.scenario_dim = 1;
  p.region = FeasibleRegion::box({x_lo}, {x_hi});
  p.cost_class = CostClass::Lipschitz;
  p.G = 1.0;
  p.sigma = 0.0;

  // sup over the box of the L2/L4 scenario norms of |x - W|; both are convex
  // in x, so the sup sits at an endpoint and is exact.
  const double k = static_cast<double>(levels.size());
  double v_sq = 0.0, v4_4 = 0.0;
  for (double endpoint : {x_lo, x_hi}) {
    double m2 = 0.0, m4 = 0.0;
    for (double w : levels) {
      const double d = endpoint - w;
      m2 += d * d / k;
      m4 += d * d * d * d / k;
    }
    v_sq = std::max(v_sq, m2);
    v4_4 = std::max(v4_4, m4);
  }
  p.V = std::sqrt(v_sq);
  p.V_p = std::pow(v4_4, 0.25);

  auto shared_levels = std::make_shared<std::vector<double>>(std::move(levels));
  p.sample = [shared_levels](Rng& rng) {
    return std::vector<double>{(*shared_levels)[rng.index(shared_levels->size())]};
  };
  p.cost = [](std::span<const double> x, std::span<const double> w) {
    return std::abs(x[0] - w[0]);
  };
  p.analytic_s = [shared_levels](std::span<const double> x) {
    double s = 0.0;
    for (double w : *shared_levels) s += std::abs(x[0] - w);
    return s / static_cast<double>(shared_levels->size());
  };
  return p;
}

Problem quadratic_tracking(std::vector<double> m, double radius) {
  if (m.empty()) throw std::invalid_argument("quadratic_tracking: empty center");
  if (!(radius > 0.0)) throw std::invalid_argument("quadratic_tracking: radius must be > 0");

  const std::size_t n = m.size();
  const double nd = static_cast<double>(n);
  const double trunc = 10.0 * std::sqrt(nd);

  Problem p;
  p.name = "quadratic-tracking";
  p.dim = n;
  p.scenario_dim = n;
  p.region = FeasibleRegion::l2_ball(m, radius);
  p.cost_class = CostClass::Smooth;
  p.G = 0.5;
  p.sigma = 0.5;

  // ||F(x,W)||_{L2}^2 = (1/4) E (||d||^2 - 2 d.Z + ||Z||^2)^2 with d = x - m,
  // Z standard normal; the sup over the ball sits at ||d|| = radius. The
  // truncation to ||Z|| <= 10 sqrt(N) only renormalizes by 1/P(accept),
  // absorbed in the tiny inflation factor.
  const double d2 = radius * radius;
  const double fourth = d2 * d2 + 2.0 * d2 * nd + 4.0 * d2 + nd * (nd + 2.0);
  p.V = 0.5 * std::sqrt(fourth * (1.0 + 1e-9));
  const double reach = radius + trunc;
  p.V_p = 0.5 * reach * reach;  // almost-sure bound, valid in every L_q

  auto center = std::make_shared<std::vector<double>>(std::move(m));
  p.sample = [center, n, trunc](Rng& rng) {
    std::vector<double> z;
    do {
      z = rng.normal_vector(n);
    } while (std::sqrt(sq_norm(z)) > trunc);
    for (std::size_t i = 0; i < n; ++i) z[i] += (*center)[i];
    return z;
  };
  p.cost = [](std::span<const double> x, std::span<const double> w) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = x[i] - w[i];
      s += e * e;
    }
    return 0.5 * s;
  };
  p.analytic_s = [center, nd](std::span<const double> x) {
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = x[i] - (*center)[i];
      d += e * e;
    }
    return 0.5 * d + 0.5 * nd;
  };
  p.analytic_optimum = *center;
  return p;
}

Problem quadratic_fit(std::vector<std::vector<double>> A, std::vector<double> y,
                      double noise_half_width, double radius) {
  if (A.empty() || A.front().empty())
    throw std::invalid_argument("quadratic_fit: empty matrix");
  const std::size_t rows = A.size();
  const std::size_t cols = A.front().size();
  for (const auto& r : A)
    if (r.size() != cols) throw std::invalid_argument("quadratic_fit: ragged matrix");
  if (y.size() != rows)
    throw std::invalid_argument("quadratic_fit: offset length must equal row count");
  if (noise_half_width < 0.0)
    throw std::invalid_argument("quadratic_fit: negative noise width");
  if (!(radius > 0.0)) throw std::invalid_argument("quadratic_fit: radius must be > 0");

  Problem p;
  p.name = "quadratic-fit";
  p.dim = cols;
  p.scenario_dim = rows;
  p.region = FeasibleRegion::l2_ball(std::vector<double>(cols, 0.0), radius);
  p.cost_class = CostClass::Smooth;
  p.G = frobenius_sq(A);
  p.sigma = 0.0;

  const double a_norm = std::sqrt(frobenius_sq(A));
  const double reach = std::sqrt(sq_norm(y)) + a_norm * radius +
                       noise_half_width * std::sqrt(static_cast<double>(rows));
  p.V = reach * reach;  // almost-sure bound
  p.V_p = p.V;

  auto mat = std::make_shared<std::vector<std::vector<double>>>(std::move(A));
  auto off = std::make_shared<std::vector<double>>(std::move(y));
  p.sample = [rows, noise_half_width](Rng& rng) {
    std::vector<double> w(rows);
    for (std::size_t i = 0; i < rows; ++i)
      w[i] = noise_half_width * (2.0 * rng.uniform01() - 1.0);
    return w;
  };
  p.cost = [mat, off](std::span<const double> x, std::span<const double> w) {
    double s = 0.0;
    for (std::size_t i = 0; i < mat->size(); ++i) {
      const double r = (*off)[i] + w[i] - dot((*mat)[i], x);
      s += r * r;
    }
    return s;
  };
  p.analytic_s = [mat, off, rows, noise_half_width](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < mat->size(); ++i) {
      const double r = (*off)[i] - dot((*mat)[i], x);
      s += r * r;
    }
    return s + static_cast<double>(rows) * noise_half_width * noise_half_width / 3.0;
  };
  return p;
}

Problem piecewise_linear(std::vector<std::vector<double>> a, double noise_half_width,
                         double radius) {
  if (a.empty() || a.front().empty())
    throw std::invalid_argument("piecewise_linear: empty slope set");
  const std::size_t pieces = a.size();
  const std::size_t cols = a.front().size();
  for (const auto& r : a)
    if (r.size() != cols) throw std::invalid_argument("piecewise_linear: ragged slopes");
  if (noise_half_width < 0.0)
    throw std::invalid_argument("piecewise_linear: negative noise width");
  if (!(radius > 0.0)) throw std::invalid_argument("piecewise_linear: radius must be > 0");

  Problem p;
  p.name = "piecewise-linear";
  p.dim = cols;
  p.scenario_dim = pieces;
  p.region = FeasibleRegion::l2_ball(std::vector<double>(cols, 0.0), radius);
  p.cost_class = CostClass::Lipschitz;
  double g = 0.0;
  for (const auto& r : a) g = std::max(g, std::sqrt(sq_norm(r)));
  p.G = g;
  p.sigma = 0.0;
  p.V = g * radius + noise_half_width;  // almost-sure bound
  p.V_p = p.V;

  auto slopes = std::make_shared<std::vector<std::vector<double>>>(std::move(a));
  p.sample = [pieces, noise_half_width](Rng& rng) {
    std::vector<double> w(pieces);
    for (std::size_t i = 0; i < pieces; ++i)
      w[i] = noise_half_width * (2.0 * rng.uniform01() - 1.0);
    return w;
  };
  p.cost = [slopes](std::span<const double> x, std::span<const double> w) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < slopes->size(); ++i)
      best = std::max(best, dot((*slopes)[i], x) - w[i]);
    return best;
  };
  return p;
}

}  // namespace semidev
