#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "experiment.hpp"
#include "kv_config.hpp"
#include "semidev/diagnostics.hpp"
#include "semidev/problems.hpp"
#include "semidev/smoothing.hpp"
#include "semidev/solver.hpp"

namespace semidev::tools {

namespace {

void apply_overrides(KeyValues& kv, const CommonFlags& flags) {
  if (flags.out) kv.set("run.output", *flags.out);
  if (flags.seed) kv.set("run.seed", std::to_string(*flags.seed));
  if (flags.replications)
    kv.set("run.replications", std::to_string(*flags.replications));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(line);
  while (std::getline(in, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

int cmd_run(const std::string& config_path, const CommonFlags& flags) {
  ExperimentConfig cfg;
  try {
    KeyValues kv = KeyValues::parse_file(config_path);
    apply_overrides(kv, flags);
    cfg = load_experiment(kv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) {
    std::cerr << "config error: run.output: cannot open '" << cfg.output
              << "' for writing\n";
    return 2;
  }
  const bool dist_sq = cfg.reference;
  out << csv_header(cfg.problem.dim, dist_sq) << '\n';

  std::optional<std::vector<double>> x_ref;
  if (cfg.reference) {
    try {
      x_ref = reference_optimum(cfg.problem, cfg.spec, 0.0, cfg.ref_budget);
    } catch (const std::exception& e) {
      out << csv_failure_marker(0, cfg.problem.dim, dist_sq) << '\n';
      out.flush();
      std::cerr << "numeric failure: " << e.what() << '\n';
      return 3;
    }
  }

  struct RepResult {
    std::vector<std::string> rows;
    std::optional<std::string> error;
  };
  std::vector<RepResult> results(cfg.replications);
  {
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min(cfg.replications, hw);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t rep = t; rep < cfg.replications; rep += workers) {
          try {
            const RunOutput ro = run_replication(cfg, rep);
            results[rep].rows = csv_rows(cfg, rep, ro, x_ref);
          } catch (const std::exception& e) {
            results[rep].error = e.what();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
    if (results[rep].error) {
      out << csv_failure_marker(rep, cfg.problem.dim, dist_sq) << '\n';
      out.flush();
      std::cerr << "numeric failure: " << *results[rep].error << '\n';
      return 3;
    }
    for (const std::string& row : results[rep].rows) out << row << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify-smoothing
// ---------------------------------------------------------------------------

namespace {

struct Check {
  std::string name;
  double margin = 0.0;  // >= 0 passes
};

Check check_slipschitz_quartic(double L) {
  std::vector<std::vector<double>> xg, ug;
  for (double v : linspace(-2.0, 2.0, 100)) xg.push_back({v});
  for (double v : linspace(-2.0, 2.0, 100)) ug.push_back({v});
  const double violation = slipschitz_check(
      [](std::span<const double> x) { return std::pow(x[0], 4); },
      [](std::span<const double> u) { return u[0] * u[0] + std::pow(u[0], 4); },
      [](std::span<const double> x, std::span<const double> u) {
        return 4.0 * std::pow(x[0], 3) * u[0] + 4.0 * x[0] * std::pow(u[0], 3);
      },
      L, xg, ug);
  return {"slipschitz_check_quartic", 1e-9 - violation};
}

Check check_slipschitz_sqrt() {
  std::vector<std::vector<double>> xg, ug;
  for (double v : linspace(-2.0, 2.0, 100)) xg.push_back({v});
  for (double v : linspace(-2.0, 2.0, 100)) ug.push_back({v});
  const double violation = slipschitz_check(
      [](std::span<const double> x) { return std::sqrt(std::abs(x[0])); },
      [](std::span<const double> u) { return std::sqrt(std::abs(u[0])); },
      [](std::span<const double>, std::span<const double>) { return 0.0; }, 1.0, xg,
      ug);
  return {"slipschitz_check_sqrt", 1e-9 - violation};
}

Check check_overestimation(Rng& rng, std::size_t K) {
  const ScalarField f = [](std::span<const double> x) {
    return x[0] * x[0] + x[1] * x[1];
  };
  double margin = std::numeric_limits<double>::infinity();
  for (double v : linspace(-2.0, 2.0, 10)) {
    const std::vector<double> x = {v, -0.5 * v};
    const MeanEstimate est = smoothed_value(f, x, 0.5, rng, K);
    margin = std::min(margin, est.value - f(x) + 4.0 * est.std_error);
  }
  return {"overestimation", margin};
}

Check check_uniform_approximation(Rng& rng, std::size_t K) {
  const Problem nv = newsvendor();
  const double mu = 0.2;
  const double d1 = std::sqrt(2.0 / 3.14159265358979323846);
  const double bound = mu * nv.G * d1;
  double margin = std::numeric_limits<double>::infinity();
  for (double v : linspace(-2.0, 2.0, 20)) {
    const std::vector<double> x = {v};
    const MeanEstimate est = smoothed_value(nv.analytic_s, x, mu, rng, K);
    margin = std::min(margin,
                      bound + 4.0 * est.std_error - std::abs(est.value - nv.analytic_s(x)));
  }
  return {"uniform_approximation", margin};
}

Check check_gradient_unbiasedness(Rng& rng, std::size_t K) {
  const ScalarField f = [](std::span<const double> x) {
    return x[0] * x[0] + x[1] * x[1];
  };
  const std::vector<double> x = {1.0, -2.0};
  const MeanVectorEstimate est = smoothed_gradient(f, x, 0.1, rng, K);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i)
    margin = std::min(margin,
                      4.0 * est.std_error[i] - std::abs(est.value[i] - 2.0 * x[i]));
  return {"gradient_unbiasedness", margin};
}

Check check_remainder_mean_zero(Rng& rng, std::size_t K) {
  // The quartic remainder T(x, u) = 4 x^3 u + 4 x u^3 is odd in u, so its
  // mean under u = mu U vanishes.
  const double x = 1.5, mu = 0.3;
  double sum = 0.0, sq = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double u = mu * rng.normal();
    const double t = 4.0 * x * x * x * u + 4.0 * x * u * u * u;
    sum += t;
    sq += t * t;
  }
  const double n = static_cast<double>(K);
  const double mean = sum / n;
  const double se = std::sqrt(std::max(0.0, (sq - n * mean * mean) / (n - 1.0)) / n);
  return {"remainder_mean_zero", 4.0 * se - std::abs(mean)};
}

Check check_surrogate_gap(std::uint64_t seed, std::size_t K) {
  const Problem nv = newsvendor();
  const RiskSpec spec = RiskSpec::make(1.0, 1.0, RiskProfile::relu_shift(0.0));
  RandomStreams streams(mix64(seed ^ 0x9ab5ull));
  const SmoothingPlan plan = make_plan(nv, 0.1, streams);
  const double bound =
      surrogate_gap_bound(spec, plan, nv.G, nv.V, spec.profile.at_zero());
  double margin = std::numeric_limits<double>::infinity();
  for (double v : linspace(-2.0, 2.0, 10)) {
    const std::vector<double> x = {v};
    const McEstimate smoothed = estimate_phi(nv, spec, x, plan.mu, streams, K);
    const McEstimate plain = estimate_phi(nv, spec, x, 0.0, streams, K);
    const double se = std::sqrt(smoothed.std_error * smoothed.std_error +
                                plain.std_error * plain.std_error);
    margin = std::min(margin,
                      bound + 4.0 * se - std::abs(smoothed.value - plain.value));
  }
  return {"surrogate_gap_bound", margin};
}

}  // namespace

int cmd_verify_smoothing(const std::optional<std::string>& config_path,
                         const CommonFlags& flags) {
  double quartic_L = 24.0;
  std::uint64_t seed = 997;
  std::size_t K = 20000;
  try {
    KeyValues kv = config_path ? KeyValues::parse_file(*config_path) : KeyValues{};
    kv.reject_unknown({"verify.quartic_L", "verify.seed", "verify.k"});
    quartic_L = kv.get_double("verify.quartic_L", quartic_L);
    seed = kv.get_u64("verify.seed", seed);
    K = static_cast<std::size_t>(kv.get_u64("verify.k", K));
    if (flags.seed) seed = *flags.seed;
    if (K < 2) throw ConfigError("verify.k", "must be >= 2");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  RandomStreams streams(seed);
  Rng& rng = streams.gauss();
  std::vector<Check> checks;
  checks.push_back(check_slipschitz_quartic(quartic_L));
  checks.push_back(check_slipschitz_sqrt());
  checks.push_back(check_overestimation(rng, K));
  checks.push_back(check_uniform_approximation(rng, K));
  checks.push_back(check_gradient_unbiasedness(rng, K));
  checks.push_back(check_remainder_mean_zero(rng, K));
  checks.push_back(check_surrogate_gap(seed, std::max<std::size_t>(K, 50000)));

  const Check* first_fail = nullptr;
  for (const Check& check : checks) {
    const bool pass = check.margin >= 0.0;
    if (!pass && first_fail == nullptr) first_fail = &check;
    std::cout << (pass ? "PASS " : "FAIL ") << check.name << " margin="
              << g17(check.margin) << '\n';
  }
  if (first_fail != nullptr) {
    std::cerr << "first failing check: " << first_fail->name << '\n';
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// fit-rate
// ---------------------------------------------------------------------------

int cmd_fit_rate(const std::string& csv_path, const std::string& column,
                 double window_fraction) {
  std::ifstream in(csv_path);
  if (!in) {
    std::cerr << "input error: cannot open '" << csv_path << "'\n";
    return 2;
  }
  std::string line;
  if (!std::getline(in, line)) {
    std::cerr << "input error: '" << csv_path << "' is empty\n";
    return 2;
  }
  const std::vector<std::string> header = split_csv_line(line);
  const auto col_it = std::find(header.begin(), header.end(), column);
  if (col_it == header.end()) {
    std::cerr << "input error: column '" << column << "' not found\n";
    return 2;
  }
  const auto n_it = std::find(header.begin(), header.end(), "n");
  if (n_it == header.end()) {
    std::cerr << "input error: column 'n' not found\n";
    return 2;
  }
  const std::size_t ci = static_cast<std::size_t>(col_it - header.begin());
  const std::size_t ni = static_cast<std::size_t>(n_it - header.begin());

  // Mean of the column across replications at each n; nan cells (no
  // diagnostic at that row) and failure markers (n = -1) are skipped.
  std::map<std::uint64_t, std::pair<double, std::size_t>> grouped;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      std::cerr << "input error: row with " << fields.size() << " fields, expected "
                << header.size() << '\n';
      return 2;
    }
    const long long n_raw = std::strtoll(fields[ni].c_str(), nullptr, 10);
    if (n_raw < 0) continue;
    const double value = std::strtod(fields[ci].c_str(), nullptr);
    if (std::isnan(value)) continue;
    auto& slot = grouped[static_cast<std::uint64_t>(n_raw)];
    slot.first += value;
    slot.second += 1;
  }

  std::vector<std::pair<std::uint64_t, double>> series;
  series.reserve(grouped.size());
  for (const auto& [n, acc] : grouped)
    series.emplace_back(n, acc.first / static_cast<double>(acc.second));

  try {
    const RateFit fit = fit_rate(series, window_fraction);
    std::cout << "slope=" << g17(fit.slope) << " intercept=" << g17(fit.intercept)
              << " r2=" << g17(fit.r2) << " window=[" << fit.n_start << ','
              << fit.n_end << "]\n";
    return 0;
  } catch (const std::domain_error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  }
}

// ---------------------------------------------------------------------------
// sweep-dimension
// ---------------------------------------------------------------------------

namespace {

Problem sweep_problem(const std::string& name, std::size_t N, const KeyValues& kv) {
  if (name == "quadratic-tracking") {
    return quadratic_tracking(std::vector<double>(N, 0.0),
                              kv.get_double("problem.radius", 5.0));
  }
  if (name == "piecewise-linear") {
    const double radius = kv.get_double("problem.radius", 2.0);
    std::vector<std::vector<double>> slopes(N, std::vector<double>(N, 0.0));
    for (std::size_t i = 0; i < N; ++i) slopes[i][i] = 1.0;
    Problem p = piecewise_linear(std::move(slopes),
                                 kv.get_double("problem.noise", 0.5), radius);
    // With identity slopes, i.i.d. symmetric noise, and a centered ball, the
    // expected max is permutation-symmetric and coordinatewise decreasing, so
    // the constrained minimizer sits at -radius/sqrt(N) in every coordinate.
    p.analytic_optimum = std::vector<double>(
        N, -radius / std::sqrt(static_cast<double>(N)));
    return p;
  }
  if (name == "quadratic-fit") {
    std::vector<std::vector<double>> A(N, std::vector<double>(N, 0.0));
    for (std::size_t i = 0; i < N; ++i) A[i][i] = 1.0;
    Problem p = quadratic_fit(std::move(A), std::vector<double>(N, 0.0),
                              kv.get_double("problem.noise", 0.0),
                              kv.get_double("problem.radius", 5.0));
    p.analytic_optimum = std::vector<double>(N, 0.0);
    return p;
  }
  throw ConfigError("sweep.problem", "'" + name + "' is not dimension-parametrizable");
}

std::vector<double> offset_start(const Problem& problem) {
  std::vector<double> x0 = problem.region.interior_point();
  double offset = 1.0;
  if (problem.region.kind() == RegionKind::L2Ball)
    offset = 0.8 * problem.region.radius();
  else if (problem.region.kind() == RegionKind::Box)
    offset = 0.4 * (problem.region.upper()[0] - problem.region.lower()[0]);
  x0[0] += offset;
  return problem.region.project(x0);
}

}  // namespace

int cmd_sweep_dimension(const std::string& config_path, const CommonFlags& flags) {
  try {
    KeyValues kv = KeyValues::parse_file(config_path);
    apply_overrides(kv, flags);
    std::vector<std::string> allowed = {
        "sweep.dims",   "sweep.problem",      "sweep.iterations",
        "sweep.replications", "sweep.window", "problem.radius",
        "problem.noise", "smoothing.M",       "smoothing.pair_k",
        "run.seed",     "run.output"};
    for (std::string& k : risk_config_keys()) allowed.push_back(std::move(k));
    for (std::string& k : schedule_config_keys()) allowed.push_back(std::move(k));
    kv.reject_unknown(allowed);

    if (!kv.has("sweep.dims")) throw ConfigError("sweep.dims", "required key is missing");
    std::vector<std::size_t> dims;
    for (double raw : kv.require_vector("sweep.dims")) {
      if (!(raw >= 1.0) || raw != std::floor(raw))
        throw ConfigError("sweep.dims", "entries must be integers >= 1");
      dims.push_back(static_cast<std::size_t>(raw));
    }

    const std::string pname = kv.get_string("sweep.problem", "quadratic-tracking");
    const RiskSpec spec = build_risk_spec(kv);
    const double M = kv.get_double("smoothing.M", 0.2);
    if (!(M > 0.0)) throw ConfigError("smoothing.M", "must be > 0");
    const std::uint64_t iterations = kv.get_u64("sweep.iterations", 500);
    const std::size_t reps =
        static_cast<std::size_t>(kv.get_u64("sweep.replications", 2));
    if (reps < 1) throw ConfigError("sweep.replications", "must be >= 1");
    const std::uint64_t seed = kv.get_u64("run.seed", 20240801);
    const std::size_t pair_k =
        static_cast<std::size_t>(kv.get_u64("smoothing.pair_k", 2000));
    const double window = kv.get_double("sweep.window", 0.5);
    const std::string output = kv.get_string("run.output", "sweep.csv");

    std::ofstream out(output, std::ios::binary);
    if (!out)
      throw ConfigError("run.output", "cannot open '" + output + "' for writing");
    out << "N,mu,final_mse,slope\n";

    for (const std::size_t N : dims) {
      const Problem problem = sweep_problem(pname, N, kv);
      const double mu = choose_mu(problem.cost_class, N, M);

      SmoothingPlan plan = [&] {
        const double nd = static_cast<double>(N);
        if (problem.cost_class == CostClass::Smooth && spec.first_order()) {
          // The z-level is bypassed at p = 1, so the run never consumes T2;
          // skip its Monte Carlo estimation.
          return SmoothingPlan::make(CostClass::Smooth, mu, nd,
                                     std::sqrt(nd * (nd + 2.0)), 0.0);
        }
        RandomStreams plan_streams(mix64(seed ^ mix64(N)));
        return make_plan(problem, mu, plan_streams, pair_k < 2 ? 2 : pair_k);
      }();

      const Schedule schedule = build_schedule(kv, problem.sigma);
      const std::vector<double> x_ref = reference_optimum(problem, spec, 0.0);

      RunOptions options;
      options.plan = RecordPlan::thinned();
      options.x0 = offset_start(problem);

      std::map<std::uint64_t, double> dist_sum;
      for (std::size_t rep = 0; rep < reps; ++rep) {
        RandomStreams streams = RandomStreams(seed).fork(N * 65536 + rep);
        const Trajectory traj =
            run(problem, spec, plan, schedule, iterations, streams, options);
        for (const TrajectoryRecord& r : traj.records) {
          double d = 0.0;
          for (std::size_t j = 0; j < r.x.size(); ++j) {
            const double diff = r.x[j] - x_ref[j];
            d += diff * diff;
          }
          dist_sum[r.n] += d;
        }
      }

      std::vector<std::pair<std::uint64_t, double>> series;
      series.reserve(dist_sum.size());
      for (const auto& [n, total] : dist_sum)
        series.emplace_back(n, total / static_cast<double>(reps));
      const double final_mse = series.back().second;
      // Scalar problems can pin the boundary optimum bit-exactly after
      // projection; the distance column is then zero and has no finite
      // log-log slope, which is a property of the run, not an input error.
      double slope = std::numeric_limits<double>::quiet_NaN();
      try {
        slope = fit_rate(series, window).slope;
      } catch (const std::domain_error&) {
      }

      out << N << ',' << g17(mu) << ',' << g17(final_mse) << ',' << g17(slope)
          << '\n';
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace semidev::tools
