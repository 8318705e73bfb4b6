#include "experiment.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace semidev::tools {

namespace {

// Re-raise a domain validation failure as a config error tied to a section.
template <class Fn>
auto guarded(const std::string& section, Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(section, e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(section, e.what());
  }
}

}  // namespace

Problem build_problem(const KeyValues& kv) {
  const std::string name = kv.require_string("problem.name");
  if (name == "newsvendor") {
    return guarded("problem", [&] {
      return newsvendor(kv.get_vector("problem.levels", {0.0, 1.0}),
                        kv.get_double("problem.x_lo", -2.0),
                        kv.get_double("problem.x_hi", 2.0));
    });
  }
  if (name == "quadratic-tracking") {
    return guarded("problem", [&] {
      return quadratic_tracking(kv.require_vector("problem.center"),
                                kv.get_double("problem.radius", 5.0));
    });
  }
  if (name == "quadratic-fit") {
    return guarded("problem", [&] {
      return quadratic_fit(kv.require_matrix("problem.matrix"),
                           kv.require_vector("problem.offset"),
                           kv.get_double("problem.noise", 0.0),
                           kv.get_double("problem.radius", 5.0));
    });
  }
  if (name == "piecewise-linear") {
    return guarded("problem", [&] {
      return piecewise_linear(kv.require_matrix("problem.slopes"),
                              kv.get_double("problem.noise", 0.5),
                              kv.get_double("problem.radius", 2.0));
    });
  }
  throw ConfigError("problem.name", "unknown problem '" + name + "'");
}

RiskSpec build_risk_spec(const KeyValues& kv) {
  const double p = kv.get_double("risk.p", 1.0);
  const double c = kv.get_double("risk.c", 0.0);
  const double eta = kv.get_double("risk.eta", 0.0);
  const std::string profile = kv.get_string("risk.profile", "relu-shift");
  return guarded("risk", [&] {
    if (profile == "relu-shift")
      return RiskSpec::make(p, c, RiskProfile::relu_shift(eta));
    if (profile == "softplus-shift")
      return RiskSpec::make(
          p, c, RiskProfile::softplus_shift(kv.get_double("risk.t", 10.0), eta));
    throw std::invalid_argument("unknown profile '" + profile + "'");
  });
}

Schedule build_schedule(const KeyValues& kv, double problem_sigma) {
  std::string fallback = problem_sigma > 0.0 ? "strongly-convex" : "convex";
  const std::string variant = kv.get_string("schedule.variant", fallback);
  const double sigma = kv.get_double("schedule.sigma", problem_sigma);
  return guarded("schedule", [&] {
    if (variant == "convex")
      return Schedule::convex(kv.get_double("schedule.epsilon", 0.5),
                              kv.get_double("schedule.delta", 0.5),
                              kv.get_double("schedule.zeta", 0.5));
    if (variant == "strongly-convex")
      return Schedule::strongly_convex(sigma, kv.get_double("schedule.epsilon", 0.0),
                                       kv.get_double("schedule.delta", 0.5));
    if (variant == "constant")
      return Schedule::constant(sigma, kv.get_double("schedule.alpha", 0.1),
                                kv.get_double("schedule.beta", 0.3),
                                kv.get_double("schedule.gamma", 0.3));
    throw std::invalid_argument("unknown variant '" + variant + "'");
  });
}

std::vector<std::string> risk_config_keys() {
  return {"risk.p", "risk.c", "risk.eta", "risk.profile", "risk.t"};
}

std::vector<std::string> schedule_config_keys() {
  return {"schedule.variant", "schedule.sigma", "schedule.epsilon",
          "schedule.delta",   "schedule.zeta",  "schedule.alpha",
          "schedule.beta",    "schedule.gamma"};
}

std::vector<std::string> run_config_keys() {
  std::vector<std::string> keys = {
      "problem.name",   "problem.levels",      "problem.x_lo",
      "problem.x_hi",   "problem.center",      "problem.radius",
      "problem.matrix", "problem.offset",      "problem.noise",
      "problem.slopes", "smoothing.mu",        "smoothing.M",
      "smoothing.pair_k", "smoothing.t2",      "run.seed",
      "run.iterations", "run.replications",    "run.output",
      "run.average",    "run.record",          "run.tracking_cadence",
      "run.diagnostic_k", "run.reference",     "run.ref_step",
      "run.ref_batch",  "run.ref_iterations",  "run.ref_tol",
      "run.x0"};
  for (std::string& k : risk_config_keys()) keys.push_back(std::move(k));
  for (std::string& k : schedule_config_keys()) keys.push_back(std::move(k));
  return keys;
}

ExperimentConfig load_experiment(const KeyValues& kv) {
  kv.reject_unknown(run_config_keys());

  ExperimentConfig cfg;
  cfg.problem = build_problem(kv);
  cfg.spec = build_risk_spec(kv);
  cfg.schedule = build_schedule(kv, cfg.problem.sigma);

  cfg.seed = kv.get_u64("run.seed", cfg.seed);

  // Smoothing radius: explicit mu wins, otherwise the dimension-aware rule.
  double mu;
  if (kv.has("smoothing.mu")) {
    mu = kv.require_double("smoothing.mu");
    if (!(mu > 0.0)) throw ConfigError("smoothing.mu", "must be > 0");
  } else if (kv.has("smoothing.M")) {
    mu = guarded("smoothing.M", [&] {
      return choose_mu(cfg.problem.cost_class, cfg.problem.dim,
                       kv.require_double("smoothing.M"));
    });
  } else {
    throw ConfigError("smoothing.mu", "either smoothing.mu or smoothing.M is required");
  }
  const std::size_t pair_k = kv.get_u64("smoothing.pair_k", 20000);
  cfg.plan = guarded("smoothing", [&] {
    RandomStreams streams(mix64(cfg.seed ^ 0x706c616eull));
    if (kv.has("smoothing.t2")) {
      // Explicit T2 skips the Monte Carlo gradient-moment estimation; only
      // meaningful for the smooth pair (the Lipschitz pair has T2 = 0
      // structurally).
      if (cfg.problem.cost_class != CostClass::Smooth)
        throw std::invalid_argument("smoothing.t2 applies to smooth problems only");
      const double nd = static_cast<double>(cfg.problem.dim);
      return SmoothingPlan::make(CostClass::Smooth, mu, nd,
                                 std::sqrt(nd * (nd + 2.0)),
                                 kv.require_double("smoothing.t2"));
    }
    return make_plan(cfg.problem, mu, streams, pair_k < 2 ? 2 : pair_k);
  });

  cfg.iterations = kv.get_u64("run.iterations", cfg.iterations);
  cfg.replications = static_cast<std::size_t>(
      kv.get_u64("run.replications", cfg.replications));
  if (cfg.replications < 1) throw ConfigError("run.replications", "must be >= 1");
  cfg.output = kv.get_string("run.output", cfg.output);
  cfg.average = kv.get_bool("run.average", cfg.average);

  const std::string record = kv.get_string("run.record", "auto");
  if (record == "all")
    cfg.thinned = false;
  else if (record == "thinned" || record == "auto")
    cfg.thinned = true;
  else
    throw ConfigError("run.record", "expected all, thinned or auto");

  cfg.tracking_cadence =
      static_cast<std::size_t>(kv.get_u64("run.tracking_cadence", 10));
  cfg.diagnostic_k = static_cast<std::size_t>(kv.get_u64("run.diagnostic_k", 2000));
  if (cfg.tracking_cadence > 0 && cfg.diagnostic_k < 2)
    throw ConfigError("run.diagnostic_k", "must be >= 2 when tracking is enabled");
  cfg.reference = kv.get_bool("run.reference", false);
  cfg.ref_budget.fd_step = kv.get_double("run.ref_step", cfg.ref_budget.fd_step);
  cfg.ref_budget.batch =
      static_cast<std::size_t>(kv.get_u64("run.ref_batch", cfg.ref_budget.batch));
  cfg.ref_budget.iterations = static_cast<std::size_t>(
      kv.get_u64("run.ref_iterations", cfg.ref_budget.iterations));
  cfg.ref_budget.grad_tol = kv.get_double("run.ref_tol", cfg.ref_budget.grad_tol);

  if (kv.has("run.x0")) {
    std::vector<double> x0 = kv.require_vector("run.x0");
    if (x0.size() != cfg.problem.dim)
      throw ConfigError("run.x0", "dimension mismatch with the problem");
    cfg.x0 = std::move(x0);
  }
  return cfg;
}

RunOutput run_replication(const ExperimentConfig& cfg, std::size_t rep) {
  RandomStreams streams = RandomStreams(cfg.seed).fork(rep);
  RunOptions options;
  options.average = cfg.average;
  options.plan = cfg.thinned ? RecordPlan::thinned() : RecordPlan::everything();
  options.x0 = cfg.x0;

  RunOutput out;
  out.trajectory = run(cfg.problem, cfg.spec, cfg.plan, cfg.schedule, cfg.iterations,
                       streams, options);

  if (cfg.tracking_cadence > 0 && !out.trajectory.records.empty()) {
    Trajectory sampled;
    for (std::size_t i = 0; i < out.trajectory.records.size();
         i += cfg.tracking_cadence)
      sampled.records.push_back(out.trajectory.records[i]);
    out.tracking = tracking_errors(sampled, cfg.problem, cfg.spec, cfg.plan, streams,
                                   cfg.diagnostic_k);
  }
  return out;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_header(std::size_t dim, bool dist_sq) {
  std::string header = "replication,n,alpha,beta,gamma";
  if (dist_sq) {
    header += ",dist_sq";
  } else {
    for (std::size_t i = 0; i < dim; ++i) header += ",x" + std::to_string(i);
  }
  header += ",y,z,y_err_sq,z_err_sq,oracle_calls";
  return header;
}

std::vector<std::string> csv_rows(const ExperimentConfig& cfg, std::size_t rep,
                                  const RunOutput& output,
                                  const std::optional<std::vector<double>>& x_ref) {
  std::vector<std::string> rows;
  rows.reserve(output.trajectory.records.size());
  std::size_t tracked = 0;
  for (std::size_t i = 0; i < output.trajectory.records.size(); ++i) {
    const TrajectoryRecord& r = output.trajectory.records[i];
    const TrackingPoint* point = nullptr;
    if (tracked < output.tracking.size() && output.tracking[tracked].n == r.n)
      point = &output.tracking[tracked++];

    std::string row = std::to_string(rep);
    row += ',';
    row += std::to_string(r.n);
    row += ',' + g17(r.alpha) + ',' + g17(r.beta) + ',' + g17(r.gamma);
    if (x_ref) {
      double d = 0.0;
      for (std::size_t j = 0; j < r.x.size(); ++j) {
        const double diff = r.x[j] - (*x_ref)[j];
        d += diff * diff;
      }
      row += ',' + g17(d);
    } else {
      for (double xj : r.x) row += ',' + g17(xj);
    }
    row += ',' + g17(r.y) + ',' + g17(r.z);
    if (point) {
      row += ',' + g17(point->y_err_sq);
      row += point->z_applicable ? ',' + g17(point->z_err_sq) : std::string(",nan");
    } else {
      row += ",nan,nan";
    }
    row += ',' + std::to_string(r.oracle_calls);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_failure_marker(std::size_t rep, std::size_t dim, bool dist_sq) {
  std::string row = std::to_string(rep);
  row += ",-1";
  const std::size_t value_columns = 3 + (dist_sq ? 1 : dim) + 4;
  for (std::size_t i = 0; i < value_columns; ++i) row += ",nan";
  row += ",nan";  // oracle_calls is unknown at the failure point
  return row;
}

}  // namespace semidev::tools
