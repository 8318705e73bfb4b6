#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kv_config.hpp"
#include "semidev/diagnostics.hpp"
#include "semidev/problems.hpp"
#include "semidev/risk.hpp"
#include "semidev/smoothing.hpp"
#include "semidev/solver.hpp"

namespace semidev::tools {

// A fully validated experiment: problem, risk measure, smoothing plan,
// schedule, and run options, resolved from a flat key=value config.
struct ExperimentConfig {
  Problem problem;
  RiskSpec spec = RiskSpec::make(1.0, 0.0, RiskProfile::relu_shift(0.0));
  SmoothingPlan plan = SmoothingPlan::make(CostClass::Lipschitz, 0.1, 0.8, 1.0, 0.0);
  Schedule schedule = Schedule::strongly_convex(1.0);

  std::uint64_t iterations = 100;
  std::size_t replications = 1;
  std::uint64_t seed = 20240801;
  std::string output = "out.csv";
  bool average = false;
  bool thinned = true;
  std::size_t tracking_cadence = 10;  // 0 disables tracking columns
  std::size_t diagnostic_k = 2000;
  bool reference = false;  // emit ||x - x*||^2 instead of x components
  RefBudget ref_budget;
  std::optional<std::vector<double>> x0;
};

// Builds and validates every piece; throws ConfigError naming the offending
// key on any violation.
ExperimentConfig load_experiment(const KeyValues& kv);

// Problem construction by name + parameter keys (shared with the dimension
// sweep, which overrides the dimension-dependent parameters).
Problem build_problem(const KeyValues& kv);
RiskSpec build_risk_spec(const KeyValues& kv);
Schedule build_schedule(const KeyValues& kv, double problem_sigma);

// Exact config keys each builder recognizes, for unknown-key rejection.
std::vector<std::string> risk_config_keys();
std::vector<std::string> schedule_config_keys();
std::vector<std::string> run_config_keys();

struct RunOutput {
  Trajectory trajectory;
  std::vector<TrackingPoint> tracking;  // one entry per sampled record
};

// One replication end to end: solver run plus tracking-error diagnostics at
// the configured cadence, all seeded by fork(rep) of the master seed.
RunOutput run_replication(const ExperimentConfig& cfg, std::size_t rep);

// ---------------------------------------------------------------------------
// CSV assembly
// ---------------------------------------------------------------------------

// Shortest representation that survives a text round trip (17 significant
// digits).
std::string g17(double v);

std::string csv_header(std::size_t dim, bool dist_sq);

// Rows for one replication, in record order. When x_ref is set, the decision
// columns collapse to the squared distance to it.
std::vector<std::string> csv_rows(const ExperimentConfig& cfg, std::size_t rep,
                                  const RunOutput& output,
                                  const std::optional<std::vector<double>>& x_ref);

// Row flushed after the last good replication when a run aborts on a numeric
// failure: n = -1, every value column nan.
std::string csv_failure_marker(std::size_t rep, std::size_t dim, bool dist_sq);

}  // namespace semidev::tools
