#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "semidev/problems.hpp"
#include "semidev/risk.hpp"
#include "semidev/rng.hpp"
#include "semidev/smoothing.hpp"

namespace semidev {

enum class ScheduleVariant { ConvexSubharmonic, StronglyConvexSubharmonic, Constant };

// Stepsize schedule for the three coupled recursions. Subharmonic variants
// produce alpha_n = n^-tau1 (or (sigma n)^-1), beta_n = n^-tau2,
// gamma_n = n^-tau3 with order-dependent exponents; the constant variant
// keeps (alpha/sigma, beta, gamma) fixed.
struct Schedule {
  ScheduleVariant variant = ScheduleVariant::ConvexSubharmonic;
  double epsilon = 0.0;  // in [0,1)
  double delta = 0.5;    // in (0,1)
  double zeta = 0.5;     // in (0,1), delta >= zeta
  double sigma = 1.0;    // strong-convexity modulus, > 0
  double alpha = 0.1;    // constant variant, in (0,1)
  double beta = 0.3;     // constant variant, in (0,1]
  double gamma = 0.3;    // constant variant, in (0,1]

  static Schedule convex(double epsilon, double delta, double zeta);
  static Schedule strongly_convex(double sigma, double epsilon = 0.0,
                                  double delta = 0.5);
  static Schedule constant(double sigma, double alpha, double beta, double gamma);
};

struct StepSizes {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

// (alpha_n, beta_n, gamma_n); n = 0 yields the initial values (1 or 1/sigma).
// gamma is reported for every order even though the z-level ignores it at
// p = 1.
StepSizes stepsizes(const Schedule& schedule, double p, std::uint64_t n);

// Smallest n from which the n^-tau2 rate window opens:
// ceil(1 / (1 - tau2^(1/(tau2+1)))); always >= 3.
std::size_t burn_in(double tau2);

// Compact feasible intervals for the two auxiliary recursions:
//   Y = [-V, mu^(1+eps) G D1 + V],
//   Z = [eta^p, (R(0) + 2V + mu^(1+eps) G (D1+D2) + mu (T2+1))^p] (closure).
// The z-level is bypassed entirely at p = 1.
struct AuxiliarySets {
  double y_lo = 0.0;
  double y_hi = 0.0;
  double z_lo = 1.0;
  double z_hi = 1.0;
  bool z_bypassed = false;
};

AuxiliarySets auxiliary_sets(const RiskSpec& spec, const SmoothingPlan& plan, double G,
                             double V);

struct SolverState {
  std::vector<double> x;
  double y = 0.0;
  double z = 1.0;
  std::uint64_t n = 0;
  OracleCounter counter;
};

struct TrajectoryRecord {
  std::uint64_t n = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  std::vector<double> x;
  double y = 0.0;
  double z = 1.0;
  std::uint64_t oracle_calls = 0;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  // Mean of the last ceil(n/2) iterates, when averaging was requested.
  std::optional<std::vector<double>> x_hat;
};

// All randomness of one iteration, exposed so single steps can be driven by
// hand and gradient estimates replayed: U1, the joint [U2; U] block, and the
// two scenarios.
struct StepDraws {
  std::vector<double> u1;
  std::vector<double> u2;
  double u = 0.0;
  std::vector<double> w1;
  std::vector<double> w2;
};

// Four counted evaluations plus the Gaussian block, enough to reconstruct
// the update direction at any (y, z).
struct QuasiGradientDraws {
  std::vector<double> u1;
  std::vector<double> u2;
  double u = 0.0;
  double f_u1 = 0.0;      // F(x + mu U1, W1)
  double f_base1 = 0.0;   // F(x, W1)
  double f_u2 = 0.0;      // F(x + mu U2, W2)
  double f_base2 = 0.0;   // F(x, W2)
};

// Delta1 U1 + c z^((1-p)/p) (U2 + Delta1 U1 U) Delta2, the single-sample
// estimate of the smoothed risk gradient at (x, y, z). Throws when z <= 0
// with p > 1.
std::vector<double> quasi_gradient(std::span<const double> x, double y, double z,
                                   const QuasiGradientDraws& draws,
                                   const RiskSpec& spec, double mu);

// One full iteration with caller-supplied randomness; exactly four oracle
// evaluations. The z-update and both finite differences use the pre-update
// y and z snapshots.
SolverState step_with_draws(const SolverState& state, const Problem& problem,
                            const RiskSpec& spec, const SmoothingPlan& plan,
                            const AuxiliarySets& sets, const Schedule& schedule,
                            const StepDraws& draws);

// One full iteration drawing U1 ~ N(0, I_N), [U2; U] ~ N(0, I_{N+1}) from the
// Gaussian stream and W1, W2 from their scenario streams.
SolverState step(const SolverState& state, const Problem& problem,
                 const RiskSpec& spec, const SmoothingPlan& plan,
                 const AuxiliarySets& sets, const Schedule& schedule,
                 RandomStreams& streams);

// Which iteration indices a run keeps. Everything() records all of
// 0..iterations; thinned() records everything up to 10^4 iterations and
// beyond that the first 100 iterations plus geometrically spaced indices
// (ratio 1.05) and the final iterate.
class RecordPlan {
 public:
  static RecordPlan everything();
  static RecordPlan thinned();

  std::vector<std::uint64_t> indices(std::uint64_t iterations) const;

 private:
  explicit RecordPlan(bool thin) : thin_(thin) {}
  bool thin_ = false;
};

struct RunOptions {
  bool average = false;
  RecordPlan plan = RecordPlan::everything();
  std::optional<std::vector<double>> x0;  // projected onto X; region interior otherwise
  std::optional<double> y0;               // clamped into Y; Y midpoint otherwise
  std::optional<double> z0;               // clamped into Z; lower endpoint otherwise
};

// Drives `iterations` steps and returns the recorded trajectory (the initial
// state is always record 0).
Trajectory run(const Problem& problem, const RiskSpec& spec, const SmoothingPlan& plan,
               const Schedule& schedule, std::uint64_t iterations,
               RandomStreams& streams, const RunOptions& options = {});

}  // namespace semidev
