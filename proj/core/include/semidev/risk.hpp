#pragma once

#include <functional>

namespace semidev {

enum class ProfileKind { ReluShift, SoftplusShift, Custom };

// Scalar weighting of cost deviations above the mean. Required properties
// (convex, nonnegative, nondecreasing, nonexpansive, bounded below by eta)
// hold by construction for the two built-in kinds; custom callbacks are gated
// by sampled property checks at registration.
class RiskProfile {
 public:
  // max(x, 0) + eta
  static RiskProfile relu_shift(double eta);
  // (1/t) log(1 + exp(t x)) + eta, overflow-safe for large |t x|
  static RiskProfile softplus_shift(double t, double eta);
  // User callback r with declared floor eta; r must already include eta.
  static RiskProfile custom(std::function<double(double)> r, double eta);

  double operator()(double x) const;
  double at_zero() const { return (*this)(0.0); }

  ProfileKind kind() const noexcept { return kind_; }
  double eta() const noexcept { return eta_; }
  double softness() const noexcept { return t_; }

 private:
  RiskProfile(ProfileKind kind, double eta, double t, std::function<double(double)> fn);

  ProfileKind kind_;
  double eta_;
  double t_;
  std::function<double(double)> fn_;
};

double risk_profile_eval(const RiskProfile& profile, double x);

// Order p in [1,2], penalty c in [0,1], deviation profile R. The strict
// variant additionally requires eta > 0 whenever p > 1 (the solver's
// positivity condition for the z-level); the diagnostic variant admits
// eta = 0 limit profiles, which are legitimate inside Monte Carlo
// estimators but not inside the algorithm.
struct RiskSpec {
  double p;
  double c;
  RiskProfile profile;

  static RiskSpec make(double p, double c, RiskProfile profile);
  static RiskSpec make_diagnostic(double p, double c, RiskProfile profile);

  bool mean_only() const noexcept { return c == 0.0; }
  bool first_order() const noexcept { return p == 1.0; }
};

}  // namespace semidev
