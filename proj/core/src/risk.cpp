#include "semidev/risk.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "semidev/rng.hpp"

namespace semidev {

namespace {

constexpr double kSoftplusCutoff = 30.0;

// Registration gate for custom profiles: sampled monotonicity,
// nonexpansiveness, midpoint convexity, and floor checks on [-50, 50].
void gate_custom_profile(const std::function<double(double)>& r, double eta) {
  Rng rng(0x637573746f6d21ull);
  constexpr int kPairs = 10000;
  constexpr double kTol = 1e-12;
  for (int i = 0; i < kPairs; ++i) {
    double a = -50.0 + 100.0 * rng.uniform01();
    double b = -50.0 + 100.0 * rng.uniform01();
    if (a > b) std::swap(a, b);
    const double ra = r(a);
    const double rb = r(b);
    if (!(std::isfinite(ra) && std::isfinite(rb)))
      throw std::invalid_argument("custom risk profile: non-finite value");
    if (ra > rb + kTol)
      throw std::invalid_argument("custom risk profile: not nondecreasing");
    if (std::abs(ra - rb) > std::abs(a - b) + kTol)
      throw std::invalid_argument("custom risk profile: not nonexpansive");
    if (ra < eta - kTol || rb < eta - kTol)
      throw std::invalid_argument("custom risk profile: value below declared floor");
    const double mid = 0.5 * (a + b);
    if (r(mid) > 0.5 * (ra + rb) + kTol)
      throw std::invalid_argument("custom risk profile: midpoint convexity fails");
  }
}

}  // namespace

RiskProfile::RiskProfile(ProfileKind kind, double eta, double t,
                         std::function<double(double)> fn)
    : kind_(kind), eta_(eta), t_(t), fn_(std::move(fn)) {}

RiskProfile RiskProfile::relu_shift(double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta))
    throw std::invalid_argument("relu_shift: eta must be finite and >= 0");
  return RiskProfile(ProfileKind::ReluShift, eta, 0.0, {});
}

RiskProfile RiskProfile::softplus_shift(double t, double eta) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw std::invalid_argument("softplus_shift: t must be finite and > 0");
  if (!(eta >= 0.0) || !std::isfinite(eta))
    throw std::invalid_argument("softplus_shift: eta must be finite and >= 0");
  return RiskProfile(ProfileKind::SoftplusShift, eta, t, {});
}

RiskProfile RiskProfile::custom(std::function<double(double)> r, double eta) {
  if (!r) throw std::invalid_argument("custom profile: empty callback");
  if (!(eta >= 0.0) || !std::isfinite(eta))
    throw std::invalid_argument("custom profile: eta must be finite and >= 0");
  gate_custom_profile(r, eta);
  return RiskProfile(ProfileKind::Custom, eta, 0.0, std::move(r));
}

double RiskProfile::operator()(double x) const {
  switch (kind_) {
    case ProfileKind::ReluShift:
      return (x > 0.0 ? x : 0.0) + eta_;
    case ProfileKind::SoftplusShift: {
      const double s = t_ * x;
      if (s > kSoftplusCutoff) return x + eta_;
      if (s < -kSoftplusCutoff) return eta_;
      return std::log1p(std::exp(s)) / t_ + eta_;
    }
    case ProfileKind::Custom:
      return fn_(x);
  }
  return eta_;  // unreachable
}

double risk_profile_eval(const RiskProfile& profile, double x) {
  return profile(x);
}

namespace {

RiskSpec make_spec(double p, double c, RiskProfile profile, bool strict) {
  if (!(p >= 1.0 && p <= 2.0))
    throw std::invalid_argument("RiskSpec: p must lie in [1, 2]");
  if (!(c >= 0.0 && c <= 1.0))
    throw std::invalid_argument("RiskSpec: c must lie in [0, 1]");
  if (strict && p > 1.0 && !(profile.eta() > 0.0))
    throw std::invalid_argument("RiskSpec: p > 1 requires a profile floor eta > 0");
  return RiskSpec{p, c, std::move(profile)};
}

}  // namespace

RiskSpec RiskSpec::make(double p, double c, RiskProfile profile) {
  return make_spec(p, c, std::move(profile), /*strict=*/true);
}

RiskSpec RiskSpec::make_diagnostic(double p, double c, RiskProfile profile) {
  return make_spec(p, c, std::move(profile), /*strict=*/false);
}

}  // namespace semidev
