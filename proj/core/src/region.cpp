#include "semidev/region.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace semidev {

namespace {

void check_dim(const FeasibleRegion& region, std::span<const double> x) {
  if (x.size() != region.dim())
    throw std::invalid_argument("region: dimension mismatch");
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

}  // namespace

FeasibleRegion FeasibleRegion::all_space(std::size_t dim) {
  if (dim < 1) throw std::invalid_argument("all_space: dim must be >= 1");
  FeasibleRegion r;
  r.kind_ = RegionKind::AllSpace;
  r.dim_ = dim;
  return r;
}

FeasibleRegion FeasibleRegion::box(std::vector<double> lower, std::vector<double> upper) {
  if (lower.empty() || lower.size() != upper.size())
    throw std::invalid_argument("box: bounds must be nonempty and equally sized");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] <= upper[i]) || !std::isfinite(lower[i]) || !std::isfinite(upper[i]))
      throw std::invalid_argument("box: requires finite lower <= upper per coordinate");
  }
  FeasibleRegion r;
  r.kind_ = RegionKind::Box;
  r.dim_ = lower.size();
  r.lower_ = std::move(lower);
  r.upper_ = std::move(upper);
  return r;
}

FeasibleRegion FeasibleRegion::l2_ball(std::vector<double> center, double radius) {
  if (center.empty()) throw std::invalid_argument("l2_ball: empty center");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("l2_ball: radius must be finite and > 0");
  FeasibleRegion r;
  r.kind_ = RegionKind::L2Ball;
  r.dim_ = center.size();
  r.center_ = std::move(center);
  r.radius_ = radius;
  return r;
}

std::vector<double> FeasibleRegion::project(std::span<const double> x) const {
  check_dim(*this, x);
  std::vector<double> out(x.begin(), x.end());
  switch (kind_) {
    case RegionKind::AllSpace:
      break;
    case RegionKind::Box:
      for (std::size_t i = 0; i < dim_; ++i)
        out[i] = std::clamp(out[i], lower_[i], upper_[i]);
      break;
    case RegionKind::L2Ball: {
      double d = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) {
        const double e = out[i] - center_[i];
        d += e * e;
      }
      d = std::sqrt(d);
      if (d > radius_) {
        const double scale = radius_ / d;
        for (std::size_t i = 0; i < dim_; ++i)
          out[i] = center_[i] + scale * (out[i] - center_[i]);
      }
      break;
    }
  }
  return out;
}

bool FeasibleRegion::contains(std::span<const double> x, double tol) const {
  check_dim(*this, x);
  switch (kind_) {
    case RegionKind::AllSpace:
      return true;
    case RegionKind::Box:
      for (std::size_t i = 0; i < dim_; ++i)
        if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
      return true;
    case RegionKind::L2Ball: {
      double d = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) {
        const double e = x[i] - center_[i];
        d += e * e;
      }
      return std::sqrt(d) <= radius_ + tol;
    }
  }
  return false;
}

std::vector<double> FeasibleRegion::interior_point() const {
  switch (kind_) {
    case RegionKind::AllSpace:
      return std::vector<double>(dim_, 0.0);
    case RegionKind::Box: {
      std::vector<double> mid(dim_);
      for (std::size_t i = 0; i < dim_; ++i) mid[i] = 0.5 * (lower_[i] + upper_[i]);
      return mid;
    }
    case RegionKind::L2Ball:
      return center_;
  }
  return std::vector<double>(dim_, 0.0);
}

std::vector<double> FeasibleRegion::random_point(Rng& rng) const {
  switch (kind_) {
    case RegionKind::AllSpace:
      return rng.normal_vector(dim_);
    case RegionKind::Box: {
      std::vector<double> out(dim_);
      for (std::size_t i = 0; i < dim_; ++i)
        out[i] = lower_[i] + (upper_[i] - lower_[i]) * rng.uniform01();
      return out;
    }
    case RegionKind::L2Ball: {
      // Normal direction times radius * u^(1/N): uniform over the ball.
      std::vector<double> dir = rng.normal_vector(dim_);
      const double n = norm2(dir);
      const double r = radius_ * std::pow(rng.uniform01(), 1.0 / static_cast<double>(dim_));
      std::vector<double> out(dim_);
      const double scale = (n > 0.0) ? r / n : 0.0;
      for (std::size_t i = 0; i < dim_; ++i) out[i] = center_[i] + scale * dir[i];
      return out;
    }
  }
  return std::vector<double>(dim_, 0.0);
}

std::vector<double> project(const FeasibleRegion& region, std::span<const double> x) {
  return region.project(x);
}

double project_interval(double v, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("project_interval: lo > hi");
  return std::clamp(v, lo, hi);
}

}  // namespace semidev
