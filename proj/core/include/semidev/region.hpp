#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "semidev/rng.hpp"

namespace semidev {

enum class RegionKind { AllSpace, Box, L2Ball };

// Nonempty closed convex feasible set with a cheap Euclidean projection.
class FeasibleRegion {
 public:
  static FeasibleRegion all_space(std::size_t dim);
  static FeasibleRegion box(std::vector<double> lower, std::vector<double> upper);
  static FeasibleRegion l2_ball(std::vector<double> center, double radius);

  RegionKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<double>& lower() const noexcept { return lower_; }
  const std::vector<double>& upper() const noexcept { return upper_; }
  const std::vector<double>& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }

  std::vector<double> project(std::span<const double> x) const;
  bool contains(std::span<const double> x, double tol = 1e-12) const;

  // A deterministic interior point (ball/box center; origin for all-space).
  std::vector<double> interior_point() const;
  // Uniform-ish sample of the region (standard normal for all-space); used
  // for grids of feasible evaluation points.
  std::vector<double> random_point(Rng& rng) const;

 private:
  FeasibleRegion() = default;

  RegionKind kind_ = RegionKind::AllSpace;
  std::size_t dim_ = 0;
  std::vector<double> lower_, upper_;  // box
  std::vector<double> center_;         // ball
  double radius_ = 0.0;                // ball
};

std::vector<double> project(const FeasibleRegion& region, std::span<const double> x);

// Clamp to [lo, hi]; throws if lo > hi.
double project_interval(double v, double lo, double hi);

}  // namespace semidev
