#pragma once

#include <span>
#include <vector>

#include "bubbletower/core_profiles.hpp"

namespace bubbletower {

class GreenProvider;

/// t = eps / |ln eps|^2, the small parameter of the scale schedule.
double schedule_parameter(double eps);

/// mu_i = t^{(2i-1)/(n-2)} d_i, i = 1..k. Requires eps in (0, 1/e).
std::vector<double> mu_schedule(const Dimension& dim, int k, double eps,
                                std::span<const double> d);

/// A tower of k bubbles sum_i (-1)^i P U_{mu_i, xi_i} concentrating at xi.
struct TowerConfig {
  Dimension dim{3};
  int k = 1;
  double eps = 0.1;
  std::vector<BubbleParam> bubbles;
  Point xi;
  double rho = 0.5;

  /// Builds the bubbles from dilations d and drifts sigma (sigma_k forced to 0;
  /// an empty sigma means all zero). xi_i = xi + mu_i sigma_i, sign (-1)^i.
  static TowerConfig make(const Dimension& dim, int k, double eps, std::span<const double> d,
                          const std::vector<Point>& sigma, Point xi, double rho);

  /// Checks the schedule, the ordering of scales, the parameter box of size
  /// eta and dist(xi, boundary) > eta.
  void validate(const GreenProvider& domain, double eta) const;

  bool centered() const;
  std::vector<double> scales() const;
};

}  // namespace bubbletower
