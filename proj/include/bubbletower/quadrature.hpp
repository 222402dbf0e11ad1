#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "bubbletower/core_profiles.hpp"

namespace bubbletower {

struct QuadSpec {
  /// Geometric radial panels [R 2^{-j-1}, R 2^{-j}] below the truncation radius R.
  int radial_panels = 12;
  /// Gauss points per polar angle of the spherical product rule.
  int spherical_order = 12;
  /// Inner region [0, R]; the tail [R, inf) is integrated by an inverse map.
  double truncation_radius = 64.0;
  double tolerance = 1e-10;

  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive 15-point Gauss-Kronrod on [a, b]; b may be +inf.
QuadResult integrate_interval(const std::function<double(double)>& f, double a, double b,
                              double tolerance);

/// omega_{n-1} * int_0^inf g(r) r^{n-1} dr, for integrands decaying faster than r^{-n}.
QuadResult integrate_radial(const Dimension& dim, const std::function<double(double)>& g,
                            const QuadSpec& spec);

/// omega_{n-1} * int_0^{r_max} g(r) r^{n-1} dr for integrands with structure
/// down to `smallest_scale`; integrates in log r above smallest_scale * 1e-4.
QuadResult integrate_radial_ball(const Dimension& dim, const std::function<double(double)>& g,
                                 double r_max, double smallest_scale, double tolerance);

/// Integral over R^n (or the ball of radius r_max) of g(|y|, cos angle to a
/// fixed axis): omega_{n-2} int int g(r, t) r^{n-1} (1-t^2)^{(n-3)/2} dt dr.
QuadResult integrate_axisymmetric(const Dimension& dim,
                                  const std::function<double(double, double)>& g,
                                  const QuadSpec& spec,
                                  double r_max = std::numeric_limits<double>::infinity());

/// Product rule on S^{n-1}: Gauss-Legendre in each polar angle, trapezoid
/// in the azimuth. Weights sum to omega_{n-1}.
class SphereRule {
 public:
  SphereRule(int n, int order);

  std::size_t size() const { return weights_.size(); }
  std::span<const double> point(std::size_t i) const {
    return {points_.data() + i * n_, static_cast<std::size_t>(n_)};
  }
  double weight(std::size_t i) const { return weights_[i]; }

 private:
  int n_;
  std::vector<double> points_;
  std::vector<double> weights_;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

using Integrand = std::function<double(std::span<const double>)>;

/// Radial panels x spherical product rule over R^n. Integrand must decay at
/// least like |y|^{-(n+delta)}. Throws AccuracyError when the radial error
/// estimate exceeds the tolerance budget.
QuadResult integrate_rn(const Dimension& dim, const Integrand& f, const QuadSpec& spec);

}  // namespace bubbletower
