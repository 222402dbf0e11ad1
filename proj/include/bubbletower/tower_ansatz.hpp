#pragma once

// The tower V = sum_i (-1)^i P U_{mu_i, xi_i}, its annuli decomposition,
// smooth cut-offs, residual norms and asymptotic order fits.

#include <span>
#include <utility>
#include <vector>

#include "bubbletower/domain_green.hpp"
#include "bubbletower/projection.hpp"
#include "bubbletower/radial_grid.hpp"
#include "bubbletower/tower_config.hpp"

namespace bubbletower {

struct Annulus {
  double inner = 0.0;
  double outer = 0.0;
  bool contains(double r) const { return r >= inner && r < outer; }
};

/// Annulus i has radii sqrt(mu_i mu_{i+1}) < r < sqrt(mu_i mu_{i-1}) with
/// mu_0 = rho^2 / mu_1 and mu_{k+1} = 0, so the union is B(xi, rho).
struct AnnuliDecomposition {
  std::vector<Annulus> annuli;

  static AnnuliDecomposition make(std::span<const double> mu, double rho);
  /// 0-based annulus index containing r, or -1 outside B(xi, rho).
  int index_of(double r) const;
  void validate() const;
};

/// C^2 step 10 s^3 - 15 s^4 + 6 s^5 on [0, 1] with its first two derivatives.
struct StepValue {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};
StepValue quintic_step(double s);

/// Radial cut-off equal to 1 on [a, b], 0 outside [a/2, 2b] (or [0, 2b] when
/// a = 0), with quintic ramps in between.
struct CutOff {
  double a = 0.0;
  double b = 1.0;
  StepValue at(double r) const;
  /// Maximal |chi'| and |chi''| of the ramps.
  double slope_bound() const;
  double curvature_bound() const;
};
CutOff annulus_cutoff(const Annulus& annulus);

/// V(x); a centered tower on a ball uses the exact centered projection.
double assemble_tower(const BallDomain& dom, const TowerConfig& cfg, std::span<const double> x);
/// Nodal values of a centered tower on a radial grid of the ball.
std::vector<double> assemble_tower_radial(const BallDomain& dom, const TowerConfig& cfg,
                                          const RadialGrid& grid);

/// Discrete energy-dual norm of -Delta_h V - f_eps(V) on the grid. Needs at
/// least 10 nodes below the smallest scale.
double residual_norm(const BallDomain& dom, const TowerConfig& cfg, const RadialGrid& grid);

enum class FitModel { power, power_log };

struct FitOptions {
  FitModel model = FitModel::power;
  /// y = C t^a |ln t|^log_power in the power_log model
  double log_power = 1.0;
  int min_samples = 5;
  double min_decades = 2.0;
};

struct FitResult {
  double exponent = 0.0;
  double intercept = 0.0;
  /// two standard errors of the slope
  double width = 0.0;
  int samples = 0;
};

/// Least-squares slope of log y against log t.
FitResult fit_asymptotic_order(std::span<const std::pair<double, double>> samples,
                               const FitOptions& opts = {});

}  // namespace bubbletower
