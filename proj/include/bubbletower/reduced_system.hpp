#pragma once

// The limit reduced system Gbar(s, sigma, xi) = 0 in the variables
// s_1 = d_1, s_i = d_i / d_{i-1}:
//   Gbar_0 = alpha a1 s_1^{n-2} phi(xi) + a3 sum_{i>=2} s_i^{(n-2)/2} g(sigma_i)
//            - a4 sum_i 2/(2i-1) |ln s_i|
//   Gbar_h = (alpha/2) a2 d_{xi_h} phi(xi) s_1^{n-2},  h = 1..n

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "bubbletower/constants.hpp"
#include "bubbletower/core_profiles.hpp"
#include "bubbletower/domain_green.hpp"
#include "bubbletower/quadrature.hpp"

namespace bubbletower {

/// Which regular part enters phi. `standard` is H = Phi - G with -Delta G = delta;
/// `unit_far_field` rescales it by (n-2) omega_{n-1}, the normalization in
/// which the bubble projection reads P U = U - alpha mu^{(n-2)/2} H.
enum class GreenNormalization { standard, unit_far_field };

struct ReducedConstants {
  Dimension dim{3};
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double a4 = 0.0;
  std::function<double(std::span<const double>)> g;
  std::shared_ptr<const GreenProvider> domain;
  GreenNormalization normalization = GreenNormalization::unit_far_field;

  static ReducedConstants compute(std::shared_ptr<const GreenProvider> domain,
                                  GreenNormalization normalization, const QuadSpec& spec = {});

  double robin(std::span<const double> x) const;
  Point robin_grad(std::span<const double> x) const;
  void validate() const;
};

struct ReducedState {
  Dimension dim{3};
  int k = 1;
  std::vector<double> s;
  std::vector<Point> sigma;  ///< k-1 drifts; sigma_k = 0 is implicit
  Point xi;
  Eigen::VectorXd g_value;
  Eigen::MatrixXd jac;
  Eigen::VectorXd singular_values;
  /// every root of each scalar balance found by the bracket scan
  std::vector<std::vector<double>> bracketed_roots;
  int newton_iterations = 0;
  ExtremumType g_extremum_at_origin = ExtremumType::none;

  /// d_1 = s_1, d_i = d_{i-1} s_i
  std::vector<double> dilations() const;
  void validate() const;
};

Eigen::VectorXd eval_G(const ReducedState& state, const ReducedConstants& consts);

/// Projected-equation expansion with the eps-dependent terms, in d variables:
/// row 0 is t G0^eps - (2k^2/(n-2)^2) a4 eps |ln t|, rows h are t G_h^eps.
/// Diagnostic only; never solved.
Eigen::VectorXd eval_G_eps(const ReducedState& state, const ReducedConstants& consts, double eps);

/// Central-difference Jacobian with respect to (s, sigma_1..sigma_{k-1}, xi).
Eigen::MatrixXd jacobian_fd(const ReducedState& state, const ReducedConstants& consts);

/// Scalar balance of bubble i (1-based): for i = 1 the phi term against
/// 2 a4 |ln s|, for i >= 2 the g term against 2/(2i-1) a4 |ln s|. The balances
/// sum to Gbar_0.
double bubble_balance(const ReducedConstants& consts, int i, double s, std::span<const double> xi,
                      std::span<const double> sigma);

/// All sign changes of f on a log-spaced grid over [lo, hi], each refined to
/// a root.
std::vector<double> bracket_roots(const std::function<double(double)>& f, double lo, double hi,
                                  int points_per_decade = 20);

struct ReducedOptions {
  double tolerance = 1e-10;
  int max_newton = 50;
  double bracket_lo = 1e-6;
  double bracket_hi = 1e6;
};

/// xi at the Robin minimum, sigma at the extremum of g (the origin), each
/// s_i bracketed on its balance and polished by damped minimum-norm Newton on
/// the full system.
ReducedState solve_reduced(const Dimension& dim, int k, const ReducedConstants& consts,
                           const SearchBox& box, const ReducedOptions& opts = {});

/// Search box covering the central 90% of a ball.
SearchBox ball_search_box(const BallDomain& ball);

}  // namespace bubbletower
