#pragma once

// Numerical checks of the asymptotic orders behind the reduction: L^q norm
// scalings of bubbles and kernel functions, projection errors, Gram matrix
// decay and nonlinear interaction norms, each fitted over a sweep.

#include <Eigen/Dense>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bubbletower/core_profiles.hpp"
#include "bubbletower/tower_ansatz.hpp"

namespace bubbletower {

enum class Verdict { pass, marginal, fail };
std::string_view verdict_name(Verdict v) noexcept;

/// pass within tolerance, marginal within twice the tolerance.
Verdict judge(double fitted, double predicted, double tolerance);
/// One-sided version for lower bounds: fitted >= bound - tolerance.
Verdict judge_at_least(double fitted, double bound, double tolerance);

/// eps = 2^{-3} ... 2^{-10}
std::vector<double> default_lab_eps();

struct LabOptions {
  std::vector<double> eps = default_lab_eps();
  double quad_tolerance = 1e-9;
};

struct SweepSample {
  double eps = 0.0;
  double t = 0.0;          ///< eps / |ln eps|^2
  double sweep_var = 0.0;  ///< abscissa of the fit
  double measured = 0.0;   ///< raw quantity
  double scaled = 0.0;     ///< measured with the stated log factor divided out
};

struct OrderCheck {
  std::string name;
  std::string sweep_variable;  ///< "t", "eps" or "mu"
  std::vector<SweepSample> samples;
  double predicted = 0.0;
  bool lower_bound = false;  ///< verdict on fitted >= predicted - tolerance
  double tolerance = 0.1;
  FitResult fit;
  /// fitted exponent without the largest abscissa; NaN when not computable
  double fit_drop_largest = 0.0;
  Verdict verdict = Verdict::fail;
  std::string note;
};

enum class NormTarget { U, psi0, psih };
std::string_view target_name(NormTarget t) noexcept;

/// Average of |theta_1|^q over the unit sphere S^{n-1}.
double coordinate_moment(const Dimension& dim, double q);

/// int_B |target_{mu}|^q over the unit ball with mu = t^{1/(n-2)}, fitted
/// against t; predicted exponent from the three regimes, the critical q
/// carries one power of |ln t|.
OrderCheck verify_norm_scaling(const Dimension& dim, NormTarget target, double q,
                               const LabOptions& opts = {});

enum class InteractionCase {
  sumbu2,  ///< |f0'(V) - sum_i f0'(P U_i)|_{n/2} against t
  fepli1,  ///< |f_eps(V) - sum_i (-1)^i f0(P U_i)|_{2n/(n+2)} against eps
  fepli2,  ///< |f_eps'(V) - f0'(V)|_{n/2} against eps
};
std::string_view case_name(InteractionCase c) noexcept;

/// Interaction norms for the centered tower with dilations d_bar on the unit
/// ball. For fepli1/fepli2 with n <= 6 the factor ln|ln t| is divided out.
OrderCheck verify_nonlinear_interactions(const Dimension& dim, int k, InteractionCase c,
                                         std::span<const double> d_bar,
                                         const LabOptions& opts = {});

struct ProjectionGramReport {
  std::vector<OrderCheck> checks;
  /// relative change of the diagonal Gram entries of bubble 1 between the two
  /// smallest eps
  double diagonal_change = 0.0;
  Verdict diagonal_verdict = Verdict::fail;
  Eigen::MatrixXd last_gram;
};

/// Projection error orders of P psi^0, P psi^h and of the asymptotic P U,
/// plus off-diagonal Gram decay (k >= 2) and diagonal stabilization.
ProjectionGramReport verify_projection_and_gram(const Dimension& dim, int k,
                                                std::span<const double> d_bar,
                                                const LabOptions& opts = {});

}  // namespace bubbletower
