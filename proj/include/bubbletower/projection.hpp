#pragma once

// H^1_0 projections P U and P psi^h of bubbles and kernel functions.

#include <Eigen/Dense>
#include <span>

#include "bubbletower/core_profiles.hpp"
#include "bubbletower/domain_green.hpp"
#include "bubbletower/tower_config.hpp"

namespace bubbletower {

enum class ProjectionMethod {
  /// U - alpha mu^{(n-2)/2} H(x, xi) and the analogous kernel expansions.
  asymptotic,
  /// Centered bubble on a ball: the boundary trace is constant (linear for
  /// translation modes), so the harmonic extension is known exactly.
  exact_centered,
};

/// Regular part normalized so that the bubble's far field alpha mu^{(n-2)/2}
/// |x - xi|^{2-n} is matched: (n-2) omega_{n-1} H(x, xi).
double unit_regular_part(const GreenProvider& dom, std::span<const double> x,
                         std::span<const double> xi);

double project_bubble(const BallDomain& dom, const BubbleParam& b, std::span<const double> x,
                      ProjectionMethod method);

double project_psi(const BallDomain& dom, int h, double mu, std::span<const double> xi,
                   std::span<const double> x, ProjectionMethod method);

/// Exact centered projections as functions of r = |x - center|.
double projected_bubble_radial(const Dimension& dim, double mu, double radius, double r);
double projected_psi0_radial(const Dimension& dim, double mu, double radius, double r);
/// P psi^h = factor(r) * (x_h - center_h) for h >= 1.
double projected_psih_radial_factor(const Dimension& dim, double mu, double radius, double r);

/// Gram matrix <P psi^l_i, P psi^h_j> in H^1_0, indexed (i, l) -> i (n+1) + l.
/// Entries are int_Omega f_0'(U_i) psi^l_i P psi^h_j. Only centered towers
/// on a ball are supported (drifts zero).
Eigen::MatrixXd gram_matrix(const BallDomain& dom, const TowerConfig& tower,
                            double tolerance = 1e-10);

}  // namespace bubbletower
