#pragma once

// Constants of the reduced finite-dimensional system, by quadrature over R^n,
// with closed forms where they exist.

#include <span>
#include <vector>

#include "bubbletower/core_profiles.hpp"
#include "bubbletower/quadrature.hpp"

namespace bubbletower {

/// a1 = p int U^{p-1} psi0, a2 = int U^p, a3 = ((n-2)/2) alpha^{p+1},
/// a4 = int | (1+|y|^2)^{-(n+2)/2} ln((1+|y|^2)^{-(n+2)/2}) psi0 |.
/// a3 is exact; the others are quadratures.
QuadResult const_a(const Dimension& dim, int idx, const QuadSpec& spec = {});

/// a2 = (n-2) alpha_n omega_{n-1}, from int U^p = int -Delta U.
double a2_closed_form(const Dimension& dim);

/// Closed form Gamma(n/2) pi^{n/2} / (4 Gamma(n+1)) n^{n/2} (n-2)^{(n+4)/2}.
double a4_closed_form(const Dimension& dim);

/// g(sigma) = int |y|^{2-n} (1 + |y - sigma|^2)^{-(n+2)/2} dy.
QuadResult g_sigma(const Dimension& dim, std::span<const double> sigma, const QuadSpec& spec = {});

/// g(0) = omega_{n-1} / n.
double g_zero_closed_form(const Dimension& dim);

enum class ExtremumType { minimum, maximum, none };

struct GProfile {
  std::vector<double> radii;   ///< |sigma| samples
  std::vector<double> values;  ///< g at those radii
  ExtremumType at_origin = ExtremumType::none;
};

/// Tabulates g along a ray and classifies the extremum at sigma = 0.
GProfile g_profile(const Dimension& dim, std::span<const double> radii, const QuadSpec& spec = {});

/// Diagonal Gram constants c_h = int p U^{p-1} (psi^h)^2 for the standard bubble.
QuadResult gram_constant(const Dimension& dim, int h, const QuadSpec& spec = {});

}  // namespace bubbletower
