#pragma once

// Closed-form bubble profiles, kernel functions and the log-perturbed
// critical nonlinearity f_eps(u) = |u|^{p-1} u / ln(e + |u|)^eps.

#include <span>
#include <vector>

namespace bubbletower {

using Point = std::vector<double>;

/// Space dimension with the constants every integrand needs, computed once.
class Dimension {
 public:
  explicit Dimension(int n);

  int n() const noexcept { return n_; }
  /// 2* = 2n/(n-2)
  double critical_exponent() const noexcept { return two_star_; }
  /// p = 2* - 1
  double p() const noexcept { return p_; }
  /// alpha_n = (n(n-2))^{(n-2)/4}
  double alpha() const noexcept { return alpha_; }
  /// omega_{n-1} = |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2)
  double sphere_area() const noexcept { return sphere_area_; }
  /// (n-2)/2, the decay power of the bubble
  double half_nm2() const noexcept { return 0.5 * (n_ - 2); }

  bool operator==(const Dimension& other) const noexcept { return n_ == other.n_; }

 private:
  int n_;
  double two_star_;
  double p_;
  double alpha_;
  double sphere_area_;
};

/// One bubble of a tower: scale, center, sign, dilation d and drift sigma.
struct BubbleParam {
  double mu = 1.0;
  Point xi;
  int sign = 1;
  double d = 1.0;
  Point sigma;

  /// Checks eta < d < 1/eta and |sigma| <= 1/eta; throws a parameter error.
  void check_bounds(double eta) const;
};

double norm(std::span<const double> x);
double squared_distance(std::span<const double> x, std::span<const double> y);

/// U(y) = alpha_n (1 + |y|^2)^{-(n-2)/2}
double standard_bubble(const Dimension& dim, std::span<const double> y);
double standard_bubble_radial(const Dimension& dim, double r);

/// U_{mu,xi}(x) = alpha_n mu^{(n-2)/2} / (mu^2 + |x - xi|^2)^{(n-2)/2}
double bubble_at(const Dimension& dim, const BubbleParam& b, std::span<const double> x);
double bubble_radial(const Dimension& dim, double mu, double r);

/// Kernel functions of the linearized equation at U_{mu,xi}: h = 0 is the
/// dilation mode mu dU/dmu, h = 1..n the translation modes mu dU/dxi_h.
double psi_at(const Dimension& dim, int h, double mu, std::span<const double> xi,
              std::span<const double> x);
/// psi^0 as a function of r = |x - xi|.
double psi0_radial(const Dimension& dim, double mu, double r);
/// psi^h / (x_h - xi_h): the radial factor of a translation mode.
double psih_radial_factor(const Dimension& dim, double mu, double r);

/// ln(e + |u|), stable for tiny |u|.
double log_e_plus(double u) noexcept;

double f_eps(const Dimension& dim, double u, double eps);
double f_eps_prime(const Dimension& dim, double u, double eps);

/// f_0(u) = |u|^{p-1} u and f_0'(u) = p |u|^{p-1}.
inline double f_zero(const Dimension& dim, double u) { return f_eps(dim, u, 0.0); }
inline double f_zero_prime(const Dimension& dim, double u) { return f_eps_prime(dim, u, 0.0); }

}  // namespace bubbletower
