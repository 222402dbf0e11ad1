#include "bubbletower/core_profiles.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bubbletower/errors.hpp"

namespace bubbletower {

Dimension::Dimension(int n) : n_(n) {
  require(n >= 3, ErrorKind::validation,
          "dimension n=" + std::to_string(n) + " violates the rule n >= 3");
  two_star_ = 2.0 * n / (n - 2.0);
  p_ = two_star_ - 1.0;
  alpha_ = std::pow(n * (n - 2.0), (n - 2.0) / 4.0);
  sphere_area_ = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

void BubbleParam::check_bounds(double eta) const {
  require(mu > 0.0, ErrorKind::parameter, "bubble scale mu must be positive");
  require(d > eta && d < 1.0 / eta, ErrorKind::parameter,
          "dilation d=" + std::to_string(d) + " outside (eta, 1/eta)");
  require(norm(sigma) <= 1.0 / eta, ErrorKind::parameter, "drift |sigma| exceeds 1/eta");
  require(sign == 1 || sign == -1, ErrorKind::parameter, "bubble sign must be +1 or -1");
}

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorKind::parameter, "point dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

double standard_bubble(const Dimension& dim, std::span<const double> y) {
  return standard_bubble_radial(dim, norm(y));
}

double standard_bubble_radial(const Dimension& dim, double r) {
  return dim.alpha() * std::pow(1.0 + r * r, -dim.half_nm2());
}

double bubble_at(const Dimension& dim, const BubbleParam& b, std::span<const double> x) {
  require(b.mu > 0.0, ErrorKind::parameter, "bubble scale mu must be positive");
  return bubble_radial(dim, b.mu, std::sqrt(squared_distance(x, b.xi)));
}

double bubble_radial(const Dimension& dim, double mu, double r) {
  const double a = dim.half_nm2();
  return dim.alpha() * std::pow(mu, a) * std::pow(mu * mu + r * r, -a);
}

double psi0_radial(const Dimension& dim, double mu, double r) {
  const double m2 = mu * mu;
  const double r2 = r * r;
  return dim.half_nm2() * dim.alpha() * std::pow(mu, dim.half_nm2()) * (r2 - m2) *
         std::pow(m2 + r2, -0.5 * dim.n());
}

double psih_radial_factor(const Dimension& dim, double mu, double r) {
  return (dim.n() - 2.0) * dim.alpha() * std::pow(mu, 0.5 * dim.n()) *
         std::pow(mu * mu + r * r, -0.5 * dim.n());
}

double psi_at(const Dimension& dim, int h, double mu, std::span<const double> xi,
              std::span<const double> x) {
  require(mu > 0.0, ErrorKind::parameter, "kernel scale mu must be positive");
  require(h >= 0 && h <= dim.n(), ErrorKind::parameter,
          "kernel index h=" + std::to_string(h) + " outside 0..n");
  const double r = std::sqrt(squared_distance(x, xi));
  if (h == 0) return psi0_radial(dim, mu, r);
  return psih_radial_factor(dim, mu, r) * (x[h - 1] - xi[h - 1]);
}

double log_e_plus(double u) noexcept {
  return 1.0 + std::log1p(std::abs(u) / std::numbers::e);
}

double f_eps(const Dimension& dim, double u, double eps) {
  if (u == 0.0) return 0.0;
  const double a = std::abs(u);
  double v = std::pow(a, dim.p());
  if (eps != 0.0) v *= std::exp(-eps * std::log(log_e_plus(a)));
  return u > 0.0 ? v : -v;
}

double f_eps_prime(const Dimension& dim, double u, double eps) {
  if (u == 0.0) return 0.0;
  const double a = std::abs(u);
  const double p = dim.p();
  const double base = std::pow(a, p - 1.0);
  if (eps == 0.0) return p * base;
  const double L = log_e_plus(a);
  return base * std::exp(-eps * std::log(L)) * (p - eps * a / ((std::numbers::e + a) * L));
}

}  // namespace bubbletower
