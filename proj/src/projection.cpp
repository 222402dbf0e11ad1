#include "bubbletower/projection.hpp"

#include <algorithm>
#include <cmath>

#include "bubbletower/errors.hpp"
#include "bubbletower/quadrature.hpp"

namespace bubbletower {

namespace {

bool is_center(const BallDomain& dom, std::span<const double> xi) {
  return squared_distance(xi, dom.center()) <= 1e-28 * dom.radius() * dom.radius();
}

void require_centered(const BallDomain& dom, std::span<const double> xi) {
  require(is_center(dom, xi), ErrorKind::unsupported,
          "exact_centered projection needs the bubble at the ball center");
}

}  // namespace

double unit_regular_part(const GreenProvider& dom, std::span<const double> x,
                         std::span<const double> xi) {
  const auto& dim = dom.dim();
  return (dim.n() - 2.0) * dim.sphere_area() * dom.regular_part(x, xi);
}

double projected_bubble_radial(const Dimension& dim, double mu, double radius, double r) {
  return bubble_radial(dim, mu, r) - bubble_radial(dim, mu, radius);
}

double projected_psi0_radial(const Dimension& dim, double mu, double radius, double r) {
  return psi0_radial(dim, mu, r) - psi0_radial(dim, mu, radius);
}

double projected_psih_radial_factor(const Dimension& dim, double mu, double radius, double r) {
  return psih_radial_factor(dim, mu, r) - psih_radial_factor(dim, mu, radius);
}

double project_bubble(const BallDomain& dom, const BubbleParam& b, std::span<const double> x,
                      ProjectionMethod method) {
  require(b.mu > 0.0, ErrorKind::parameter, "project_bubble: mu must be positive");
  const auto& dim = dom.dim();
  if (method == ProjectionMethod::exact_centered) {
    require_centered(dom, b.xi);
    return projected_bubble_radial(dim, b.mu, dom.radius(),
                                   std::sqrt(squared_distance(x, dom.center())));
  }
  return bubble_at(dim, b, x) -
         dim.alpha() * std::pow(b.mu, dim.half_nm2()) * unit_regular_part(dom, x, b.xi);
}

double project_psi(const BallDomain& dom, int h, double mu, std::span<const double> xi,
                   std::span<const double> x, ProjectionMethod method) {
  const auto& dim = dom.dim();
  const double psi = psi_at(dim, h, mu, xi, x);
  if (method == ProjectionMethod::exact_centered) {
    require_centered(dom, xi);
    if (h == 0) return psi - psi0_radial(dim, mu, dom.radius());
    return psi - psih_radial_factor(dim, mu, dom.radius()) * (x[h - 1] - dom.center()[h - 1]);
  }
  if (h == 0)
    return psi - dim.half_nm2() * dim.alpha() * std::pow(mu, dim.half_nm2()) *
                     unit_regular_part(dom, x, xi);
  const Point grad = dom.regular_part_grad_y(x, xi);
  const double scale = (dim.n() - 2.0) * dim.sphere_area();
  return psi - dim.alpha() * std::pow(mu, 0.5 * dim.n()) * scale * grad[h - 1];
}

Eigen::MatrixXd gram_matrix(const BallDomain& dom, const TowerConfig& tower, double tolerance) {
  require(tower.centered() && is_center(dom, tower.xi), ErrorKind::unsupported,
          "gram_matrix: only centered towers on a ball are supported");
  const auto& dim = dom.dim();
  const int n = dim.n();
  const int k = tower.k;
  const double R = dom.radius();
  const double p = dim.p();
  const auto mu = tower.scales();
  const double smallest = *std::min_element(mu.begin(), mu.end());

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k * (n + 1), k * (n + 1));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double mi = mu[i], mj = mu[j];
      auto weight = [&](double r) { return p * std::pow(bubble_radial(dim, mi, r), p - 1.0); };
      const double dilation =
          integrate_radial_ball(
              dim,
              [&](double r) {
                return weight(r) * psi0_radial(dim, mi, r) *
                       projected_psi0_radial(dim, mj, R, r);
              },
              R, smallest, tolerance)
              .value;
      // y_l y_h averages to delta_lh r^2 / n over spheres; mixed 0/h terms are odd
      const double translation =
          integrate_radial_ball(
              dim,
              [&](double r) {
                return weight(r) * psih_radial_factor(dim, mi, r) *
                       projected_psih_radial_factor(dim, mj, R, r) * r * r / n;
              },
              R, smallest, tolerance)
              .value;
      gram(i * (n + 1), j * (n + 1)) = dilation;
      for (int h = 1; h <= n; ++h) gram(i * (n + 1) + h, j * (n + 1) + h) = translation;
    }
  }
  return gram;
}

}  // namespace bubbletower
