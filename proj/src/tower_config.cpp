#include "bubbletower/tower_config.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bubbletower/domain_green.hpp"
#include "bubbletower/errors.hpp"

namespace bubbletower {

double schedule_parameter(double eps) {
  require(eps > 0.0 && eps < 1.0 / std::numbers::e, ErrorKind::parameter,
          "eps=" + std::to_string(eps) + " outside (0, 1/e)");
  const double l = std::log(eps);
  return eps / (l * l);
}

std::vector<double> mu_schedule(const Dimension& dim, int k, double eps,
                                std::span<const double> d) {
  require(k >= 1, ErrorKind::parameter, "tower depth k must be >= 1");
  require(static_cast<int>(d.size()) == k, ErrorKind::parameter,
          "mu_schedule: need one dilation per bubble");
  const double t = schedule_parameter(eps);
  std::vector<double> mu(k);
  for (int i = 1; i <= k; ++i) {
    require(d[i - 1] > 0.0, ErrorKind::parameter, "mu_schedule: dilations must be positive");
    mu[i - 1] = std::pow(t, (2.0 * i - 1.0) / (dim.n() - 2.0)) * d[i - 1];
  }
  return mu;
}

TowerConfig TowerConfig::make(const Dimension& dim, int k, double eps, std::span<const double> d,
                              const std::vector<Point>& sigma, Point xi, double rho) {
  require(static_cast<int>(xi.size()) == dim.n(), ErrorKind::parameter,
          "tower center has wrong dimension");
  require(sigma.empty() || static_cast<int>(sigma.size()) >= k - 1, ErrorKind::parameter,
          "tower: need k-1 drift vectors");
  const auto mu = mu_schedule(dim, k, eps, d);
  TowerConfig cfg;
  cfg.dim = dim;
  cfg.k = k;
  cfg.eps = eps;
  cfg.xi = xi;
  cfg.rho = rho;
  for (int i = 0; i < k; ++i) {
    BubbleParam b;
    b.mu = mu[i];
    b.d = d[i];
    b.sign = (i % 2 == 0) ? -1 : 1;  // (-1)^i with i starting at 1
    b.sigma = (i + 1 < k && !sigma.empty()) ? sigma[i] : Point(dim.n(), 0.0);
    require(static_cast<int>(b.sigma.size()) == dim.n(), ErrorKind::parameter,
            "drift vector has wrong dimension");
    b.xi = xi;
    for (int c = 0; c < dim.n(); ++c) b.xi[c] += b.mu * b.sigma[c];
    cfg.bubbles.push_back(std::move(b));
  }
  return cfg;
}

void TowerConfig::validate(const GreenProvider& domain, double eta) const {
  require(k >= 1 && static_cast<int>(bubbles.size()) == k, ErrorKind::parameter,
          "tower: bubble count differs from k");
  require(domain.contains(xi) && domain.boundary_distance(xi) > eta, ErrorKind::parameter,
          "tower: dist(xi, boundary) must exceed eta");
  require(rho > 0.0 && rho < domain.boundary_distance(xi), ErrorKind::parameter,
          "tower: B(xi, rho) must lie inside the domain");
  const double t = schedule_parameter(eps);
  for (int i = 0; i < k; ++i) {
    const auto& b = bubbles[i];
    b.check_bounds(eta);
    const double expect = std::pow(t, (2.0 * i + 1.0) / (dim.n() - 2.0)) * b.d;
    require(std::abs(b.mu - expect) <= 1e-12 * expect, ErrorKind::parameter,
            "tower: scale does not follow the schedule");
    if (i > 0)
      require(b.mu < bubbles[i - 1].mu, ErrorKind::parameter, "tower: scales must decrease");
  }
  require(norm(bubbles.back().sigma) == 0.0, ErrorKind::parameter,
          "tower: last bubble must have zero drift");
}

bool TowerConfig::centered() const {
  for (const auto& b : bubbles)
    if (squared_distance(b.xi, xi) != 0.0) return false;
  return true;
}

std::vector<double> TowerConfig::scales() const {
  std::vector<double> mu;
  for (const auto& b : bubbles) mu.push_back(b.mu);
  return mu;
}

}  // namespace bubbletower
