#include "bubbletower/tower_ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bubbletower/errors.hpp"

namespace bubbletower {

AnnuliDecomposition AnnuliDecomposition::make(std::span<const double> mu, double rho) {
  require(!mu.empty(), ErrorKind::parameter, "annuli: need at least one scale");
  require(rho > 0.0, ErrorKind::parameter, "annuli: rho must be positive");
  const std::size_t k = mu.size();
  AnnuliDecomposition dec;
  for (std::size_t i = 0; i < k; ++i) {
    require(mu[i] > 0.0 && (i == 0 || mu[i] < mu[i - 1]), ErrorKind::parameter,
            "annuli: scales must be positive and decreasing");
    const double prev = i == 0 ? rho * rho / mu[0] : mu[i - 1];
    const double next = i + 1 == k ? 0.0 : mu[i + 1];
    dec.annuli.push_back({std::sqrt(mu[i] * next), std::sqrt(mu[i] * prev)});
  }
  return dec;
}

int AnnuliDecomposition::index_of(double r) const {
  for (std::size_t i = 0; i < annuli.size(); ++i)
    if (annuli[i].contains(r)) return static_cast<int>(i);
  return -1;
}

void AnnuliDecomposition::validate() const {
  require(!annuli.empty(), ErrorKind::structure, "annuli: empty decomposition");
  require(annuli.back().inner == 0.0, ErrorKind::structure, "annuli: innermost must reach 0");
  for (std::size_t i = 0; i < annuli.size(); ++i) {
    require(annuli[i].inner < annuli[i].outer, ErrorKind::structure, "annuli: empty annulus");
    if (i > 0)
      require(annuli[i].outer == annuli[i - 1].inner, ErrorKind::structure,
              "annuli: consecutive annuli must share a radius");
  }
}

StepValue quintic_step(double s) {
  if (s <= 0.0) return {0.0, 0.0, 0.0};
  if (s >= 1.0) return {1.0, 0.0, 0.0};
  const double s2 = s * s;
  return {s2 * s * (10.0 - 15.0 * s + 6.0 * s2), 30.0 * s2 * (1.0 - s) * (1.0 - s),
          60.0 * s * (1.0 - s) * (1.0 - 2.0 * s)};
}

StepValue CutOff::at(double r) const {
  if (r < a) {
    if (a == 0.0) return {1.0, 0.0, 0.0};
    const double w = 0.5 * a;
    const auto st = quintic_step((r - w) / w);
    return {st.value, st.d1 / w, st.d2 / (w * w)};
  }
  if (r <= b) return {1.0, 0.0, 0.0};
  const double w = b;
  const auto st = quintic_step((2.0 * b - r) / w);
  return {st.value, -st.d1 / w, st.d2 / (w * w)};
}

// max of 30 s^2 (1-s)^2 is 15/8; max of |60 s (1-s)(1-2s)| is 10/sqrt(3)
double CutOff::slope_bound() const {
  const double w = a > 0.0 ? std::min(0.5 * a, b) : b;
  return 1.875 / w;
}

double CutOff::curvature_bound() const {
  const double w = a > 0.0 ? std::min(0.5 * a, b) : b;
  return (10.0 / std::sqrt(3.0)) / (w * w);
}

CutOff annulus_cutoff(const Annulus& annulus) { return {annulus.inner, annulus.outer}; }

double assemble_tower(const BallDomain& dom, const TowerConfig& cfg, std::span<const double> x) {
  const bool exact = cfg.centered() &&
                     squared_distance(cfg.xi, dom.center()) <= 1e-28 * dom.radius() * dom.radius();
  const auto method = exact ? ProjectionMethod::exact_centered : ProjectionMethod::asymptotic;
  double v = 0.0;
  for (const auto& b : cfg.bubbles) v += b.sign * project_bubble(dom, b, x, method);
  return v;
}

std::vector<double> assemble_tower_radial(const BallDomain& dom, const TowerConfig& cfg,
                                          const RadialGrid& grid) {
  require(cfg.centered() &&
              squared_distance(cfg.xi, dom.center()) <= 1e-28 * dom.radius() * dom.radius(),
          ErrorKind::unsupported, "radial assembly needs a tower centered in the ball");
  require(std::abs(grid.radius() - dom.radius()) <= 1e-14 * dom.radius(), ErrorKind::parameter,
          "radial assembly: grid must end at the ball radius");
  std::vector<double> v(grid.size(), 0.0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double s = 0.0;
    for (const auto& b : cfg.bubbles)
      s += b.sign * projected_bubble_radial(cfg.dim, b.mu, dom.radius(), grid[j]);
    v[j] = s;
  }
  v.back() = 0.0;
  return v;
}

double residual_norm(const BallDomain& dom, const TowerConfig& cfg, const RadialGrid& grid) {
  const auto mu = cfg.scales();
  const double smallest = *std::min_element(mu.begin(), mu.end());
  require(grid.nodes_below(smallest) >= 10, ErrorKind::resolution,
          "residual_norm: fewer than 10 grid nodes below the smallest scale " +
              std::to_string(smallest));
  const RadialOperator op(cfg.dim, grid);
  const auto v = assemble_tower_radial(dom, cfg, grid);
  auto r = op.stiffness(v);
  const auto vol = op.volumes();
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= vol[i] * f_eps(cfg.dim, v[i], cfg.eps);
  return op.dual_norm(r);
}

FitResult fit_asymptotic_order(std::span<const std::pair<double, double>> samples,
                               const FitOptions& opts) {
  const int m = static_cast<int>(samples.size());
  require(m >= opts.min_samples, ErrorKind::parameter,
          "fit: need at least " + std::to_string(opts.min_samples) + " samples");
  double tmin = INFINITY, tmax = 0.0;
  for (const auto& [t, y] : samples) {
    require(t > 0.0 && y > 0.0 && std::isfinite(t) && std::isfinite(y), ErrorKind::parameter,
            "fit: samples must be positive and finite");
    if (opts.model == FitModel::power_log)
      require(t != 1.0, ErrorKind::parameter, "fit: power_log model needs t != 1");
    tmin = std::min(tmin, t);
    tmax = std::max(tmax, t);
  }
  require(std::log10(tmax / tmin) >= opts.min_decades * (1.0 - 1e-12), ErrorKind::parameter,
          "fit: samples must span at least " + std::to_string(opts.min_decades) + " decades");
  double sx = 0.0, sy = 0.0;
  std::vector<double> xs, ys;
  for (const auto& [t, y] : samples) {
    const double x = std::log(t);
    double ly = std::log(y);
    if (opts.model == FitModel::power_log) ly -= opts.log_power * std::log(std::abs(std::log(t)));
    xs.push_back(x);
    ys.push_back(ly);
    sx += x;
    sy += ly;
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  FitResult fit;
  fit.samples = m;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double rss = 0.0;
  for (int i = 0; i < m; ++i) {
    const double e = ys[i] - fit.intercept - fit.exponent * xs[i];
    rss += e * e;
  }
  fit.width = m > 2 ? 2.0 * std::sqrt(rss / (m - 2) / sxx) : INFINITY;
  return fit;
}

}  // namespace bubbletower
