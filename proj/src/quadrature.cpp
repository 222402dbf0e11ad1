#include "bubbletower/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "bubbletower/errors.hpp"

namespace bubbletower {

namespace {

constexpr unsigned kMaxDepth = 20;

// Error budget: estimates above this multiple of tolerance * L1 are failures.
constexpr double kBudgetFactor = 100.0;

struct PanelSum {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;

  void add(const std::function<double(double)>& f, double a, double b, double tol) {
    double err = 0.0, l1_panel = 0.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    if (std::isinf(b)) {
      value += GK::integrate(f, a, b, kMaxDepth, tol, &err, &l1_panel);
      error += err;
      l1 += l1_panel;
      return;
    }
    // Map to [0, 1]: the error estimate has a floor that scales with the width.
    const double w = b - a;
    value += w * GK::integrate([&](double s) { return f(a + w * s); }, 0.0, 1.0, kMaxDepth, tol,
                               &err, &l1_panel);
    error += std::abs(w) * err;
    l1 += std::abs(w) * l1_panel;
  }

  // Relative tolerance alone never terminates on integrands that cancel to
  // roundoff; shifting by the mean of |f| gives an absolute floor.
  void add_floored(const std::function<double(double)>& f,
                   const std::function<double(double)>& f_abs, double a, double b, double tol) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    std::function<double(double)> g = f, g_abs = f_abs;
    if (std::isinf(b)) {
      // x = a / s
      g = [&, a](double s) { return s == 0.0 ? 0.0 : f(a / s) * a / (s * s); };
      g_abs = [&, a](double s) { return s == 0.0 ? 0.0 : f_abs(a / s) * a / (s * s); };
      a = 0.0;
      b = 1.0;
    }
    const double w = b - a;
    const double m = GK::integrate([&](double s) { return g_abs(a + w * s); }, 0.0, 1.0, 0);
    double err = 0.0;
    const double v = GK::integrate([&](double s) { return g(a + w * s) + m; }, 0.0, 1.0,
                                   kMaxDepth, tol, &err);
    value += w * (v - m);
    error += w * err;
    l1 += w * m;
  }

  QuadResult finish(double tol, const char* what) const {
    if (!std::isfinite(value) || error > kBudgetFactor * tol * l1 + 1e-300)
      throw AccuracyError(std::string(what) + ": tolerance not reached", error);
    return {value, error};
  }
};

std::vector<double> panel_breaks(const QuadSpec& spec) {
  std::vector<double> br{0.0};
  for (int j = spec.radial_panels; j >= 0; --j)
    br.push_back(std::ldexp(spec.truncation_radius, -j));
  return br;
}

}  // namespace

void QuadSpec::validate() const {
  require(tolerance > 0.0 && tolerance <= 1e-3, ErrorKind::validation,
          "quad.tolerance must lie in (0, 1e-3]");
  require(radial_panels >= 1, ErrorKind::validation, "quad.radial_panels must be >= 1");
  require(spherical_order >= 2, ErrorKind::validation, "quad.spherical_order must be >= 2");
  require(truncation_radius > 1.0, ErrorKind::validation,
          "quad.truncation_radius must exceed 1");
}

QuadResult integrate_interval(const std::function<double(double)>& f, double a, double b,
                              double tolerance) {
  PanelSum s;
  s.add(f, a, b, tolerance);
  return s.finish(tolerance, "integrate_interval");
}

QuadResult integrate_radial(const Dimension& dim, const std::function<double(double)>& g,
                            const QuadSpec& spec) {
  spec.validate();
  const int n = dim.n();
  auto h = [&](double r) { return r == 0.0 ? 0.0 : g(r) * std::pow(r, n - 1); };
  const auto br = panel_breaks(spec);
  PanelSum s;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) s.add(h, br[i], br[i + 1], spec.tolerance);
  s.add(h, br.back(), std::numeric_limits<double>::infinity(), spec.tolerance);
  QuadResult r = s.finish(spec.tolerance, "integrate_radial");
  r.value *= dim.sphere_area();
  r.error *= dim.sphere_area();
  return r;
}

QuadResult integrate_radial_ball(const Dimension& dim, const std::function<double(double)>& g,
                                 double r_max, double smallest_scale, double tolerance) {
  require(r_max > 0.0 && smallest_scale > 0.0, ErrorKind::parameter,
          "integrate_radial_ball: radii must be positive");
  const int n = dim.n();
  const double r_lo = std::min(smallest_scale * 1e-4, 0.5 * r_max);
  PanelSum s;
  s.add([&](double r) { return r == 0.0 ? 0.0 : g(r) * std::pow(r, n - 1); }, 0.0, r_lo,
        tolerance);
  // r = e^s, dr = r ds
  auto hs = [&](double t) {
    const double r = std::exp(t);
    return g(r) * std::pow(r, n);
  };
  const double s0 = std::log(r_lo), s1 = std::log(r_max);
  const int panels = std::max(1, static_cast<int>(std::ceil((s1 - s0) / 1.5)));
  for (int i = 0; i < panels; ++i) {
    const double a = s0 + (s1 - s0) * i / panels;
    const double b = i + 1 == panels ? s1 : s0 + (s1 - s0) * (i + 1) / panels;
    s.add(hs, a, b, tolerance);
  }
  QuadResult r = s.finish(tolerance, "integrate_radial_ball");
  r.value *= dim.sphere_area();
  r.error *= dim.sphere_area();
  return r;
}

QuadResult integrate_axisymmetric(const Dimension& dim,
                                  const std::function<double(double, double)>& g,
                                  const QuadSpec& spec, double r_max) {
  spec.validate();
  const int n = dim.n();
  // omega_{n-2}: area of S^{n-2}
  const double omega_nm2 = 2.0 * std::pow(std::numbers::pi, 0.5 * (n - 1)) / std::tgamma(0.5 * (n - 1));
  const double inner_tol = 0.1 * spec.tolerance;
  // t = cos(theta): (1 - t^2)^{(n-3)/2} dt = sin^{n-2}(theta) d(theta)
  auto angular = [&](double r) {
    if (r == 0.0) return 0.0;
    auto a = [&](double th) { return g(r, std::cos(th)) * std::pow(std::sin(th), n - 2); };
    PanelSum s;
    s.add(a, 0.0, 0.5 * std::numbers::pi, inner_tol);
    s.add(a, 0.5 * std::numbers::pi, std::numbers::pi, inner_tol);
    return s.value * std::pow(r, n - 1);
  };
  PanelSum s;
  if (std::isinf(r_max)) {
    const auto br = panel_breaks(spec);
    for (std::size_t i = 0; i + 1 < br.size(); ++i)
      s.add(angular, br[i], br[i + 1], spec.tolerance);
    s.add(angular, br.back(), r_max, spec.tolerance);
  } else {
    for (int j = spec.radial_panels; j >= 0; --j) {
      const double a = j == spec.radial_panels ? 0.0 : std::ldexp(r_max, -j - 1);
      s.add(angular, a, std::ldexp(r_max, -j), spec.tolerance);
    }
  }
  QuadResult r = s.finish(spec.tolerance, "integrate_axisymmetric");
  r.value *= omega_nm2;
  r.error *= omega_nm2;
  return r;
}

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  require(order >= 1, ErrorKind::parameter, "gauss_legendre: order must be >= 1");
  nodes.assign(order, 0.0);
  weights.assign(order, 0.0);
  for (int i = 0; i < order; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (order == 1) p0 = 1.0;
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

SphereRule::SphereRule(int n, int order) : n_(n) {
  require(n >= 2 && order >= 2, ErrorKind::parameter, "SphereRule: need n >= 2, order >= 2");
  // S^1: trapezoid with 2*order equally spaced azimuths
  const int m = 2 * order;
  for (int j = 0; j < m; ++j) {
    const double phi = 2.0 * std::numbers::pi * (j + 0.5) / m;
    points_.push_back(std::cos(phi));
    points_.push_back(std::sin(phi));
    weights_.push_back(2.0 * std::numbers::pi / m);
  }
  std::vector<double> gx, gw;
  gauss_legendre(order, gx, gw);
  for (int dim = 3; dim <= n; ++dim) {
    std::vector<double> pts, wts;
    const std::size_t count = weights_.size();
    for (int a = 0; a < order; ++a) {
      const double theta = 0.5 * std::numbers::pi * (gx[a] + 1.0);
      const double st = std::sin(theta);
      const double w = 0.5 * std::numbers::pi * gw[a] * std::pow(st, dim - 2);
      for (std::size_t i = 0; i < count; ++i) {
        pts.push_back(std::cos(theta));
        for (int c = 0; c < dim - 1; ++c) pts.push_back(st * points_[i * (dim - 1) + c]);
        wts.push_back(w * weights_[i]);
      }
    }
    points_ = std::move(pts);
    weights_ = std::move(wts);
  }
}

QuadResult integrate_rn(const Dimension& dim, const Integrand& f, const QuadSpec& spec) {
  spec.validate();
  const int n = dim.n();
  const SphereRule rule(n, spec.spherical_order);
  std::vector<double> y(n);
  auto shell_sum = [&](double r, bool absolute) {
    if (r == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const auto u = rule.point(i);
      for (int c = 0; c < n; ++c) y[c] = r * u[c];
      const double v = rule.weight(i) * f(y);
      s += absolute ? std::abs(v) : v;
    }
    return s * std::pow(r, n - 1);
  };
  const std::function<double(double)> shell = [&](double r) { return shell_sum(r, false); };
  const std::function<double(double)> shell_abs = [&](double r) { return shell_sum(r, true); };
  const auto br = panel_breaks(spec);
  PanelSum s;
  for (std::size_t i = 0; i + 1 < br.size(); ++i)
    s.add_floored(shell, shell_abs, br[i], br[i + 1], spec.tolerance);
  s.add_floored(shell, shell_abs, br.back(), std::numeric_limits<double>::infinity(),
                spec.tolerance);
  return s.finish(spec.tolerance, "integrate_rn");
}

}  // namespace bubbletower
