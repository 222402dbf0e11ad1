#include "bubbletower/constants.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bubbletower/errors.hpp"

namespace bubbletower {

QuadResult const_a(const Dimension& dim, int idx, const QuadSpec& spec) {
  const double p = dim.p();
  switch (idx) {
    case 1: {
      QuadResult r = integrate_radial(
          dim,
          [&](double r) {
            return std::pow(standard_bubble_radial(dim, r), p - 1.0) * psi0_radial(dim, 1.0, r);
          },
          spec);
      r.value *= p;
      r.error *= p;
      return r;
    }
    case 2:
      return integrate_radial(
          dim, [&](double r) { return std::pow(standard_bubble_radial(dim, r), p); }, spec);
    case 3:
      return {dim.half_nm2() * std::pow(dim.alpha(), p + 1.0), 0.0};
    case 4:
      return integrate_radial(
          dim,
          [&](double r) {
            const double w = 1.0 + r * r;
            const double f = std::pow(w, -0.5 * (dim.n() + 2));
            // ln f = -((n+2)/2) ln(1 + r^2)
            const double lnf = -0.5 * (dim.n() + 2) * std::log1p(r * r);
            return std::abs(f * lnf * psi0_radial(dim, 1.0, r));
          },
          spec);
    default:
      fail(ErrorKind::parameter, "const_a: index must be 1..4, got " + std::to_string(idx));
  }
}

double a2_closed_form(const Dimension& dim) {
  return (dim.n() - 2.0) * dim.alpha() * dim.sphere_area();
}

double a4_closed_form(const Dimension& dim) {
  const double n = dim.n();
  return std::tgamma(0.5 * n) * std::pow(std::numbers::pi, 0.5 * n) / (4.0 * std::tgamma(n + 1.0)) *
         std::pow(n, 0.5 * n) * std::pow(n - 2.0, 0.5 * (n + 4.0));
}

QuadResult g_sigma(const Dimension& dim, std::span<const double> sigma, const QuadSpec& spec) {
  require(static_cast<int>(sigma.size()) == dim.n(), ErrorKind::parameter,
          "g_sigma: sigma has wrong dimension");
  const double s = norm(sigma);
  require(std::isfinite(s), ErrorKind::parameter, "g_sigma: sigma must be finite");
  const int n = dim.n();
  const double decay = -0.5 * (n + 2);
  if (s == 0.0) {
    return integrate_radial(
        dim, [&](double r) { return std::pow(r, 2.0 - n) * std::pow(1.0 + r * r, decay); }, spec);
  }
  // axis along sigma: |y - sigma|^2 = r^2 - 2 r s t + s^2
  return integrate_axisymmetric(
      dim,
      [&](double r, double t) {
        const double q = std::max(0.0, r * r - 2.0 * r * s * t + s * s);
        return std::pow(r, 2.0 - n) * std::pow(1.0 + q, decay);
      },
      spec);
}

double g_zero_closed_form(const Dimension& dim) { return dim.sphere_area() / dim.n(); }

GProfile g_profile(const Dimension& dim, std::span<const double> radii, const QuadSpec& spec) {
  GProfile prof;
  Point sigma(dim.n(), 0.0);
  for (double r : radii) {
    sigma[0] = r;
    prof.radii.push_back(r);
    prof.values.push_back(g_sigma(dim, sigma, spec).value);
  }
  sigma[0] = 0.0;
  const double g0 = g_sigma(dim, sigma, spec).value;
  sigma[0] = 1e-2;
  const double g1 = g_sigma(dim, sigma, spec).value;
  if (g1 > g0) prof.at_origin = ExtremumType::minimum;
  else if (g1 < g0) prof.at_origin = ExtremumType::maximum;
  return prof;
}

QuadResult gram_constant(const Dimension& dim, int h, const QuadSpec& spec) {
  require(h >= 0 && h <= dim.n(), ErrorKind::parameter, "gram_constant: h outside 0..n");
  const double p = dim.p();
  if (h == 0) {
    return integrate_radial(
        dim,
        [&](double r) {
          const double z = psi0_radial(dim, 1.0, r);
          return p * std::pow(standard_bubble_radial(dim, r), p - 1.0) * z * z;
        },
        spec);
  }
  // angular average of y_h^2 over the sphere is r^2 / n
  return integrate_radial(
      dim,
      [&](double r) {
        const double z = psih_radial_factor(dim, 1.0, r);
        return p * std::pow(standard_bubble_radial(dim, r), p - 1.0) * z * z * r * r / dim.n();
      },
      spec);
}

}  // namespace bubbletower
