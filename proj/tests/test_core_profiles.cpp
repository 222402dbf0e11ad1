#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bubbletower/core_profiles.hpp"
#include "bubbletower/errors.hpp"

using namespace bubbletower;

namespace {

// -u'' - (n-1)/r u' by central differences
double radial_minus_laplacian(const Dimension& dim, double (*u)(const Dimension&, double, double),
                              double mu, double r, double h) {
  const double up = u(dim, mu, r + h), u0 = u(dim, mu, r), um = u(dim, mu, r - h);
  return -(up - 2.0 * u0 + um) / (h * h) - (dim.n() - 1.0) / r * (up - um) / (2.0 * h);
}

}  // namespace

TEST_CASE("dimension constants") {
  const Dimension d3(3);
  CHECK(d3.p() == doctest::Approx(5.0));
  CHECK(d3.critical_exponent() == doctest::Approx(6.0));
  CHECK(d3.alpha() == doctest::Approx(std::pow(3.0, 0.25)));
  CHECK(d3.sphere_area() == doctest::Approx(4.0 * std::numbers::pi));
  const Dimension d4(4);
  CHECK(d4.alpha() == doctest::Approx(std::sqrt(8.0)));
  CHECK(d4.sphere_area() == doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi));
  CHECK_THROWS_AS(Dimension(2), Error);
}

TEST_CASE("bubble peak and scaling") {
  for (int n = 3; n <= 6; ++n) {
    const Dimension dim(n);
    for (double mu : {1.0, 0.1, 1e-3}) {
      CHECK(bubble_radial(dim, mu, 0.0) ==
            doctest::Approx(dim.alpha() * std::pow(mu, -0.5 * (n - 2))).epsilon(1e-14));
      // U_mu(r) = mu^{-(n-2)/2} U(r / mu)
      CHECK(bubble_radial(dim, mu, 0.7 * mu) ==
            doctest::Approx(std::pow(mu, -0.5 * (n - 2)) * standard_bubble_radial(dim, 0.7))
                .epsilon(1e-13));
    }
  }
}

TEST_CASE("bubble solves the critical equation") {
  for (int n = 3; n <= 6; ++n) {
    const Dimension dim(n);
    for (double r : {0.3, 1.0, 2.5}) {
      const double lhs = radial_minus_laplacian(dim, bubble_radial, 1.0, r, 1e-4);
      const double rhs = f_zero(dim, bubble_radial(dim, 1.0, r));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-5));
    }
  }
}

TEST_CASE("kernel functions are derivatives of the bubble") {
  const Dimension dim(4);
  const double mu = 0.3, h = 1e-6;
  for (double r : {0.05, 0.3, 1.2}) {
    const double fd =
        mu * (bubble_radial(dim, mu + h, r) - bubble_radial(dim, mu - h, r)) / (2.0 * h);
    CHECK(psi0_radial(dim, mu, r) == doctest::Approx(fd).epsilon(1e-7));
  }
  // translation mode: mu dU/dxi_1
  const Point xi = {0.0, 0.0, 0.0, 0.0};
  const Point x = {0.2, -0.1, 0.05, 0.3};
  Point xp = xi, xm = xi;
  xp[0] += h;
  xm[0] -= h;
  BubbleParam bp{mu, xp, 1, 1.0, {}}, bm{mu, xm, 1, 1.0, {}};
  const double fd = mu * (bubble_at(dim, bp, x) - bubble_at(dim, bm, x)) / (2.0 * h);
  CHECK(psi_at(dim, 1, mu, xi, x) == doctest::Approx(fd).epsilon(1e-7));
  CHECK(psi_at(dim, 1, mu, xi, x) ==
        doctest::Approx(psih_radial_factor(dim, mu, norm(x)) * x[0]).epsilon(1e-13));
  CHECK(psi_at(dim, 0, mu, xi, x) == doctest::Approx(psi0_radial(dim, mu, norm(x))));
}

TEST_CASE("kernel functions solve the linearized equation") {
  const Dimension dim(3);
  for (double r : {0.4, 1.0, 3.0}) {
    const double lhs = radial_minus_laplacian(dim, psi0_radial, 1.0, r, 1e-4);
    const double rhs = f_zero_prime(dim, bubble_radial(dim, 1.0, r)) * psi0_radial(dim, 1.0, r);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-5));
  }
}

TEST_CASE("nonlinearity") {
  const Dimension dim(3);
  CHECK(f_eps(dim, 0.0, 0.1) == 0.0);
  CHECK(f_eps(dim, 2.0, 0.0) == doctest::Approx(32.0));
  CHECK(f_eps(dim, -2.0, 0.0) == doctest::Approx(-32.0));
  CHECK(f_eps(dim, 2.0, 0.5) ==
        doctest::Approx(32.0 / std::pow(std::log(std::numbers::e + 2.0), 0.5)));
  CHECK(log_e_plus(1e-300) == 1.0);
  CHECK(log_e_plus(-1.0) == doctest::Approx(std::log(std::numbers::e + 1.0)));
}

TEST_CASE("property: f_eps is odd, dominated by f_0, and f_eps' matches differences") {
  std::mt19937_64 rng(20261019);
  std::uniform_real_distribution<double> U(-20.0, 20.0), E(0.0, 0.3);
  for (int n = 3; n <= 6; ++n) {
    const Dimension dim(n);
    for (int trial = 0; trial < 200; ++trial) {
      const double u = U(rng), eps = E(rng);
      if (std::abs(u) < 1e-3) continue;
      CHECK(f_eps(dim, -u, eps) == -f_eps(dim, u, eps));
      CHECK(std::abs(f_eps(dim, u, eps)) <= std::abs(f_zero(dim, u)) * (1.0 + 1e-15));
      const double h = 1e-6 * std::max(1.0, std::abs(u));
      const double fd = (f_eps(dim, u + h, eps) - f_eps(dim, u - h, eps)) / (2.0 * h);
      CHECK(f_eps_prime(dim, u, eps) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("bubble parameter bounds") {
  BubbleParam b;
  b.d = 0.05;
  CHECK_THROWS_AS(b.check_bounds(0.1), Error);
  b.d = 0.5;
  CHECK_NOTHROW(b.check_bounds(0.1));
  b.sigma = {20.0, 0.0, 0.0};
  CHECK_THROWS_AS(b.check_bounds(0.1), Error);
}
