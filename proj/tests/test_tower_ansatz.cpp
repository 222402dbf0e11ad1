#include <doctest.h>

#include <cmath>
#include <random>

#include "bubbletower/errors.hpp"
#include "bubbletower/radial_pde.hpp"
#include "bubbletower/tower_ansatz.hpp"

using namespace bubbletower;

TEST_CASE("scale schedule") {
  const double eps = 0.05;
  const double t = eps / std::pow(std::log(eps), 2);
  CHECK(schedule_parameter(eps) == doctest::Approx(t));
  const std::vector<double> d = {0.5, 0.2};
  const auto mu = mu_schedule(Dimension(3), 2, eps, d);
  CHECK(mu[0] == doctest::Approx(0.5 * t));
  CHECK(mu[1] == doctest::Approx(0.2 * t * t * t));
  CHECK_THROWS_AS(schedule_parameter(0.5), Error);
}

TEST_CASE("annuli decomposition") {
  const std::vector<double> mu = {1e-2, 1e-5, 1e-9};
  const auto dec = AnnuliDecomposition::make(mu, 0.5);
  REQUIRE(dec.annuli.size() == 3);
  CHECK(dec.annuli[0].outer == doctest::Approx(0.5));
  CHECK(dec.annuli[2].inner == 0.0);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(dec.annuli[i].inner < mu[i]);
    CHECK(mu[i] < dec.annuli[i].outer);
    CHECK(dec.index_of(mu[i]) == static_cast<int>(i));
    if (i + 1 < 3) CHECK(dec.annuli[i].inner == doctest::Approx(std::sqrt(mu[i] * mu[i + 1])));
  }
  CHECK(dec.index_of(0.7) == -1);
  CHECK_NOTHROW(dec.validate());
}

TEST_CASE("quintic step") {
  CHECK(quintic_step(0.0).value == 0.0);
  CHECK(quintic_step(1.0).value == doctest::Approx(1.0));
  CHECK(quintic_step(0.5).value == doctest::Approx(0.5));
  CHECK(quintic_step(0.0).d1 == 0.0);
  CHECK(std::abs(quintic_step(1.0).d1) < 1e-14);
  CHECK(std::abs(quintic_step(1.0).d2) < 1e-12);
  CHECK(quintic_step(0.5).d1 == doctest::Approx(1.875));
}

TEST_CASE("property: cut-off derivative bounds") {
  const std::vector<double> mu = {1e-2, 1e-4, 1e-7};
  const auto dec = AnnuliDecomposition::make(mu, 0.5);
  for (std::size_t i = 0; i < dec.annuli.size(); ++i) {
    const auto chi = annulus_cutoff(dec.annuli[i]);
    const double b = dec.annuli[i].outer;  // sqrt(mu_i mu_{i-1})
    double outer_d1 = 0.0, outer_d2 = 0.0, max_d1 = 0.0, max_d2 = 0.0;
    const double lo = dec.annuli[i].inner > 0 ? dec.annuli[i].inner / 2 : 1e-12;
    for (int j = 0; j <= 4000; ++j) {
      const double r = lo * std::pow(2.0 * b / lo, j / 4000.0);
      const auto v = chi.at(r);
      CHECK(v.value >= -1e-15);
      CHECK(v.value <= 1.0 + 1e-15);
      max_d1 = std::max(max_d1, std::abs(v.d1));
      max_d2 = std::max(max_d2, std::abs(v.d2));
      if (r >= b) {
        outer_d1 = std::max(outer_d1, std::abs(v.d1));
        // radial Hessian eigenvalues chi'' and chi'/r
        outer_d2 = std::max({outer_d2, std::abs(v.d2), std::abs(v.d1) / r});
      }
    }
    CHECK(max_d1 <= chi.slope_bound() * (1.0 + 1e-9));
    CHECK(max_d2 <= chi.curvature_bound() * (1.0 + 1e-9));
    CHECK(outer_d1 <= 2.0 / b);
    // a C^2 ramp of width b needs max |chi''| > 4 / b^2; the quintic gives 10/sqrt(3)
    CHECK(outer_d2 * b * b <= 10.0 / std::sqrt(3.0) * (1.0 + 1e-6));
    CHECK(outer_d2 * b * b > 4.0);
  }
}

TEST_CASE("tower heights alternate with the bubble magnitudes") {
  const Dimension dim(3);
  const BallDomain ball(dim);
  const std::vector<double> d = {0.345, 0.0266};
  const double eps = 0.05;
  const auto cfg = TowerConfig::make(dim, 2, eps, d, {}, ball.center(), 0.5);
  const auto mu = cfg.scales();
  const auto grid = grid_for_scale(mu.back(), 1.0, GridOptions{});
  const auto v = assemble_tower_radial(ball, cfg, grid);
  const auto sc = extract_scales(dim, grid, v, eps, 2);
  REQUIRE(sc.size() == 2);
  CHECK(sc[0].height < 0.0);
  CHECK(sc[1].height > 0.0);
  for (int i = 0; i < 2; ++i)
    CHECK(std::abs(sc[i].height) ==
          doctest::Approx(dim.alpha() * std::pow(mu[i], -0.5)).epsilon(0.05));
  const Point x = {grid[10], 0.0, 0.0};
  CHECK(assemble_tower(ball, cfg, x) == doctest::Approx(v[10]).epsilon(1e-12));
}

TEST_CASE("ansatz residual decreases with eps and needs resolution") {
  const Dimension dim(3);
  const BallDomain ball(dim);
  const std::vector<double> d = {0.345};
  double prev = INFINITY;
  for (double eps : {0.2, 0.1, 0.05, 0.025}) {
    const auto cfg = TowerConfig::make(dim, 1, eps, d, {}, ball.center(), 0.5);
    const auto grid = grid_for_scale(cfg.scales()[0], 1.0, GridOptions{});
    const double r = residual_norm(ball, cfg, grid);
    CHECK(r < prev);
    prev = r;
  }
  const auto cfg = TowerConfig::make(dim, 1, 0.05, d, {}, ball.center(), 0.5);
  CHECK_THROWS_AS(residual_norm(ball, cfg, RadialGrid::geometric(0.1, 10)), Error);
}

TEST_CASE("order fit on synthetic data") {
  std::vector<std::pair<double, double>> pts, logged, flat;
  for (int j = 0; j <= 8; ++j) {
    const double t = std::pow(10.0, -1.0 - 0.4 * j);
    pts.emplace_back(t, 3.0 * std::pow(t, 1.5));
    logged.emplace_back(t, std::pow(t, 1.5) * std::abs(std::log(t)));
    flat.emplace_back(t, 2.0);
  }
  CHECK(fit_asymptotic_order(pts).exponent == doctest::Approx(1.5).epsilon(1e-12));
  FitOptions lo;
  lo.model = FitModel::power_log;
  CHECK(std::abs(fit_asymptotic_order(logged, lo).exponent - 1.5) < 0.05);
  CHECK(std::abs(fit_asymptotic_order(flat).exponent) < 1e-12);
  std::vector<std::pair<double, double>> narrow(pts.begin(), pts.begin() + 5);
  CHECK_THROWS_AS(fit_asymptotic_order(narrow), Error);
}

TEST_CASE("property: fit recovers random exponents under small noise") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> A(-1.0, 4.0), N(-0.01, 0.01);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = A(rng);
    std::vector<std::pair<double, double>> pts;
    for (int j = 0; j <= 10; ++j) {
      const double t = std::pow(10.0, -0.3 * j);
      pts.emplace_back(t, std::pow(t, a) * std::exp(N(rng)));
    }
    const auto fit = fit_asymptotic_order(pts);
    CHECK(std::abs(fit.exponent - a) < 0.02);
    CHECK(std::abs(fit.exponent - a) <= fit.width + 0.01);
  }
}
