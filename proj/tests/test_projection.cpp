#include <doctest.h>

#include <cmath>

#include "bubbletower/errors.hpp"
#include "bubbletower/projection.hpp"
#include "bubbletower/radial_grid.hpp"
#include "bubbletower/tower_config.hpp"

using namespace bubbletower;

TEST_CASE("exact centered projection on the unit ball") {
  for (int n = 3; n <= 6; ++n) {
    const Dimension dim(n);
    for (double mu : {0.3, 0.05, 1e-3}) {
      const double shift = dim.alpha() * std::pow(mu / (1.0 + mu * mu), 0.5 * (n - 2));
      for (double r : {0.0, 0.1, 0.5, 0.99}) {
        CHECK(projected_bubble_radial(dim, mu, 1.0, r) ==
              doctest::Approx(bubble_radial(dim, mu, r) - shift).epsilon(1e-13));
      }
      CHECK(std::abs(projected_bubble_radial(dim, mu, 1.0, 1.0)) <
            1e-13 * bubble_radial(dim, mu, 0.0));
      CHECK(std::abs(projected_psi0_radial(dim, mu, 1.0, 1.0)) < 1e-12 * bubble_radial(dim, mu, 0.0));
      CHECK(std::abs(projected_psih_radial_factor(dim, mu, 1.0, 1.0)) <
            1e-12 * std::abs(psih_radial_factor(dim, mu, mu)));
    }
  }
}

TEST_CASE("pointwise projections agree with the radial forms") {
  const Dimension dim(3);
  const BallDomain ball(dim);
  BubbleParam b;
  b.mu = 0.02;
  b.xi = {0.0, 0.0, 0.0};
  const Point x = {0.1, -0.2, 0.05};
  CHECK(project_bubble(ball, b, x, ProjectionMethod::exact_centered) ==
        doctest::Approx(projected_bubble_radial(dim, 0.02, 1.0, norm(x))).epsilon(1e-13));
  CHECK(project_psi(ball, 2, 0.02, b.xi, x, ProjectionMethod::exact_centered) ==
        doctest::Approx(projected_psih_radial_factor(dim, 0.02, 1.0, norm(x)) * x[1]).epsilon(1e-12));
  CHECK(project_psi(ball, 0, 0.02, b.xi, x, ProjectionMethod::exact_centered) ==
        doctest::Approx(projected_psi0_radial(dim, 0.02, 1.0, norm(x))).epsilon(1e-12));
}

TEST_CASE("asymptotic projection uses the normalized regular part") {
  const Dimension dim(4);
  const BallDomain ball(dim);
  BubbleParam b;
  b.mu = 1e-3;
  b.xi = Point(4, 0.0);
  const Point x = {0.3, 0.0, 0.1, 0.0};
  const double expect =
      bubble_at(dim, b, x) - dim.alpha() * std::pow(b.mu, 1.0) * unit_regular_part(ball, x, b.xi);
  CHECK(project_bubble(ball, b, x, ProjectionMethod::asymptotic) == doctest::Approx(expect));
  // normalized regular part of the unit ball at the center is 1
  CHECK(unit_regular_part(ball, Point(4, 0.0), Point(4, 0.0)) == doctest::Approx(1.0));
}

TEST_CASE("exact projection matches a dense radial Dirichlet solve") {
  // -Delta w = f_0(U) in B, w = 0 on the boundary, solved by finite volumes
  const Dimension dim(3);
  const double mu = 0.05;
  std::vector<double> errs;
  for (int npd : {80, 160}) {
    const auto grid = RadialGrid::geometric(1e-3 * mu, npd);
    const RadialOperator op(dim, grid);
    const auto K = op.stiffness_matrix();
    std::vector<double> rhs(op.unknowns());
    for (std::size_t i = 0; i < rhs.size(); ++i)
      rhs[i] = op.volumes()[i] * f_zero(dim, bubble_radial(dim, mu, grid[i]));
    const auto w = K.solve(rhs);
    double err = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
      err = std::max(err, std::abs(w[i] - projected_bubble_radial(dim, mu, 1.0, grid[i])));
    errs.push_back(err / bubble_radial(dim, mu, 0.0));
  }
  CHECK(errs[0] < 1e-3);
  // second order in the spacing
  CHECK(errs[0] / errs[1] > 3.0);
}

TEST_CASE("gram matrix of a single centered bubble") {
  const Dimension dim(3);
  const BallDomain ball(dim);
  const std::vector<double> d = {0.5};
  const auto cfg = TowerConfig::make(dim, 1, 1e-3, d, {}, ball.center(), 0.5);
  const auto g = gram_matrix(ball, cfg, 1e-10);
  REQUIRE(g.rows() == 4);
  // c_0 = c_h = 4.00656... for the standard bubble in n = 3
  for (int h = 0; h < 4; ++h) CHECK(g(h, h) == doctest::Approx(4.00656006405285).epsilon(1e-3));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) CHECK(g(i, j) == 0.0);
}

TEST_CASE("gram matrix rejects non-centered towers") {
  const Dimension dim(3);
  const BallDomain ball(dim);
  const std::vector<double> d = {0.5};
  const auto cfg = TowerConfig::make(dim, 1, 0.1, d, {}, Point{0.2, 0.0, 0.0}, 0.5);
  CHECK_THROWS_AS(gram_matrix(ball, cfg), Error);
}
