#include "bubbletower/domain_green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "bubbletower/errors.hpp"

namespace bubbletower {

double fundamental_solution(const Dimension& dim, double r) {
  return std::pow(r, 2.0 - dim.n()) / ((dim.n() - 2.0) * dim.sphere_area());
}

BallDomain::BallDomain(Dimension dim, Point center, double radius)
    : dim_(dim), center_(std::move(center)), radius_(radius) {
  require(radius_ > 0.0, ErrorKind::parameter, "ball radius must be positive");
  require(static_cast<int>(center_.size()) == dim_.n(), ErrorKind::parameter,
          "ball center has wrong dimension");
}

BallDomain::BallDomain(Dimension dim) : BallDomain(dim, Point(dim.n(), 0.0), 1.0) {}

Point BallDomain::to_unit(std::span<const double> x) const {
  require(x.size() == center_.size(), ErrorKind::parameter, "point dimension mismatch");
  Point u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) u[i] = (x[i] - center_[i]) / radius_;
  return u;
}

bool BallDomain::contains(std::span<const double> x) const {
  return squared_distance(x, center_) < radius_ * radius_;
}

double BallDomain::boundary_distance(std::span<const double> x) const {
  return radius_ - std::sqrt(squared_distance(x, center_));
}

void BallDomain::check_interior(std::span<const double> x, const char* what) const {
  require(contains(x), ErrorKind::domain, std::string(what) + " must lie inside the ball");
}

namespace {

// Q(x, y) = |x|^2 |y|^2 - 2 x.y + 1 = | |y| x - y/|y| |^2 in unit-ball coordinates.
double image_distance_sq(const Point& x, const Point& y) {
  double xx = 0.0, yy = 0.0, xy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx += x[i] * x[i];
    yy += y[i] * y[i];
    xy += x[i] * y[i];
  }
  return xx * yy - 2.0 * xy + 1.0;
}

}  // namespace

double BallDomain::green(std::span<const double> x, std::span<const double> y) const {
  const double tol = radius_ * 1e-14;
  require(std::sqrt(squared_distance(x, center_)) <= radius_ + tol &&
              std::sqrt(squared_distance(y, center_)) <= radius_ + tol,
          ErrorKind::domain, "green: points must lie in the closed ball");
  const double r = std::sqrt(squared_distance(x, y));
  require(r > 0.0, ErrorKind::singularity, "green: x == y is the pole of G");
  return fundamental_solution(dim_, r) - regular_part(x, y);
}

double BallDomain::regular_part(std::span<const double> x, std::span<const double> y) const {
  const Point xu = to_unit(x);
  const Point yu = to_unit(y);
  const double q = image_distance_sq(xu, yu);
  require(q > 0.0, ErrorKind::domain, "regular_part: both points on the boundary");
  return std::pow(radius_, 2.0 - dim_.n()) * fundamental_solution(dim_, std::sqrt(q));
}

Point BallDomain::regular_part_grad_y(std::span<const double> x, std::span<const double> y) const {
  const Point xu = to_unit(x);
  const Point yu = to_unit(y);
  const double q = image_distance_sq(xu, yu);
  require(q > 0.0, ErrorKind::domain, "regular_part_grad_y: both points on the boundary");
  const double xx = std::inner_product(xu.begin(), xu.end(), xu.begin(), 0.0);
  const double scale =
      std::pow(radius_, 1.0 - dim_.n()) * std::pow(q, -0.5 * dim_.n()) / dim_.sphere_area();
  Point g(xu.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = scale * (xu[i] - xx * yu[i]);
  return g;
}

double BallDomain::robin(std::span<const double> x) const {
  check_interior(x, "robin: x");
  const Point xu = to_unit(x);
  const double s = 1.0 - std::inner_product(xu.begin(), xu.end(), xu.begin(), 0.0);
  return std::pow(radius_, 2.0 - dim_.n()) * fundamental_solution(dim_, s);
}

Point BallDomain::robin_grad(std::span<const double> x) const {
  check_interior(x, "robin_grad: x");
  const Point xu = to_unit(x);
  const double s = 1.0 - std::inner_product(xu.begin(), xu.end(), xu.begin(), 0.0);
  const double scale = 2.0 * std::pow(radius_, 1.0 - dim_.n()) * std::pow(s, 1.0 - dim_.n()) /
                       dim_.sphere_area();
  Point g(xu.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = scale * xu[i];
  return g;
}

namespace {

class NelderMead {
 public:
  NelderMead(const GreenProvider& provider) : provider_(provider) {}

  double value(const Point& x) const {
    if (!provider_.contains(x)) return std::numeric_limits<double>::infinity();
    return provider_.robin(x);
  }

  RobinMinimum run(Point start, double step, int max_iterations, double tolerance) const {
    const std::size_t n = start.size();
    std::vector<Point> simplex(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
    std::vector<double> f(n + 1);
    for (std::size_t i = 0; i <= n; ++i) f[i] = value(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    for (int iter = 0; iter < max_iterations; ++iter) {
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](auto a, auto b) { return f[a] < f[b]; });
      const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

      double diameter = 0.0;
      for (std::size_t i = 0; i <= n; ++i)
        diameter = std::max(diameter, std::sqrt(squared_distance(simplex[i], simplex[best])));
      if (diameter < tolerance) return {simplex[best], f[best], iter};

      Point centroid(n, 0.0);
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == worst) continue;
        for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / n;
      }
      auto along = [&](double t) {
        Point p(n);
        for (std::size_t j = 0; j < n; ++j)
          p[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
        return p;
      };

      Point reflected = along(-1.0);
      const double fr = value(reflected);
      if (fr < f[best]) {
        Point expanded = along(-2.0);
        const double fe = value(expanded);
        if (fe < fr) {
          simplex[worst] = std::move(expanded);
          f[worst] = fe;
        } else {
          simplex[worst] = std::move(reflected);
          f[worst] = fr;
        }
        continue;
      }
      if (fr < f[second]) {
        simplex[worst] = std::move(reflected);
        f[worst] = fr;
        continue;
      }
      Point contracted = fr < f[worst] ? along(-0.5) : along(0.5);
      const double fc = value(contracted);
      if (fc < std::min(fr, f[worst])) {
        simplex[worst] = std::move(contracted);
        f[worst] = fc;
        continue;
      }
      // shrink toward the best vertex
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == best) continue;
        for (std::size_t j = 0; j < n; ++j)
          simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
        f[i] = value(simplex[i]);
      }
    }
    throw SolverError(ErrorKind::search, "find_robin_min: Nelder-Mead did not converge", {});
  }

 private:
  const GreenProvider& provider_;
};

}  // namespace

RobinMinimum find_robin_min(const GreenProvider& provider, const SearchBox& box,
                            int max_iterations, double tolerance) {
  const int n = provider.dim().n();
  require(static_cast<int>(box.lower.size()) == n && static_cast<int>(box.upper.size()) == n,
          ErrorKind::parameter, "search box has wrong dimension");
  for (int j = 0; j < n; ++j)
    require(box.lower[j] < box.upper[j], ErrorKind::parameter, "search box is empty");

  // 32 points per axis up to n = 4, then keep the scan near 32^4 points.
  const int per_axis =
      n <= 4 ? 32 : std::max(3, static_cast<int>(std::pow(32.0, 4.0 / n)));
  long long total = 1;
  for (int j = 0; j < n; ++j) total *= per_axis;

  NelderMead nm(provider);
  Point best_point;
  double best_value = std::numeric_limits<double>::infinity();
  Point x(n);
  for (long long idx = 0; idx < total; ++idx) {
    long long rem = idx;
    for (int j = 0; j < n; ++j) {
      const int i = static_cast<int>(rem % per_axis);
      rem /= per_axis;
      x[j] = box.lower[j] + (i + 0.5) * (box.upper[j] - box.lower[j]) / per_axis;
    }
    const double v = nm.value(x);
    if (v < best_value) {
      best_value = v;
      best_point = x;
    }
  }
  require(!best_point.empty(), ErrorKind::search, "find_robin_min: box misses the domain");

  double step = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) step = std::min(step, (box.upper[j] - box.lower[j]) / per_axis);
  return nm.run(best_point, step, max_iterations, tolerance);
}

}  // namespace bubbletower
