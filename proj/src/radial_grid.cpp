#include "bubbletower/radial_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bubbletower/errors.hpp"

namespace bubbletower {

RadialGrid RadialGrid::geometric(double r_min, int nodes_per_decade, double radius) {
  require(radius > 0.0 && r_min > 0.0 && r_min < radius, ErrorKind::parameter,
          "radial grid: need 0 < r_min < radius");
  require(nodes_per_decade >= 4, ErrorKind::parameter, "radial grid: nodes_per_decade >= 4");
  RadialGrid g;
  g.ratio_ = std::pow(10.0, 1.0 / nodes_per_decade);
  g.nodes_per_decade_ = nodes_per_decade;
  g.r_min_ = r_min;
  const int m = static_cast<int>(std::ceil(1.0 / (g.ratio_ - 1.0)));
  for (int i = 0; i < m; ++i) g.nodes_.push_back(r_min * i / m);
  for (double r = r_min; r < radius; r *= g.ratio_) g.nodes_.push_back(r);
  const std::size_t last = g.nodes_.size() - 1;
  if (last >= 2 && radius - g.nodes_[last] < 0.5 * (g.nodes_[last] - g.nodes_[last - 1]))
    g.nodes_.pop_back();
  g.nodes_.push_back(radius);
  return g;
}

RadialGrid RadialGrid::from_nodes(std::vector<double> nodes) {
  require(nodes.size() >= 3, ErrorKind::parameter, "radial grid: need at least 3 nodes");
  require(nodes.front() == 0.0, ErrorKind::parameter, "radial grid: first node must be r = 0");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    require(nodes[i] > nodes[i - 1], ErrorKind::parameter, "radial grid: nodes must increase");
  RadialGrid g;
  g.nodes_ = std::move(nodes);
  g.r_min_ = g.nodes_[1];
  return g;
}

int RadialGrid::nodes_below(double radius_limit) const {
  return static_cast<int>(std::lower_bound(nodes_.begin(), nodes_.end(), radius_limit) -
                          nodes_.begin());
}

double RadialGrid::spacing_at(double r) const {
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
  if (it == nodes_.begin()) ++it;
  if (it == nodes_.end()) --it;
  return *it - *(it - 1);
}

std::vector<double> interpolate(const RadialGrid& from, std::span<const double> values,
                                const RadialGrid& to) {
  require(values.size() == from.size(), ErrorKind::parameter, "interpolate: size mismatch");
  const auto x = from.nodes();
  std::vector<double> out(to.size());
  for (std::size_t i = 0; i < to.size(); ++i) {
    const double r = to[i];
    if (r <= x.front()) {
      out[i] = values.front();
      continue;
    }
    if (r >= x.back()) {
      out[i] = values.back();
      continue;
    }
    const auto j = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), r) - x.begin());
    const double w = (r - x[j - 1]) / (x[j] - x[j - 1]);
    out[i] = (1.0 - w) * values[j - 1] + w * values[j];
  }
  return out;
}

std::vector<double> Tridiagonal::multiply(std::span<const double> x) const {
  const std::size_t n = size();
  require(x.size() == n, ErrorKind::parameter, "tridiagonal multiply: size mismatch");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = diag_[i] * x[i];
    if (i > 0) v += lower_[i] * x[i - 1];
    if (i + 1 < n) v += upper_[i] * x[i + 1];
    y[i] = v;
  }
  return y;
}

std::vector<double> Tridiagonal::solve(std::span<const double> rhs) const {
  const std::size_t n = size();
  require(rhs.size() == n, ErrorKind::parameter, "tridiagonal solve: size mismatch");
  // Row-interchanging elimination (as in LAPACK gtsv): after a swap, row i
  // gains a second superdiagonal entry.
  std::vector<double> dl(n, 0.0), d(diag_), du(n, 0.0), du2(n, 0.0), b(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i + 1 < n; ++i) {
    dl[i] = lower_[i + 1];
    du[i] = upper_[i];
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) throw SolverError(ErrorKind::solver, "tridiagonal solve: singular", {});
      const double f = dl[i] / d[i];
      d[i + 1] -= f * du[i];
      b[i + 1] -= f * b[i];
      dl[i] = 0.0;
    } else {
      const double f = d[i] / dl[i];
      d[i] = dl[i];
      double tmp = d[i + 1];
      d[i + 1] = du[i] - f * tmp;
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -f * du2[i];
      }
      du[i] = tmp;
      tmp = b[i];
      b[i] = b[i + 1];
      b[i + 1] = tmp - f * b[i + 1];
    }
  }
  if (d[n - 1] == 0.0) throw SolverError(ErrorKind::solver, "tridiagonal solve: singular", {});
  std::vector<double> x(n);
  x[n - 1] = b[n - 1] / d[n - 1];
  if (n >= 2) x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
  for (std::size_t ii = n >= 2 ? n - 2 : 0; ii-- > 0;)
    x[ii] = (b[ii] - du[ii] * x[ii + 1] - du2[ii] * x[ii + 2]) / d[ii];
  return x;
}

RadialOperator::RadialOperator(const Dimension& dim, const RadialGrid& grid)
    : dim_(dim), grid_(grid) {
  const std::size_t N = grid_.size();
  const int n = dim.n();
  faces_.resize(N - 1);
  volumes_.resize(N);
  std::vector<double> face_r(N - 1);
  for (std::size_t i = 0; i + 1 < N; ++i) {
    face_r[i] = 0.5 * (grid_[i] + grid_[i + 1]);
    faces_[i] = std::pow(face_r[i], n - 1) / (grid_[i + 1] - grid_[i]);
  }
  for (std::size_t i = 0; i < N; ++i) {
    const double lo = i == 0 ? 0.0 : face_r[i - 1];
    const double hi = i + 1 == N ? grid_.radius() : face_r[i];
    volumes_[i] = (std::pow(hi, n) - std::pow(lo, n)) / n;
  }
}

std::vector<double> RadialOperator::stiffness(std::span<const double> u) const {
  const std::size_t N = grid_.size();
  require(u.size() == N, ErrorKind::parameter, "stiffness: size mismatch");
  std::vector<double> ku(N - 1, 0.0);
  for (std::size_t i = 0; i + 1 < N; ++i) {
    const double flux = faces_[i] * (u[i + 1] - u[i]);
    ku[i] -= flux;
    if (i + 1 < N - 1) ku[i + 1] += flux;
  }
  return ku;
}

std::vector<double> RadialOperator::laplacian(std::span<const double> u) const {
  auto ku = stiffness(u);
  std::vector<double> out(grid_.size());
  for (std::size_t i = 0; i < ku.size(); ++i) out[i] = ku[i] / volumes_[i];
  out.back() = u.back();
  return out;
}

Tridiagonal RadialOperator::stiffness_matrix() const {
  const std::size_t m = unknowns();
  Tridiagonal K(m);
  for (std::size_t i = 0; i < m; ++i) {
    K.diag(i) = faces_[i] + (i > 0 ? faces_[i - 1] : 0.0);
    if (i > 0) K.lower(i) = -faces_[i - 1];
    if (i + 1 < m) K.upper(i) = -faces_[i];
  }
  return K;
}

double RadialOperator::energy(std::span<const double> u) const { return energy_dot(u, u); }

double RadialOperator::energy_dot(std::span<const double> u, std::span<const double> v) const {
  require(u.size() == grid_.size() && v.size() == grid_.size(), ErrorKind::parameter,
          "energy_dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i)
    s += faces_[i] * (u[i + 1] - u[i]) * (v[i + 1] - v[i]);
  return dim_.sphere_area() * s;
}

double RadialOperator::mass_dot(std::span<const double> u, std::span<const double> v) const {
  require(u.size() == grid_.size() && v.size() == grid_.size(), ErrorKind::parameter,
          "mass_dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) s += volumes_[i] * u[i] * v[i];
  return dim_.sphere_area() * s;
}

double RadialOperator::dual_norm(std::span<const double> weak_residual) const {
  require(weak_residual.size() == unknowns(), ErrorKind::parameter, "dual_norm: size mismatch");
  const auto z = stiffness_matrix().solve(weak_residual);
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += z[i] * weak_residual[i];
  return std::sqrt(dim_.sphere_area() * std::max(0.0, s));
}

}  // namespace bubbletower
