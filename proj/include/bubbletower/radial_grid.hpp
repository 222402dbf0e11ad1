#pragma once

// Radial grids on [0, R] and the conservative discretization of
//   -Delta u = -u'' - ((n-1)/r) u'
// as K u = M (-Delta u): K is the symmetric flux matrix with face weights
// r_{i+1/2}^{n-1} / h_{i+1/2}, M the diagonal of dual-cell volumes
// int r^{n-1} dr. The center cell has zero inner flux (u'(0) = 0) and the
// last node carries the Dirichlet condition.

#include <span>
#include <vector>

#include "bubbletower/core_profiles.hpp"

namespace bubbletower {

class RadialGrid {
 public:
  /// Uniform spacing r_min (q - 1) on [0, r_min], then geometric with ratio
  /// q = 10^{1/nodes_per_decade} up to radius.
  static RadialGrid geometric(double r_min, int nodes_per_decade, double radius = 1.0);
  static RadialGrid from_nodes(std::vector<double> nodes);

  std::span<const double> nodes() const { return nodes_; }
  double operator[](std::size_t i) const { return nodes_[i]; }
  std::size_t size() const { return nodes_.size(); }
  double radius() const { return nodes_.back(); }
  double ratio() const { return ratio_; }
  int nodes_per_decade() const { return nodes_per_decade_; }
  double r_min() const { return r_min_; }

  /// Nodes with 0 < r < radius_limit, counting the center node.
  int nodes_below(double radius_limit) const;
  /// Local spacing around r.
  double spacing_at(double r) const;

 private:
  std::vector<double> nodes_;
  double ratio_ = 1.0;
  int nodes_per_decade_ = 0;
  double r_min_ = 0.0;
};

/// Linear interpolation of nodal values onto another grid.
std::vector<double> interpolate(const RadialGrid& from, std::span<const double> values,
                                const RadialGrid& to);

/// Tridiagonal matrix; solve() uses Gaussian elimination with partial pivoting.
class Tridiagonal {
 public:
  explicit Tridiagonal(std::size_t n) : lower_(n, 0.0), diag_(n, 0.0), upper_(n, 0.0) {}

  std::size_t size() const { return diag_.size(); }
  /// lower(i) couples row i to column i-1; upper(i) row i to column i+1.
  double& lower(std::size_t i) { return lower_[i]; }
  double& diag(std::size_t i) { return diag_[i]; }
  double& upper(std::size_t i) { return upper_[i]; }
  double lower(std::size_t i) const { return lower_[i]; }
  double diag(std::size_t i) const { return diag_[i]; }
  double upper(std::size_t i) const { return upper_[i]; }

  std::vector<double> multiply(std::span<const double> x) const;
  /// Throws a solver error on an exactly singular pivot.
  std::vector<double> solve(std::span<const double> rhs) const;

 private:
  std::vector<double> lower_, diag_, upper_;
};

/// Finite-volume radial operator for a fixed dimension and grid. Vectors
/// span all nodes; the last entry is the boundary node.
class RadialOperator {
 public:
  RadialOperator(const Dimension& dim, const RadialGrid& grid);

  const Dimension& dim() const { return dim_; }
  const RadialGrid& grid() const { return grid_; }
  std::size_t unknowns() const { return grid_.size() - 1; }
  std::span<const double> volumes() const { return volumes_; }
  std::span<const double> face_weights() const { return faces_; }

  /// K u on interior rows (size unknowns()).
  std::vector<double> stiffness(std::span<const double> u) const;
  /// -Delta_h u = M^{-1} K u on interior rows, and u(R) on the boundary row.
  std::vector<double> laplacian(std::span<const double> u) const;
  /// K restricted to the unknowns (homogeneous Dirichlet data).
  Tridiagonal stiffness_matrix() const;

  /// int |grad u|^2 over the ball (includes omega_{n-1}).
  double energy(std::span<const double> u) const;
  /// H^1_0 inner product int grad u . grad v.
  double energy_dot(std::span<const double> u, std::span<const double> v) const;
  /// int u v with the lumped mass.
  double mass_dot(std::span<const double> u, std::span<const double> v) const;
  /// Dual norm sqrt(omega r^T K^{-1} r) of a weak residual r (size unknowns()).
  double dual_norm(std::span<const double> weak_residual) const;

 private:
  Dimension dim_;
  RadialGrid grid_;
  std::vector<double> volumes_;
  std::vector<double> faces_;
};

}  // namespace bubbletower
