#pragma once

#include <memory>
#include <span>
#include <vector>

#include "bubbletower/core_profiles.hpp"

namespace bubbletower {

/// Dirichlet Green's function of -Delta with the convention -Delta G = delta,
/// H = Phi - G, robin(x) = H(x, x), Phi(z) = 1 / ((n-2) omega_{n-1} |z|^{n-2}).
class GreenProvider {
 public:
  virtual ~GreenProvider() = default;

  virtual const Dimension& dim() const = 0;
  virtual bool contains(std::span<const double> x) const = 0;
  virtual double boundary_distance(std::span<const double> x) const = 0;

  virtual double green(std::span<const double> x, std::span<const double> y) const = 0;
  virtual double regular_part(std::span<const double> x, std::span<const double> y) const = 0;
  /// Gradient of H(x, y) with respect to its second argument.
  virtual Point regular_part_grad_y(std::span<const double> x, std::span<const double> y) const = 0;
  virtual double robin(std::span<const double> x) const = 0;
  virtual Point robin_grad(std::span<const double> x) const = 0;
};

/// Fundamental solution Phi(r) of -Delta.
double fundamental_solution(const Dimension& dim, double r);

/// Ball B(center, radius); closed forms by the method of images.
class BallDomain final : public GreenProvider {
 public:
  BallDomain(Dimension dim, Point center, double radius);
  /// Unit ball centered at the origin.
  explicit BallDomain(Dimension dim);

  const Dimension& dim() const override { return dim_; }
  const Point& center() const { return center_; }
  double radius() const { return radius_; }

  bool contains(std::span<const double> x) const override;
  double boundary_distance(std::span<const double> x) const override;

  double green(std::span<const double> x, std::span<const double> y) const override;
  double regular_part(std::span<const double> x, std::span<const double> y) const override;
  Point regular_part_grad_y(std::span<const double> x, std::span<const double> y) const override;
  double robin(std::span<const double> x) const override;
  Point robin_grad(std::span<const double> x) const override;

 private:
  Point to_unit(std::span<const double> x) const;
  void check_interior(std::span<const double> x, const char* what) const;

  Dimension dim_;
  Point center_;
  double radius_;
};

/// Axis-aligned search box.
struct SearchBox {
  Point lower;
  Point upper;
};

struct RobinMinimum {
  Point point;
  double value = 0.0;
  int iterations = 0;
};

/// Coarse grid scan of the Robin function over the box, refined by
/// Nelder-Mead. Throws a search error when the simplex does not collapse.
RobinMinimum find_robin_min(const GreenProvider& provider, const SearchBox& box,
                            int max_iterations = 2000, double tolerance = 1e-10);

}  // namespace bubbletower
