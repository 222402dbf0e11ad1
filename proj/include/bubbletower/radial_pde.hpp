#pragma once

// Radial solver for -u'' - ((n-1)/r) u' = f_eps(u) on (0, R), u'(0) = 0,
// u(R) = 0, with Newton continuation from the tower ansatz, a discrete
// Lyapunov-Schmidt correction and extraction of concentration scales.

#include <span>
#include <string>
#include <vector>

#include "bubbletower/domain_green.hpp"
#include "bubbletower/radial_grid.hpp"
#include "bubbletower/tower_config.hpp"

namespace bubbletower {

/// -Delta_h u on interior nodes and the Dirichlet row u(R) at the last node.
std::vector<double> apply_radial_laplacian(const Dimension& dim, const RadialGrid& grid,
                                           std::span<const double> values);

struct ScaleEstimate {
  double radius = 0.0;  ///< location of the extremum
  double height = 0.0;  ///< signed extremal value
  double mu = 0.0;      ///< from |height| = alpha mu^{-(n-2)/2}
  double d = 0.0;       ///< mu / t^{(2i-1)/(n-2)}
};

struct RadialSolution {
  RadialGrid grid = RadialGrid::geometric(0.5, 4);
  std::vector<double> values;
  double eps = 0.0;
  bool converged = false;
  /// ||F||_inf / (||f_eps(u)||_inf) at the returned iterate
  double residual = 0.0;
  int newton_iterations = 0;
  int continuation_steps = 0;
  int regrids = 0;
  std::vector<double> trace;
  /// ordered from the outermost bubble (i = 1) inward
  std::vector<ScaleEstimate> scales;
  std::vector<double> nodal_radii;
};

struct NewtonOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_iterations = 40;
  bool allow_continuation = true;
  int max_continuation_steps = 3000;
};

/// Damped Newton on F(u) = -Delta_h u - f_eps(u); on stagnation falls back to
/// the Newton homotopy F(u) - (1 - lambda) F(initial) followed by
/// pseudo-arclength continuation to lambda = 1. Throws a solver error with
/// the residual trace when neither path converges.
RadialSolution newton_solve(const BallDomain& dom, const RadialGrid& grid, double eps,
                            std::vector<double> initial, const NewtonOptions& opts = {});

/// Sign changes of the nodal values (boundary node excluded), linearly
/// interpolated.
std::vector<double> nodal_radii(const RadialGrid& grid, std::span<const double> values);

/// One extremum per nodal domain, outermost first, converted to (mu_i, d_i).
/// expected_k > 0 enforces the count (structure error otherwise).
std::vector<ScaleEstimate> extract_scales(const Dimension& dim, const RadialGrid& grid,
                                          std::span<const double> values, double eps,
                                          int expected_k = 0);
std::vector<ScaleEstimate> extract_scales(const RadialSolution& sol, const Dimension& dim,
                                          int expected_k = 0);

struct GridOptions {
  int nodes_per_decade = 40;
  /// innermost grid scale relative to the smallest bubble scale
  double r_min_factor = 0.1;
  int max_regrids = 8;
};

/// Grid whose uniform core ends at r_min_factor * mu_smallest, snapped to the
/// lattice 10^{j / nodes_per_decade} so equal scales give equal grids.
RadialGrid grid_for_scale(double mu_smallest, double radius, const GridOptions& opts);

/// Solve from an initial guess, regridding until the grid matches the
/// smallest extracted scale.
RadialSolution solve_with_regrid(const BallDomain& dom, int k, double eps, const RadialGrid& grid,
                                 std::vector<double> initial, const GridOptions& grid_opts,
                                 const NewtonOptions& newton = {});

/// Newton from the assembled tower of cfg.
RadialSolution solve_from_ansatz(const BallDomain& dom, const TowerConfig& cfg,
                                 const GridOptions& grid_opts = {},
                                 const NewtonOptions& newton = {});

/// Natural-parameter continuation of a discrete solution in eps on a fixed
/// grid: Euler tangent predictor, Newton corrector, adaptive steps in log eps.
std::vector<double> continue_in_eps(const BallDomain& dom, const RadialGrid& grid,
                                    std::vector<double> u, double eps_from, double eps_to,
                                    const NewtonOptions& newton = {});

struct LsOptions {
  double tolerance = 1e-10;
  int max_iterations = 200;
  double stall_ratio = 0.95;
  int stall_window = 5;
};

struct LsResult {
  RadialGrid grid = RadialGrid::geometric(0.5, 4);
  std::vector<double> phi;
  std::vector<double> c;  ///< multipliers c_{i0} of K P psi^0_i
  int iterations = 0;
  double update_ratio = 0.0;  ///< last ratio of successive update norms
  double phi_norm = 0.0;      ///< H^1_0 norm
  std::vector<double> orthogonality;  ///< |<phi, P psi^0_i>| / (||phi|| ||P psi^0_i||)
  std::vector<double> update_trace;
};

/// Find phi orthogonal in H^1_0 to P psi^0_{mu_i} with
/// K (V + phi) - M f_eps(V + phi) = sum_i c_i K P psi^0_i,
/// by the chord iteration with the linearization at V.
LsResult ls_correction(const BallDomain& dom, const RadialGrid& grid, const TowerConfig& cfg,
                       const LsOptions& opts = {});

enum class StartMode { warm, cold };

struct SweepOptions {
  StartMode mode = StartMode::warm;
  GridOptions grid;
  NewtonOptions newton;
  double rho = 0.5;
};

struct SweepPoint {
  double eps = 0.0;
  bool converged = false;
  int newton_iterations = 0;
  int continuation_steps = 0;
  int regrids = 0;
  double residual = 0.0;
  std::size_t grid_nodes = 0;
  std::vector<double> mu;
  std::vector<double> d;
  std::vector<double> heights;
  std::vector<double> nodal_radii;
  std::string error;
  RadialSolution solution;
};

struct SweepReport {
  int k = 1;
  std::vector<SweepPoint> points;
  /// largest eps from which every later point converged; 0 when the last fails
  double eps0_proxy = 0.0;
};

/// Continuation in eps along a decreasing, geometric grid. Warm mode carries
/// the previous solution along the branch by continue_in_eps on a grid sized
/// for the predicted scales; cold mode starts every point from the ansatz and
/// runs points concurrently.
/// Throws a solver error when the first point diverges.
SweepReport sweep_epsilon(const BallDomain& dom, int k, std::span<const double> eps_grid,
                          std::span<const double> d_bar, const SweepOptions& opts = {});

}  // namespace bubbletower
