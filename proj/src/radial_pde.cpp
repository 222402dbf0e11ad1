#include "bubbletower/radial_pde.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "bubbletower/errors.hpp"
#include "bubbletower/parallel.hpp"
#include "bubbletower/projection.hpp"
#include "bubbletower/tower_ansatz.hpp"

namespace bubbletower {

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Residuals and Jacobian of -Delta_h u - f_eps(u) on the unknowns; the weak
// form M F is what the tridiagonal solves use.
class Discrete {
 public:
  Discrete(const RadialOperator& op, double eps) : op_(op), eps_(eps) {}

  std::size_t unknowns() const { return op_.unknowns(); }

  std::vector<double> weak(std::span<const double> u) const {
    auto w = op_.stiffness(u);
    const auto vol = op_.volumes();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= vol[i] * f_eps(op_.dim(), u[i], eps_);
    return w;
  }

  /// ||F||_inf and ||f_eps(u)||_inf over the unknowns.
  std::pair<double, double> strong_norms(std::span<const double> u,
                                         std::span<const double> w) const {
    const auto vol = op_.volumes();
    double fn = 0.0, rn = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      rn = std::max(rn, std::abs(w[i] / vol[i]));
      fn = std::max(fn, std::abs(f_eps(op_.dim(), u[i], eps_)));
    }
    return {rn, fn};
  }

  /// Squared L2 norm of the strong residual with the lumped mass.
  double merit(std::span<const double> w) const {
    const auto vol = op_.volumes();
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * w[i] / vol[i];
    return s;
  }

  Tridiagonal jacobian(std::span<const double> u) const {
    auto a = op_.stiffness_matrix();
    const auto vol = op_.volumes();
    for (std::size_t i = 0; i < a.size(); ++i)
      a.diag(i) -= vol[i] * f_eps_prime(op_.dim(), u[i], eps_);
    return a;
  }

 private:
  const RadialOperator& op_;
  double eps_;
};

struct NewtonRun {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
};

bool is_converged(double rn, double fn, const NewtonOptions& opts) {
  return rn < opts.rel_tol * fn + opts.abs_tol;
}

// Damped Newton with backtracking on the L2 strong residual.
NewtonRun damped_newton(const Discrete& sys, std::vector<double>& u, const NewtonOptions& opts,
                        std::vector<double>& trace) {
  NewtonRun run;
  const std::size_t m = sys.unknowns();
  auto w = sys.weak(u);
  double merit = sys.merit(w);
  for (;;) {
    const auto [rn, fn] = sys.strong_norms(u, w);
    run.residual = fn > 0.0 ? rn / fn : rn;
    trace.push_back(run.residual);
    if (is_converged(rn, fn, opts)) {
      run.converged = true;
      return run;
    }
    if (run.iterations >= opts.max_iterations || !std::isfinite(merit)) return run;
    std::vector<double> rhs(m);
    for (std::size_t i = 0; i < m; ++i) rhs[i] = -w[i];
    const auto delta = sys.jacobian(u).solve(rhs);
    ++run.iterations;
    bool accepted = false;
    for (double step = 1.0; step >= 1.0 / 256; step *= 0.5) {
      std::vector<double> trial(u);
      for (std::size_t i = 0; i < m; ++i) trial[i] += step * delta[i];
      auto wt = sys.weak(trial);
      const double mt = sys.merit(wt);
      if (std::isfinite(mt) && mt < merit) {
        u = std::move(trial);
        w = std::move(wt);
        merit = mt;
        accepted = true;
        break;
      }
    }
    if (!accepted) return run;
  }
}

// Pseudo-arclength continuation of W(u) - (1 - lambda) W(u0) = 0 from
// lambda = 0 to 1. Returns the iterate interpolated at lambda = 1.
std::optional<std::vector<double>> homotopy(const Discrete& sys, const std::vector<double>& u0,
                                            const NewtonOptions& opts, int& steps,
                                            std::vector<double>& trace) {
  const std::size_t m = sys.unknowns();
  const auto w0 = sys.weak(u0);
  std::vector<double> neg_w0(m);
  for (std::size_t i = 0; i < m; ++i) neg_w0[i] = -w0[i];
  const double scale = 1.0 / std::max(max_abs(u0), 1e-300);
  const double s2 = scale * scale / static_cast<double>(m);
  auto dot = [&](std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += a[i] * b[i];
    return s2 * s;
  };
  auto tangent = [&](std::span<const double> u, std::vector<double>& tu, double& tl) {
    tu = sys.jacobian(u).solve(neg_w0);
    tl = 1.0;
    const double nrm = std::sqrt(dot(tu, tu) + 1.0);
    for (auto& x : tu) x /= nrm;
    tl /= nrm;
  };

  std::vector<double> u(u0), tu;
  double lam = 0.0, tl = 0.0;
  tangent(u, tu, tl);
  double ds = 0.05;
  const double ds_max = 0.5, ds_min = 1e-9;
  steps = 0;
  while (steps < opts.max_continuation_steps) {
    std::vector<double> v(u);
    for (std::size_t i = 0; i < m; ++i) v[i] += ds * tu[i];
    double mu = lam + ds * tl;
    const std::vector<double> pred(v);
    const double mu_pred = mu;
    bool ok = false;
    int it = 0;
    for (; it < 8; ++it) {
      auto h = sys.weak(v);
      for (std::size_t i = 0; i < m; ++i) h[i] = -(h[i] - (1.0 - mu) * w0[i]);
      const auto jac = sys.jacobian(v);
      const auto z1 = jac.solve(h);
      const auto z2 = jac.solve(neg_w0);
      std::vector<double> off(m);
      for (std::size_t i = 0; i < m; ++i) off[i] = v[i] - pred[i];
      const double c = dot(tu, off) + tl * (mu - mu_pred);
      const double denom = dot(tu, z2) + tl;
      if (denom == 0.0 || !std::isfinite(denom)) break;
      const double dmu = (-c - dot(tu, z1)) / denom;
      std::vector<double> dv(m);
      for (std::size_t i = 0; i < m; ++i) dv[i] = z1[i] + dmu * z2[i];
      for (std::size_t i = 0; i < m; ++i) v[i] += dv[i];
      mu += dmu;
      const double step = std::sqrt(dot(dv, dv) + dmu * dmu);
      if (!std::isfinite(step)) break;
      if (step < 1e-10 * (1.0 + std::sqrt(dot(v, v)))) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      ds *= 0.5;
      if (ds < ds_min) return std::nullopt;
      continue;
    }
    if (mu >= 1.0) {
      // land on lambda = 1 with Newton at fixed lambda from the interpolant
      const double wgt = (1.0 - lam) / (mu - lam);
      std::vector<double> out(u);
      for (std::size_t i = 0; i < m; ++i) out[i] += wgt * (v[i] - u[i]);
      NewtonOptions land = opts;
      land.max_iterations = 12;
      std::vector<double> landing_trace;
      if (damped_newton(sys, out, land, landing_trace).converged) {
        ++steps;
        trace.push_back(1.0);
        return out;
      }
      ds *= 0.5;
      if (ds < ds_min) return std::nullopt;
      continue;
    }
    ++steps;
    trace.push_back(mu);
    if (mu < -1.0) return std::nullopt;
    std::vector<double> tu_new;
    double tl_new = 0.0;
    tangent(v, tu_new, tl_new);
    if (dot(tu_new, tu) + tl_new * tl < 0.0) {
      for (auto& x : tu_new) x = -x;
      tl_new = -tl_new;
    }
    u = std::move(v);
    lam = mu;
    tu = std::move(tu_new);
    tl = tl_new;
    if (it <= 2)
      ds = std::min(1.5 * ds, ds_max);
    else if (it >= 5)
      ds *= 0.7;
  }
  return std::nullopt;
}

}  // namespace

std::vector<double> apply_radial_laplacian(const Dimension& dim, const RadialGrid& grid,
                                           std::span<const double> values) {
  return RadialOperator(dim, grid).laplacian(values);
}

RadialSolution newton_solve(const BallDomain& dom, const RadialGrid& grid, double eps,
                            std::vector<double> initial, const NewtonOptions& opts) {
  require(std::abs(grid.radius() - dom.radius()) <= 1e-14 * dom.radius(), ErrorKind::parameter,
          "newton_solve: grid must end at the ball radius");
  require(initial.size() == grid.size(), ErrorKind::parameter,
          "newton_solve: initial guess size does not match the grid");
  require(eps >= 0.0 && eps < 1.0, ErrorKind::parameter, "newton_solve: eps must lie in [0, 1)");
  const RadialOperator op(dom.dim(), grid);
  const Discrete sys(op, eps);
  initial.back() = 0.0;

  RadialSolution sol;
  sol.grid = grid;
  sol.eps = eps;
  try {
    std::vector<double> u(initial);
    auto run = damped_newton(sys, u, opts, sol.trace);
    int iterations = run.iterations;
    if (!run.converged && opts.allow_continuation) {
      int steps = 0;
      auto start = homotopy(sys, initial, opts, steps, sol.trace);
      sol.continuation_steps = steps;
      if (start) {
        u = std::move(*start);
        run = damped_newton(sys, u, opts, sol.trace);
        iterations += run.iterations;
      }
    }
    sol.values = std::move(u);
    sol.converged = run.converged;
    sol.newton_iterations = iterations;
    sol.residual = run.residual;
  } catch (const SolverError& e) {
    throw SolverError(ErrorKind::solver,
                      std::string("newton_solve: ") + e.what() +
                          " (singular Jacobian; continue from a larger eps or a closer guess)",
                      sol.trace);
  }
  if (!sol.converged)
    throw SolverError(ErrorKind::solver,
                      "newton_solve: no convergence at eps=" + std::to_string(eps) +
                          ", relative residual " + std::to_string(sol.residual),
                      sol.trace);
  sol.nodal_radii = nodal_radii(grid, sol.values);
  sol.scales = extract_scales(dom.dim(), grid, sol.values, eps);
  return sol;
}

std::vector<double> nodal_radii(const RadialGrid& grid, std::span<const double> values) {
  std::vector<double> out;
  int last_sign = 0;
  std::size_t last_idx = 0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const int s = values[i] > 0.0 ? 1 : (values[i] < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) {
      const double a = values[last_idx], b = values[i];
      const double w = a / (a - b);
      out.push_back(grid[last_idx] + w * (grid[i] - grid[last_idx]));
    }
    last_sign = s;
    last_idx = i;
  }
  return out;
}

std::vector<ScaleEstimate> extract_scales(const Dimension& dim, const RadialGrid& grid,
                                          std::span<const double> values, double eps,
                                          int expected_k) {
  require(values.size() == grid.size(), ErrorKind::parameter, "extract_scales: size mismatch");
  struct Domain {
    std::size_t begin, end;
  };
  std::vector<Domain> domains;
  std::size_t begin = 0;
  int sign = 0;
  const std::size_t last = values.size() - 1;
  for (std::size_t i = 0; i < last; ++i) {
    const int s = values[i] > 0.0 ? 1 : (values[i] < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (sign != 0 && s != sign) {
      domains.push_back({begin, i});
      begin = i;
    }
    sign = s;
  }
  domains.push_back({begin, last});

  std::vector<ScaleEstimate> inner_first;
  for (const auto& dm : domains) {
    std::size_t j = dm.begin;
    for (std::size_t i = dm.begin; i < dm.end; ++i)
      if (std::abs(values[i]) > std::abs(values[j])) j = i;
    ScaleEstimate est;
    est.radius = grid[j];
    est.height = values[j];
    if (j > dm.begin && j + 1 < dm.end) {
      // vertex of the parabola through three nodes
      const double x0 = grid[j - 1], x1 = grid[j], x2 = grid[j + 1];
      const double y0 = values[j - 1], y1 = values[j], y2 = values[j + 1];
      const double d01 = (y1 - y0) / (x1 - x0), d12 = (y2 - y1) / (x2 - x1);
      const double a = (d12 - d01) / (x2 - x0);
      if (a != 0.0) {
        const double b = d01 - a * (x0 + x1);
        const double xv = std::clamp(-b / (2.0 * a), x0, x2);
        est.radius = xv;
        est.height = y1 + (xv - x1) * (d01 + a * (xv - x0));
      }
    }
    est.mu = std::pow(dim.alpha() / std::abs(est.height), 1.0 / dim.half_nm2());
    inner_first.push_back(est);
  }
  const int found = static_cast<int>(inner_first.size());
  if (expected_k > 0)
    require(found == expected_k, ErrorKind::structure,
            "extract_scales: found " + std::to_string(found) + " extrema, expected " +
                std::to_string(expected_k));
  std::vector<ScaleEstimate> out(inner_first.rbegin(), inner_first.rend());
  const double t = eps > 0.0 && eps < std::exp(-1.0) ? schedule_parameter(eps) : 0.0;
  for (int i = 0; i < found; ++i)
    out[i].d = t > 0.0 ? out[i].mu / std::pow(t, (2.0 * (i + 1) - 1.0) / (dim.n() - 2.0)) : 0.0;
  return out;
}

std::vector<ScaleEstimate> extract_scales(const RadialSolution& sol, const Dimension& dim,
                                          int expected_k) {
  return extract_scales(dim, sol.grid, sol.values, sol.eps, expected_k);
}

RadialGrid grid_for_scale(double mu_smallest, double radius, const GridOptions& opts) {
  require(mu_smallest > 0.0 && std::isfinite(mu_smallest), ErrorKind::parameter,
          "grid_for_scale: scale must be positive");
  const int npd = opts.nodes_per_decade;
  const double target = opts.r_min_factor * mu_smallest / radius;
  // round down so r_min never exceeds the requested fraction of the scale
  const double j = std::floor(npd * std::log10(target) + 1e-9);
  const double r_min = std::min(std::pow(10.0, j / npd), 0.1) * radius;
  return RadialGrid::geometric(r_min, npd, radius);
}

RadialSolution solve_with_regrid(const BallDomain& dom, int k, double eps, const RadialGrid& grid,
                                 std::vector<double> initial, const GridOptions& grid_opts,
                                 const NewtonOptions& newton) {
  (void)k;
  RadialGrid g = grid;
  std::vector<double> visited{g.r_min()};
  int iterations = 0, steps = 0;
  for (int regrid = 0;; ++regrid) {
    auto sol = newton_solve(dom, g, eps, std::move(initial), newton);
    sol.regrids = regrid;
    iterations += sol.newton_iterations;
    steps += sol.continuation_steps;
    sol.newton_iterations = iterations;
    sol.continuation_steps = steps;
    double smallest = INFINITY;
    for (const auto& s : sol.scales) smallest = std::min(smallest, s.mu);
    const RadialGrid next = grid_for_scale(smallest, dom.radius(), grid_opts);
    const bool seen = std::any_of(visited.begin(), visited.end(), [&](double r) {
      return std::abs(r - next.r_min()) <= 1e-12 * r;
    });
    if (seen || regrid >= grid_opts.max_regrids) return sol;
    visited.push_back(next.r_min());
    if (g.nodes_below(smallest) >= 10) {
      initial = interpolate(g, sol.values, next);
    } else {
      // the old grid did not resolve the innermost bubble: restart from the
      // tower with the extracted scales and signs
      initial.assign(next.size(), 0.0);
      for (const auto& s : sol.scales)
        for (std::size_t j = 0; j < next.size(); ++j)
          initial[j] += std::copysign(1.0, s.height) *
                        projected_bubble_radial(dom.dim(), s.mu, dom.radius(), next[j]);
      initial.back() = 0.0;
    }
    g = next;
  }
}

RadialSolution solve_from_ansatz(const BallDomain& dom, const TowerConfig& cfg,
                                 const GridOptions& grid_opts, const NewtonOptions& newton) {
  const auto mu = cfg.scales();
  const auto grid = grid_for_scale(*std::min_element(mu.begin(), mu.end()), dom.radius(), grid_opts);
  auto v = assemble_tower_radial(dom, cfg, grid);
  return solve_with_regrid(dom, cfg.k, cfg.eps, grid, std::move(v), grid_opts, newton);
}

std::vector<double> continue_in_eps(const BallDomain& dom, const RadialGrid& grid,
                                    std::vector<double> u, double eps_from, double eps_to,
                                    const NewtonOptions& newton) {
  require(u.size() == grid.size(), ErrorKind::parameter, "continue_in_eps: size mismatch");
  const RadialOperator op(dom.dim(), grid);
  const auto vol = op.volumes();
  const std::size_t m = op.unknowns();
  std::vector<double> trace;
  NewtonOptions corrector = newton;
  corrector.max_iterations = 10;
  u.back() = 0.0;
  if (!damped_newton(Discrete(op, eps_from), u, corrector, trace).converged)
    throw SolverError(ErrorKind::solver,
                      "continue_in_eps: start is not a solution at eps=" + std::to_string(eps_from),
                      trace);
  double eps = eps_from;
  double step = std::log(eps_to / eps_from);
  const double min_step = std::abs(step) / 4096.0;
  int steps = 0;
  while (eps != eps_to) {
    const double remaining = std::log(eps_to / eps);
    if (std::abs(step) > std::abs(remaining)) step = remaining;
    const double next = std::abs(step - remaining) <= 1e-14 * std::abs(remaining)
                            ? eps_to
                            : eps * std::exp(step);
    // Euler predictor along the branch: J du/deps = -dW/deps, dW/deps = M ln(L) f
    const Discrete here(op, eps);
    std::vector<double> rhs(m);
    for (std::size_t i = 0; i < m; ++i)
      rhs[i] = -vol[i] * std::log(log_e_plus(u[i])) * f_eps(dom.dim(), u[i], eps);
    const auto du = here.jacobian(u).solve(rhs);
    std::vector<double> trial(u);
    for (std::size_t i = 0; i < m; ++i) trial[i] += (next - eps) * du[i];
    const auto run = damped_newton(Discrete(op, next), trial, corrector, trace);
    if (run.converged) {
      u = std::move(trial);
      eps = next;
      ++steps;
      if (run.iterations <= 3) step *= 2.0;
    } else {
      step *= 0.5;
      if (std::abs(step) < min_step || steps > 10000)
        throw SolverError(ErrorKind::solver,
                          "continue_in_eps: step underflow at eps=" + std::to_string(eps), trace);
    }
  }
  return u;
}

LsResult ls_correction(const BallDomain& dom, const RadialGrid& grid, const TowerConfig& cfg,
                       const LsOptions& opts) {
  const auto mu = cfg.scales();
  const double smallest = *std::min_element(mu.begin(), mu.end());
  require(grid.nodes_below(smallest) >= 10, ErrorKind::resolution,
          "ls_correction: fewer than 10 grid nodes below the smallest scale");
  const Dimension& dim = cfg.dim;
  const RadialOperator op(dim, grid);
  const std::size_t N = grid.size(), m = op.unknowns();
  const int k = cfg.k;
  const auto vol = op.volumes();
  const auto V = assemble_tower_radial(dom, cfg, grid);

  std::vector<std::vector<double>> Z(k), KZ(k), Y(k);
  Tridiagonal A = op.stiffness_matrix();
  std::vector<double> fprime(m);
  for (std::size_t i = 0; i < m; ++i) {
    fprime[i] = f_eps_prime(dim, V[i], cfg.eps);
    A.diag(i) -= vol[i] * fprime[i];
  }
  Eigen::MatrixXd S(k, k);
  for (int i = 0; i < k; ++i) {
    Z[i].resize(N);
    for (std::size_t j = 0; j < N; ++j)
      Z[i][j] = projected_psi0_radial(dim, mu[i], dom.radius(), grid[j]);
    Z[i].back() = 0.0;
    KZ[i] = op.stiffness(Z[i]);
    Y[i] = A.solve(KZ[i]);
  }
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      double s = 0.0;
      for (std::size_t q = 0; q < m; ++q) s += KZ[i][q] * Y[j][q];
      S(i, j) = s;
    }
  const auto S_lu = S.fullPivLu();
  require(S_lu.isInvertible(), ErrorKind::solvability,
          "ls_correction: kernel Gram system is singular");

  auto E = op.stiffness(V);
  for (std::size_t i = 0; i < m; ++i) E[i] -= vol[i] * f_eps(dim, V[i], cfg.eps);

  LsResult res;
  res.grid = grid;
  res.phi.assign(N, 0.0);
  res.c.assign(k, 0.0);
  const double v_norm = std::sqrt(op.energy(V));
  double prev_update = INFINITY;
  int stalled = 0;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    std::vector<double> rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double u = V[i] + res.phi[i];
      const double nl = f_eps(dim, u, cfg.eps) - f_eps(dim, V[i], cfg.eps) - fprime[i] * res.phi[i];
      rhs[i] = -E[i] + vol[i] * nl;
    }
    const auto x = A.solve(rhs);
    Eigen::VectorXd b(k);
    for (int i = 0; i < k; ++i) {
      double s = 0.0;
      for (std::size_t q = 0; q < m; ++q) s += KZ[i][q] * x[q];
      b(i) = -s;
    }
    const Eigen::VectorXd c = S_lu.solve(b);
    std::vector<double> phi(N, 0.0);
    for (std::size_t q = 0; q < m; ++q) {
      double s = x[q];
      for (int i = 0; i < k; ++i) s += c(i) * Y[i][q];
      phi[q] = s;
    }
    std::vector<double> diff(N);
    for (std::size_t q = 0; q < N; ++q) diff[q] = phi[q] - res.phi[q];
    const double update = std::sqrt(op.energy(diff));
    res.phi = std::move(phi);
    for (int i = 0; i < k; ++i) res.c[i] = c(i);
    res.iterations = it;
    res.update_trace.push_back(update);
    if (!std::isfinite(update))
      throw SolverError(ErrorKind::non_contraction, "ls_correction: iteration diverged",
                        res.update_trace);
    if (std::isfinite(prev_update) && prev_update > 0.0) res.update_ratio = update / prev_update;
    if (update < opts.tolerance * std::max(1.0, v_norm)) break;
    stalled = res.update_ratio >= opts.stall_ratio && std::isfinite(prev_update) ? stalled + 1 : 0;
    if (stalled >= opts.stall_window)
      throw SolverError(ErrorKind::non_contraction,
                        "ls_correction: contraction stalled (update ratio " +
                            std::to_string(res.update_ratio) + ")",
                        res.update_trace);
    if (it == opts.max_iterations)
      throw SolverError(ErrorKind::non_contraction,
                        "ls_correction: no convergence in " + std::to_string(it) + " iterations",
                        res.update_trace);
    prev_update = update;
  }
  res.phi_norm = std::sqrt(op.energy(res.phi));
  for (int i = 0; i < k; ++i) {
    const double zn = std::sqrt(op.energy(Z[i]));
    const double denom = zn * res.phi_norm;
    res.orthogonality.push_back(denom > 0.0 ? std::abs(op.energy_dot(res.phi, Z[i])) / denom
                                            : 0.0);
  }
  return res;
}

namespace {

void validate_eps_grid(std::span<const double> eps) {
  require(!eps.empty(), ErrorKind::parameter, "sweep: empty eps grid");
  for (double e : eps)
    require(e > 0.0 && e < std::exp(-1.0), ErrorKind::parameter,
            "sweep: eps values must lie in (0, 1/e)");
  if (eps.size() < 3) {
    for (std::size_t i = 1; i < eps.size(); ++i)
      require(eps[i] < eps[i - 1], ErrorKind::parameter, "sweep: eps grid must decrease");
    return;
  }
  double lo = INFINITY, hi = 0.0;
  for (std::size_t i = 1; i < eps.size(); ++i) {
    const double q = eps[i] / eps[i - 1];
    require(q < 1.0, ErrorKind::parameter, "sweep: eps grid must decrease");
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  require(hi / lo <= 1.1, ErrorKind::parameter, "sweep: eps grid must be geometric");
}

SweepPoint make_point(double eps, const RadialSolution& sol) {
  SweepPoint pt;
  pt.eps = eps;
  pt.converged = sol.converged;
  pt.newton_iterations = sol.newton_iterations;
  pt.continuation_steps = sol.continuation_steps;
  pt.regrids = sol.regrids;
  pt.residual = sol.residual;
  pt.grid_nodes = sol.grid.size();
  for (const auto& s : sol.scales) {
    pt.mu.push_back(s.mu);
    pt.d.push_back(s.d);
    pt.heights.push_back(s.height);
  }
  pt.nodal_radii = sol.nodal_radii;
  pt.solution = sol;
  return pt;
}

struct Anchor {
  double eps;
  RadialSolution sol;
};

// Scales at eps from a secant in (log t, log mu_i) through the last two
// anchors; with a single anchor its scales are kept.
// Secant in (log t, log mu_i) through the last two anchors; with a single
// anchor the nominal exponents (2i-1)/(n-2) of the schedule.
std::vector<double> predict_scales(const Dimension& dim, double eps,
                                   const std::vector<Anchor>& done) {
  const auto& a = done.back();
  std::vector<double> mu;
  for (const auto& s : a.sol.scales) mu.push_back(s.mu);
  const double lt = std::log(schedule_parameter(eps) / schedule_parameter(a.eps));
  if (done.size() < 2 || done[done.size() - 2].sol.scales.size() != mu.size()) {
    for (std::size_t i = 0; i < mu.size(); ++i)
      mu[i] *= std::exp((2.0 * static_cast<double>(i) + 1.0) / (dim.n() - 2.0) * lt);
    return mu;
  }
  const auto& b = done[done.size() - 2];
  const double span = std::log(schedule_parameter(a.eps) / schedule_parameter(b.eps));
  for (std::size_t i = 0; i < mu.size(); ++i)
    mu[i] *= std::exp(std::log(mu[i] / b.sol.scales[i].mu) / span * lt);
  return mu;
}

RadialSolution warm_substep(const BallDomain& dom, int k, double eps,
                            const std::vector<Anchor>& done, const SweepOptions& opts) {
  const auto mu = predict_scales(dom.dim(), eps, done);
  const double smallest =
      std::min(*std::min_element(mu.begin(), mu.end()), done.back().sol.scales.back().mu);
  const auto grid = grid_for_scale(smallest, dom.radius(), opts.grid);
  const auto& prev = done.back();
  auto u = continue_in_eps(dom, grid, interpolate(prev.sol.grid, prev.sol.values, grid), prev.eps,
                           eps, opts.newton);
  return solve_with_regrid(dom, k, eps, grid, std::move(u), opts.grid, opts.newton);
}

// Substeps change eps by at most a factor sqrt(2) so the predicted grid stays
// ahead of the shrinking scales; counts are summed over the substeps.
RadialSolution warm_step(const BallDomain& dom, int k, double eps, const std::vector<Anchor>& done,
                         const SweepOptions& opts) {
  const double from = done.back().eps;
  const int m = std::max(1, static_cast<int>(std::ceil(std::log(from / eps) /
                                                       std::log(std::sqrt(2.0)) - 1e-9)));
  std::vector<Anchor> local = done;
  RadialSolution sol;
  int newton = 0, steps = 0, regrids = 0;
  for (int j = 1; j <= m; ++j) {
    const double e = j == m ? eps : from * std::pow(eps / from, static_cast<double>(j) / m);
    sol = warm_substep(dom, k, e, local, opts);
    newton += sol.newton_iterations;
    steps += sol.continuation_steps;
    regrids += sol.regrids;
    local.push_back({e, sol});
  }
  sol.newton_iterations = newton;
  sol.continuation_steps = steps;
  sol.regrids = regrids;
  return sol;
}

}  // namespace

SweepReport sweep_epsilon(const BallDomain& dom, int k, std::span<const double> eps_grid,
                          std::span<const double> d_bar, const SweepOptions& opts) {
  require(k >= 1, ErrorKind::parameter, "sweep: k must be >= 1");
  require(static_cast<int>(d_bar.size()) == k, ErrorKind::parameter,
          "sweep: need one dilation per bubble");
  validate_eps_grid(eps_grid);
  const Dimension& dim = dom.dim();
  SweepReport report;
  report.k = k;

  auto cold = [&](double eps) {
    const auto cfg = TowerConfig::make(dim, k, eps, d_bar, {}, dom.center(), opts.rho);
    return solve_from_ansatz(dom, cfg, opts.grid, opts.newton);
  };
  auto failed_point = [&](double eps, const std::exception& e) {
    SweepPoint pt;
    pt.eps = eps;
    pt.error = e.what();
    return pt;
  };
  auto first_failure = [&](double eps, const std::exception& e) {
    return SolverError(ErrorKind::solver,
                       "sweep: first point eps=" + std::to_string(eps) +
                           " did not converge; start from a larger eps0 (" + e.what() + ")",
                       {});
  };

  if (opts.mode == StartMode::cold) {
    report.points = parallel_map(eps_grid.size(), [&](std::size_t i) {
      try {
        return make_point(eps_grid[i], cold(eps_grid[i]));
      } catch (const Error& e) {
        if (!e.is_numerical()) throw;
        return failed_point(eps_grid[i], e);
      }
    });
    if (!report.points.front().converged)
      throw first_failure(eps_grid[0], Error(ErrorKind::solver, report.points.front().error));
  } else {
    std::vector<Anchor> done;
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
      const double eps = eps_grid[i];
      try {
        auto sol = done.empty() ? cold(eps) : warm_step(dom, k, eps, done, opts);
        done.push_back({eps, sol});
        report.points.push_back(make_point(eps, sol));
      } catch (const Error& e) {
        if (!e.is_numerical()) throw;
        if (i == 0) throw first_failure(eps, e);
        report.points.push_back(failed_point(eps, e));
      }
    }
  }
  report.eps0_proxy = 0.0;
  for (std::size_t i = report.points.size(); i-- > 0;) {
    if (!report.points[i].converged) break;
    report.eps0_proxy = report.points[i].eps;
  }
  return report;
}

}  // namespace bubbletower
