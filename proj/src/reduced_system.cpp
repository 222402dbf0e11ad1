#include "bubbletower/reduced_system.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "bubbletower/constants.hpp"
#include "bubbletower/errors.hpp"
#include "bubbletower/tower_config.hpp"

namespace bubbletower {

ReducedConstants ReducedConstants::compute(std::shared_ptr<const GreenProvider> domain,
                                           GreenNormalization normalization,
                                           const QuadSpec& spec) {
  require(domain != nullptr, ErrorKind::parameter, "reduced constants need a domain");
  ReducedConstants c;
  c.dim = domain->dim();
  c.a1 = const_a(c.dim, 1, spec).value;
  c.a2 = const_a(c.dim, 2, spec).value;
  c.a3 = const_a(c.dim, 3, spec).value;
  c.a4 = const_a(c.dim, 4, spec).value;
  const Dimension dim = c.dim;
  const double g0 = g_sigma(dim, Point(dim.n(), 0.0), spec).value;
  c.g = [dim, g0, spec](std::span<const double> sigma) {
    if (norm(sigma) == 0.0) return g0;
    return g_sigma(dim, sigma, spec).value;
  };
  c.domain = std::move(domain);
  c.normalization = normalization;
  c.validate();
  return c;
}

namespace {

double robin_factor(const ReducedConstants& c) {
  return c.normalization == GreenNormalization::standard
             ? 1.0
             : (c.dim.n() - 2.0) * c.dim.sphere_area();
}

}  // namespace

double ReducedConstants::robin(std::span<const double> x) const {
  return robin_factor(*this) * domain->robin(x);
}

Point ReducedConstants::robin_grad(std::span<const double> x) const {
  Point g = domain->robin_grad(x);
  const double f = robin_factor(*this);
  for (double& v : g) v *= f;
  return g;
}

void ReducedConstants::validate() const {
  require(a1 > 0.0 && a2 > 0.0 && a3 > 0.0 && a4 > 0.0, ErrorKind::parameter,
          "reduced constants must all be positive");
  require(domain != nullptr && domain->dim() == dim, ErrorKind::parameter,
          "reduced constants: domain dimension differs");
  require(static_cast<bool>(g), ErrorKind::parameter, "reduced constants: missing g evaluator");
}

std::vector<double> ReducedState::dilations() const {
  std::vector<double> d(s.size());
  double acc = 1.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    acc *= s[i];
    d[i] = acc;
  }
  return d;
}

void ReducedState::validate() const {
  require(k >= 1 && static_cast<int>(s.size()) == k, ErrorKind::parameter,
          "reduced state: need k values of s");
  for (double v : s) require(v > 0.0, ErrorKind::parameter, "reduced state: s_i must be positive");
  require(static_cast<int>(sigma.size()) == k - 1, ErrorKind::parameter,
          "reduced state: need k-1 drift vectors");
  require(static_cast<int>(xi.size()) == dim.n(), ErrorKind::parameter,
          "reduced state: xi has wrong dimension");
}

double bubble_balance(const ReducedConstants& c, int i, double s, std::span<const double> xi,
                      std::span<const double> sigma) {
  require(s > 0.0, ErrorKind::parameter, "bubble_balance: s must be positive");
  const double n = c.dim.n();
  const double log_term = c.a4 * 2.0 / (2.0 * i - 1.0) * std::abs(std::log(s));
  if (i == 1) return c.dim.alpha() * c.a1 * std::pow(s, n - 2.0) * c.robin(xi) - log_term;
  return c.a3 * std::pow(s, 0.5 * (n - 2.0)) * c.g(sigma) - log_term;
}

Eigen::VectorXd eval_G(const ReducedState& state, const ReducedConstants& c) {
  state.validate();
  const int n = c.dim.n();
  Eigen::VectorXd G(1 + n);
  double g0 = 0.0;
  for (int i = 1; i <= state.k; ++i) {
    const Point zero(n, 0.0);
    g0 += bubble_balance(c, i, state.s[i - 1], state.xi, i >= 2 ? state.sigma[i - 2] : zero);
  }
  G(0) = g0;
  const Point grad = c.robin_grad(state.xi);
  const double s1 = std::pow(state.s[0], n - 2.0);
  for (int h = 1; h <= n; ++h) G(h) = 0.5 * c.dim.alpha() * c.a2 * grad[h - 1] * s1;
  return G;
}

Eigen::VectorXd eval_G_eps(const ReducedState& state, const ReducedConstants& c, double eps) {
  state.validate();
  const int n = c.dim.n();
  const int k = state.k;
  const double t = schedule_parameter(eps);
  const auto d = state.dilations();
  double g0 = c.dim.alpha() * c.a1 * std::pow(d[0], n - 2.0) * c.robin(state.xi);
  for (int i = 1; i < k; ++i)
    g0 += c.a3 * std::pow(d[i] / d[i - 1], 0.5 * (n - 2.0)) * c.g(state.sigma[i - 1]);
  for (int i = 1; i <= k; ++i) g0 -= c.a4 * 2.0 / (2.0 * i - 1.0) * std::abs(std::log(d[i - 1]));
  Eigen::VectorXd G(1 + n);
  G(0) = t * g0 - 2.0 * k * k / ((n - 2.0) * (n - 2.0)) * c.a4 * eps * std::abs(std::log(t));
  const Point grad = c.robin_grad(state.xi);
  for (int h = 1; h <= n; ++h)
    G(h) = t * 0.5 * c.dim.alpha() * c.a2 * grad[h - 1] * std::pow(d[0], n - 1.0);
  return G;
}

namespace {

// Flattened unknowns: s (k), sigma (k-1 blocks of n), xi (n).
std::vector<double> pack(const ReducedState& st) {
  std::vector<double> v(st.s);
  for (const auto& sg : st.sigma) v.insert(v.end(), sg.begin(), sg.end());
  v.insert(v.end(), st.xi.begin(), st.xi.end());
  return v;
}

void unpack(const std::vector<double>& v, ReducedState& st) {
  const int n = st.dim.n();
  std::size_t pos = 0;
  for (int i = 0; i < st.k; ++i) st.s[i] = v[pos++];
  for (auto& sg : st.sigma)
    for (int c = 0; c < n; ++c) sg[c] = v[pos++];
  for (int c = 0; c < n; ++c) st.xi[c] = v[pos++];
}

}  // namespace

Eigen::MatrixXd jacobian_fd(const ReducedState& state, const ReducedConstants& c) {
  state.validate();
  const auto x0 = pack(state);
  const int cols = static_cast<int>(x0.size());
  Eigen::MatrixXd J(1 + c.dim.n(), cols);
  ReducedState probe = state;
  for (int j = 0; j < cols; ++j) {
    double h = 1e-6 * std::max(1.0, std::abs(x0[j]));
    if (j < state.k) {
      h = 1e-6 * x0[j];
      require(h > std::numeric_limits<double>::min() * 1e3, ErrorKind::parameter,
              "jacobian_fd: step underflow for s_" + std::to_string(j + 1));
      require(std::abs(x0[j] - 1.0) > h, ErrorKind::parameter,
              "jacobian_fd: s_" + std::to_string(j + 1) + " sits on the |ln s| kink");
    }
    auto x = x0;
    x[j] = x0[j] + h;
    unpack(x, probe);
    const Eigen::VectorXd gp = eval_G(probe, c);
    x[j] = x0[j] - h;
    unpack(x, probe);
    const Eigen::VectorXd gm = eval_G(probe, c);
    J.col(j) = (gp - gm) / (2.0 * h);
  }
  return J;
}

std::vector<double> bracket_roots(const std::function<double(double)>& f, double lo, double hi,
                                  int points_per_decade) {
  require(lo > 0.0 && hi > lo, ErrorKind::parameter, "bracket_roots: need 0 < lo < hi");
  const int m = std::max(2, static_cast<int>(std::ceil(std::log10(hi / lo) * points_per_decade)));
  std::vector<double> roots;
  double a = lo, fa = f(lo);
  for (int i = 1; i <= m; ++i) {
    const double b = lo * std::pow(hi / lo, static_cast<double>(i) / m);
    const double fb = f(b);
    if (fa == 0.0) {
      roots.push_back(a);
    } else if (fa * fb < 0.0) {
      std::uintmax_t iters = 200;
      auto tol = [](double u, double v) { return std::abs(u - v) <= 1e-15 * std::abs(u); };
      const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
      roots.push_back(0.5 * (r.first + r.second));
    }
    a = b;
    fa = fb;
  }
  if (fa == 0.0) roots.push_back(a);
  return roots;
}

SearchBox ball_search_box(const BallDomain& ball) {
  SearchBox box;
  for (double c : ball.center()) {
    box.lower.push_back(c - 0.9 * ball.radius() / std::sqrt(ball.dim().n()));
    box.upper.push_back(c + 0.9 * ball.radius() / std::sqrt(ball.dim().n()));
  }
  return box;
}

ReducedState solve_reduced(const Dimension& dim, int k, const ReducedConstants& consts,
                           const SearchBox& box, const ReducedOptions& opts) {
  require(k >= 1, ErrorKind::parameter, "solve_reduced: k must be >= 1");
  consts.validate();
  const int n = dim.n();

  ReducedState st;
  st.dim = dim;
  st.k = k;
  st.xi = find_robin_min(*consts.domain, box).point;
  st.sigma.assign(k - 1, Point(n, 0.0));
  st.s.assign(k, 1.0);
  if (k >= 2) {
    const double radii[] = {0.25, 0.5, 1.0, 2.0, 3.0};
    st.g_extremum_at_origin = g_profile(dim, radii).at_origin;
  }

  for (int i = 1; i <= k; ++i) {
    const Point zero(n, 0.0);
    const Point& sg = i >= 2 ? st.sigma[i - 2] : zero;
    auto balance = [&](double s) { return bubble_balance(consts, i, s, st.xi, sg); };
    auto roots = bracket_roots(balance, opts.bracket_lo, opts.bracket_hi);
    if (roots.empty())
      fail(ErrorKind::solvability, "solve_reduced: no sign change of balance " +
                                       std::to_string(i) + " in [bracket_lo, bracket_hi]");
    // First upward crossing: the root reached from Gbar_0 -> -inf as s -> 0.
    double chosen = roots.front();
    for (double r : roots) {
      const double h = 1e-7 * r;
      if (balance(r + h) > balance(r - h)) {
        chosen = r;
        break;
      }
    }
    st.s[i - 1] = chosen;
    st.bracketed_roots.push_back(std::move(roots));
  }

  // Polish (s, xi) with minimum-norm Newton on the full system; sigma stays at
  // the extremum of g, where dg/dsigma = 0.
  std::vector<double> trace;
  Eigen::VectorXd G = eval_G(st, consts);
  trace.push_back(G.lpNorm<Eigen::Infinity>());
  int iter = 0;
  for (; iter < opts.max_newton && G.lpNorm<Eigen::Infinity>() >= opts.tolerance; ++iter) {
    const Eigen::MatrixXd Jfull = jacobian_fd(st, consts);
    Eigen::MatrixXd J(1 + n, k + n);
    J << Jfull.leftCols(k), Jfull.rightCols(n);
    const Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(-G);
    double lambda = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30 && !accepted; ++ls, lambda *= 0.5) {
      ReducedState trial = st;
      bool ok = true;
      for (int i = 0; i < k; ++i) {
        trial.s[i] = st.s[i] + lambda * step(i);
        // never step across the |ln s| kink
        if (trial.s[i] <= 0.0 || (trial.s[i] - 1.0) * (st.s[i] - 1.0) < 0.0) ok = false;
      }
      for (int c = 0; c < n; ++c) trial.xi[c] = st.xi[c] + lambda * step(k + c);
      if (!ok || !consts.domain->contains(trial.xi)) continue;
      const Eigen::VectorXd Gt = eval_G(trial, consts);
      if (Gt.lpNorm<Eigen::Infinity>() < G.lpNorm<Eigen::Infinity>()) {
        st = std::move(trial);
        G = Gt;
        accepted = true;
      }
    }
    trace.push_back(G.lpNorm<Eigen::Infinity>());
    if (!accepted) break;
  }
  if (G.lpNorm<Eigen::Infinity>() >= opts.tolerance)
    throw SolverError(ErrorKind::solver, "solve_reduced: Newton polish did not reach tolerance",
                      trace);

  st.newton_iterations = iter;
  st.g_value = G;
  st.jac = jacobian_fd(st, consts);
  st.singular_values = st.jac.jacobiSvd().singularValues();
  return st;
}

}  // namespace bubbletower
