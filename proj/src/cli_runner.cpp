#include "bubbletower/cli_runner.hpp"

#include <openssl/evp.h>

#include <Eigen/Core>
#include <algorithm>
#include <boost/version.hpp>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "bubbletower/asymptotics_lab.hpp"
#include "bubbletower/constants.hpp"
#include "bubbletower/errors.hpp"
#include "bubbletower/parallel.hpp"
#include "bubbletower/radial_pde.hpp"
#include "bubbletower/reduced_system.hpp"
#include "bubbletower/tower_ansatz.hpp"

namespace bubbletower {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    fail(ErrorKind::config, "config key '" + key + "': not a number: '" + text + "'");
  return x;
}

int parse_int(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  int x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    fail(ErrorKind::config, "config key '" + key + "': not an integer: '" + text + "'");
  return x;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(ErrorKind::config, "config key '" + key + "': expected true or false: '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ',')) out.push_back(parse_double(key, item));
  return out;
}

std::string print_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

struct Key {
  std::string name;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <class T>
Key int_key(std::string name, T RunConfig::*field) {
  return {name, [field](const RunConfig& c) { return std::to_string(c.*field); },
          [name, field](RunConfig& c, const std::string& v) { c.*field = parse_int(name, v); }};
}

Key double_key(std::string name, double RunConfig::*field) {
  return {name, [field](const RunConfig& c) { return format_double(c.*field); },
          [name, field](RunConfig& c, const std::string& v) { c.*field = parse_double(name, v); }};
}

Key string_key(std::string name, std::string RunConfig::*field) {
  return {name, [field](const RunConfig& c) { return c.*field; },
          [field](RunConfig& c, const std::string& v) { c.*field = trim(v); }};
}

Key list_key(std::string name, std::vector<double> RunConfig::*field) {
  return {name, [field](const RunConfig& c) { return print_list(c.*field); },
          [name, field](RunConfig& c, const std::string& v) { c.*field = parse_list(name, v); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      string_key("cmd", &RunConfig::cmd),
      int_key("n", &RunConfig::n),
      int_key("k", &RunConfig::k),
      list_key("domain.center", &RunConfig::center),
      double_key("domain.radius", &RunConfig::radius),
      string_key("eps", &RunConfig::eps),
      double_key("eta", &RunConfig::eta),
      double_key("rho", &RunConfig::rho),
      list_key("d", &RunConfig::d),
      int_key("grid.nodes_per_decade", &RunConfig::grid_nodes_per_decade),
      double_key("grid.r_min_factor", &RunConfig::grid_r_min_factor),
      int_key("grid.max_regrids", &RunConfig::grid_max_regrids),
      double_key("quad.tolerance", &RunConfig::quad_tolerance),
      int_key("quad.radial_panels", &RunConfig::quad_radial_panels),
      int_key("quad.spherical_order", &RunConfig::quad_spherical_order),
      double_key("quad.truncation_radius", &RunConfig::quad_truncation_radius),
      double_key("newton.rel_tol", &RunConfig::newton_rel_tol),
      double_key("newton.abs_tol", &RunConfig::newton_abs_tol),
      int_key("newton.max_iterations", &RunConfig::newton_max_iterations),
      int_key("newton.max_continuation_steps", &RunConfig::newton_max_continuation_steps),
      double_key("reduce.tolerance", &RunConfig::reduce_tolerance),
      string_key("sweep.mode", &RunConfig::sweep_mode),
      {"ls.enabled", [](const RunConfig& c) { return std::string(c.ls_enabled ? "true" : "false"); },
       [](RunConfig& c, const std::string& v) { c.ls_enabled = parse_bool("ls.enabled", v); }},
      double_key("ls.tolerance", &RunConfig::ls_tolerance),
      int_key("ls.max_iterations", &RunConfig::ls_max_iterations),
      string_key("verify.eps", &RunConfig::verify_eps),
      string_key("output", &RunConfig::output),
  };
  return table;
}

// ---------------------------------------------------------------- writers

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}

  void row(std::vector<std::string> cells) {
    require(cells.size() == header_.size(), ErrorKind::io, "csv row width mismatch");
    rows_.push_back(std::move(cells));
  }

  std::string str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
      }
      out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string num(double x) { return format_double(x); }
std::string num(int x) { return std::to_string(x); }

json jnum(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json jvec(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(jnum(x));
  return a;
}

json jvec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(jnum(v[i]));
  return a;
}

class Report {
 public:
  explicit Report(fs::path dir) : dir_(std::move(dir)) {}

  void csv(const std::string& name, const Csv& table) { write(name, table.str()); }
  void json_file(const std::string& name, const json& obj) { write(name, obj.dump(2) + "\n"); }

  const std::vector<std::string>& files() const { return files_; }
  const fs::path& dir() const { return dir_; }

 private:
  void write(const std::string& name, const std::string& body) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << body;
    out.close();
    if (!out) fail(ErrorKind::io, "cannot write " + path.string());
    if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
  }

  fs::path dir_;
  std::vector<std::string> files_;
};

// ---------------------------------------------------------------- context

struct Context {
  RunConfig cfg;
  Dimension dim;
  BallDomain ball;
  QuadSpec quad;
  GridOptions grid;
  NewtonOptions newton;

  explicit Context(const RunConfig& c)
      : cfg(c),
        dim(c.n),
        ball(dim, c.center.empty() ? Point(c.n, 0.0) : Point(c.center), c.radius) {
    quad.tolerance = c.quad_tolerance;
    quad.radial_panels = c.quad_radial_panels;
    quad.spherical_order = c.quad_spherical_order;
    quad.truncation_radius = c.quad_truncation_radius;
    grid.nodes_per_decade = c.grid_nodes_per_decade;
    grid.r_min_factor = c.grid_r_min_factor;
    grid.max_regrids = c.grid_max_regrids;
    newton.rel_tol = c.newton_rel_tol;
    newton.abs_tol = c.newton_abs_tol;
    newton.max_iterations = c.newton_max_iterations;
    newton.max_continuation_steps = c.newton_max_continuation_steps;
  }

  ReducedState reduce() const {
    auto domain = std::make_shared<BallDomain>(ball);
    const auto consts =
        ReducedConstants::compute(domain, GreenNormalization::unit_far_field, quad);
    ReducedOptions opts;
    opts.tolerance = cfg.reduce_tolerance;
    return solve_reduced(dim, cfg.k, consts, ball_search_box(ball), opts);
  }

  std::vector<double> dilations() const { return cfg.d.empty() ? reduce().dilations() : cfg.d; }

  TowerConfig tower(double eps, const std::vector<double>& d) const {
    return TowerConfig::make(dim, cfg.k, eps, d, {}, ball.center(), cfg.rho);
  }

  /// Reported rather than enforced: reduced roots may leave the eta box.
  bool in_eta_box(const std::vector<double>& d) const {
    return std::all_of(d.begin(), d.end(),
                       [&](double x) { return x > cfg.eta && x < 1.0 / cfg.eta; });
  }
};

std::vector<std::string> indexed(const std::string& prefix, int count) {
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

void append(std::vector<std::string>& to, const std::vector<std::string>& from) {
  to.insert(to.end(), from.begin(), from.end());
}

void append_padded(std::vector<std::string>& row, const std::vector<double>& v, int count) {
  for (int i = 0; i < count; ++i)
    row.push_back(i < static_cast<int>(v.size()) ? num(v[i]) : num(NAN));
}

// ---------------------------------------------------------------- commands

int run_constants(const Context& ctx, Report& rep) {
  const Dimension& dim = ctx.dim;
  Csv t({"quantity", "value", "error_estimate", "closed_form"});
  std::vector<QuadResult> a(4);
  for (int i = 1; i <= 4; ++i) a[i - 1] = const_a(dim, i, ctx.quad);
  const double closed[4] = {0.5 * (dim.n() - 2) * a2_closed_form(dim), a2_closed_form(dim), NAN,
                            a4_closed_form(dim)};
  for (int i = 0; i < 4; ++i)
    t.row({"a" + std::to_string(i + 1), num(a[i].value), num(a[i].error),
           num(i == 2 ? a[i].value : closed[i])});
  const Point origin(dim.n(), 0.0);
  const auto g0 = g_sigma(dim, origin, ctx.quad);
  t.row({"g0", num(g0.value), num(g0.error), num(g_zero_closed_form(dim))});
  for (int h = 0; h <= 1; ++h) {
    const auto c = gram_constant(dim, h, ctx.quad);
    t.row({"c_" + std::to_string(h), num(c.value), num(c.error), num(NAN)});
  }
  rep.csv("constants.csv", t);

  const std::vector<double> radii = {0.0, 0.25, 0.5, 1.0, 2.0};
  const auto prof = g_profile(dim, radii, ctx.quad);
  Csv g({"sigma_norm", "g"});
  for (std::size_t i = 0; i < prof.radii.size(); ++i) g.row({num(prof.radii[i]), num(prof.values[i])});
  rep.csv("g_profile.csv", g);
  const char* ext = prof.at_origin == ExtremumType::minimum   ? "minimum"
                    : prof.at_origin == ExtremumType::maximum ? "maximum"
                                                              : "none";
  rep.json_file("constants.json",
                {{"n", dim.n()},
                 {"g_extremum_at_origin", ext},
                 {"a4_closed_form_relative_gap",
                  jnum(std::abs(a[3].value - closed[3]) / std::abs(closed[3]))}});
  return 0;
}

int run_reduce(const Context& ctx, Report& rep) {
  const auto st = ctx.reduce();
  const auto d = st.dilations();
  Csv t({"i", "s", "d"});
  for (int i = 0; i < st.k; ++i) t.row({num(i + 1), num(st.s[i]), num(d[i])});
  rep.csv("reduce.csv", t);
  json brackets = json::array();
  for (const auto& b : st.bracketed_roots) brackets.push_back(jvec(b));
  json sigma = json::array();
  for (const auto& s : st.sigma) sigma.push_back(jvec(s));
  rep.json_file("reduce.json", {{"n", st.dim.n()},
                                {"k", st.k},
                                {"s", jvec(st.s)},
                                {"d", jvec(d)},
                                {"sigma", sigma},
                                {"xi", jvec(st.xi)},
                                {"G", jvec(st.g_value)},
                                {"G_inf", jnum(st.g_value.lpNorm<Eigen::Infinity>())},
                                {"jacobian_singular_values", jvec(st.singular_values)},
                                {"bracketed_roots", brackets},
                                {"newton_iterations", st.newton_iterations}});
  return 0;
}

int run_ansatz(const Context& ctx, Report& rep, const std::vector<double>& eps) {
  const int k = ctx.cfg.k;
  const auto d = ctx.dilations();
  struct Row {
    double residual;
    std::vector<double> mu, heights;
  };
  const auto rows = parallel_map(eps.size(), [&](std::size_t i) {
    const auto tc = ctx.tower(eps[i], d);
    const auto mu = tc.scales();
    const auto grid = grid_for_scale(mu.back(), ctx.ball.radius(), ctx.grid);
    const auto values = assemble_tower_radial(ctx.ball, tc, grid);
    Row r{residual_norm(ctx.ball, tc, grid), mu, {}};
    for (const auto& s : extract_scales(ctx.dim, grid, values, eps[i], k))
      r.heights.push_back(s.height);
    return r;
  });
  std::vector<std::string> header = {"eps", "residual"};
  append(header, indexed("mu_", k));
  append(header, indexed("height_", k));
  Csv t(header);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    std::vector<std::string> row = {num(eps[i]), num(rows[i].residual)};
    append_padded(row, rows[i].mu, k);
    append_padded(row, rows[i].heights, k);
    t.row(row);
  }
  rep.csv("ansatz.csv", t);
  rep.json_file("ansatz.json", {{"k", k}, {"d_bar", jvec(d)}, {"d_in_eta_box", ctx.in_eta_box(d)}});
  return 0;
}

std::vector<std::string> pde_header(int k) {
  std::vector<std::string> h = {"eps", "converged", "newton_iters", "residual"};
  append(h, indexed("mu_", k));
  append(h, indexed("d_", k));
  append(h, indexed("nodal_radius_", k - 1));
  return h;
}

std::vector<std::string> pde_row(const SweepPoint& p, int k) {
  std::vector<std::string> row = {num(p.eps), num(p.converged ? 1 : 0),
                                  num(p.newton_iterations), num(p.converged ? p.residual : NAN)};
  append_padded(row, p.mu, k);
  append_padded(row, p.d, k);
  append_padded(row, p.nodal_radii, k - 1);
  return row;
}

json point_details(const SweepPoint& p) {
  return {{"eps", p.eps},
          {"converged", p.converged},
          {"continuation_steps", p.continuation_steps},
          {"regrids", p.regrids},
          {"grid_nodes", p.grid_nodes},
          {"heights", jvec(p.heights)},
          {"error", p.error}};
}

SweepPoint point_from(double eps, const RadialSolution& sol) {
  SweepPoint p;
  p.eps = eps;
  p.converged = sol.converged;
  p.newton_iterations = sol.newton_iterations;
  p.continuation_steps = sol.continuation_steps;
  p.regrids = sol.regrids;
  p.residual = sol.residual;
  p.grid_nodes = sol.grid.size();
  for (const auto& s : sol.scales) {
    p.mu.push_back(s.mu);
    p.d.push_back(s.d);
    p.heights.push_back(s.height);
  }
  p.nodal_radii = sol.nodal_radii;
  p.solution = sol;
  return p;
}

int run_solve(const Context& ctx, Report& rep, const std::vector<double>& eps) {
  const int k = ctx.cfg.k;
  const auto d = ctx.dilations();
  const auto points = parallel_map(eps.size(), [&](std::size_t i) {
    try {
      return point_from(eps[i], solve_from_ansatz(ctx.ball, ctx.tower(eps[i], d), ctx.grid,
                                                  ctx.newton));
    } catch (const Error& e) {
      if (!e.is_numerical()) throw;
      SweepPoint p;
      p.eps = eps[i];
      p.error = e.what();
      return p;
    }
  });
  Csv t(pde_header(k));
  json details = json::array();
  bool all = true;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    t.row(pde_row(p, k));
    details.push_back(point_details(p));
    all = all && p.converged;
    if (!p.converged) continue;
    Csv prof({"r", "u"});
    for (std::size_t j = 0; j < p.solution.grid.size(); ++j)
      prof.row({num(p.solution.grid[j]), num(p.solution.values[j])});
    rep.csv("profile_" + std::to_string(i + 1) + ".csv", prof);
  }
  rep.csv("solve.csv", t);
  rep.json_file("solve.json", {{"k", k},
                                {"d_bar", jvec(d)},
                                {"d_in_eta_box", ctx.in_eta_box(d)},
                                {"points", details}});
  return all ? 0 : 2;
}

int run_ls(const Context& ctx, Report& rep, const std::vector<double>& eps,
           const std::vector<double>& d) {
  const int k = ctx.cfg.k;
  LsOptions opts;
  opts.tolerance = ctx.cfg.ls_tolerance;
  opts.max_iterations = ctx.cfg.ls_max_iterations;
  struct Row {
    bool ok = false;
    LsResult res;
    std::string error;
  };
  const auto rows = parallel_map(eps.size(), [&](std::size_t i) {
    Row r;
    const auto tc = ctx.tower(eps[i], d);
    const auto grid = grid_for_scale(tc.scales().back(), ctx.ball.radius(), ctx.grid);
    try {
      r.res = ls_correction(ctx.ball, grid, tc, opts);
      r.ok = true;
    } catch (const Error& e) {
      if (!e.is_numerical()) throw;
      r.error = e.what();
    }
    return r;
  });
  std::vector<std::string> header = {"eps",      "converged",  "iterations",
                                     "update_ratio", "phi_norm", "orthogonality_max"};
  append(header, indexed("c_", k));
  Csv t(header);
  bool all = true;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const auto& r = rows[i];
    all = all && r.ok;
    const double orth = r.ok && !r.res.orthogonality.empty()
                            ? *std::max_element(r.res.orthogonality.begin(),
                                                r.res.orthogonality.end())
                            : NAN;
    std::vector<std::string> row = {num(eps[i]),
                                    num(r.ok ? 1 : 0),
                                    num(r.ok ? r.res.iterations : 0),
                                    num(r.ok ? r.res.update_ratio : NAN),
                                    num(r.ok ? r.res.phi_norm : NAN),
                                    num(orth)};
    append_padded(row, r.ok ? r.res.c : std::vector<double>{}, k);
    t.row(row);
  }
  rep.csv("ls.csv", t);
  return all ? 0 : 2;
}

int run_sweep(const Context& ctx, Report& rep, const std::vector<double>& eps) {
  const int k = ctx.cfg.k;
  const auto d = ctx.dilations();
  SweepOptions opts;
  opts.mode = ctx.cfg.sweep_mode == "cold" ? StartMode::cold : StartMode::warm;
  opts.grid = ctx.grid;
  opts.newton = ctx.newton;
  opts.rho = ctx.cfg.rho;
  const auto report = sweep_epsilon(ctx.ball, k, eps, d, opts);
  Csv t(pde_header(k));
  json details = json::array();
  bool all = true;
  for (const auto& p : report.points) {
    t.row(pde_row(p, k));
    details.push_back(point_details(p));
    all = all && p.converged;
  }
  rep.csv("sweep.csv", t);
  rep.json_file("sweep.json", {{"k", k},
                               {"mode", ctx.cfg.sweep_mode},
                               {"d_bar", jvec(d)},
                               {"d_in_eta_box", ctx.in_eta_box(d)},
                               {"eps0_proxy", report.eps0_proxy},
                               {"points", details}});
  int code = all ? 0 : 2;
  if (ctx.cfg.ls_enabled) code = std::max(code, run_ls(ctx, rep, eps, d));
  return code;
}

void add_check(Csv& t, json& summary, const OrderCheck& c) {
  for (const auto& s : c.samples)
    t.row({c.name, c.sweep_variable, num(s.sweep_var), num(s.measured), num(s.scaled),
           num(c.predicted), num(c.fit.exponent), std::string(verdict_name(c.verdict))});
  summary.push_back({{"name", c.name},
                     {"sweep_variable", c.sweep_variable},
                     {"predicted_exponent", jnum(c.predicted)},
                     {"lower_bound", c.lower_bound},
                     {"tolerance", c.tolerance},
                     {"fitted_exponent", jnum(c.fit.exponent)},
                     {"fit_width", jnum(c.fit.width)},
                     {"fitted_without_largest", jnum(c.fit_drop_largest)},
                     {"verdict", std::string(verdict_name(c.verdict))},
                     {"note", c.note}});
}

Csv verify_table() {
  return Csv({"check", "sweep_variable", "sweep_var", "measured", "scaled", "predicted_exponent",
              "fitted_exponent", "verdict"});
}

int run_verify(const Context& ctx, Report& rep) {
  const int n = ctx.dim.n();
  const int k = ctx.cfg.k;
  LabOptions opts;
  opts.eps = expand_eps(ctx.cfg.verify_eps);
  opts.quad_tolerance = ctx.cfg.quad_tolerance;
  const auto d = ctx.dilations();
  json summary = json::object();

  Csv norms = verify_table();
  json norm_summary = json::array();
  const double q_max = 2.0 * n / (n - 2.0);
  for (NormTarget target : {NormTarget::U, NormTarget::psi0, NormTarget::psih}) {
    const double crit = target == NormTarget::psih ? n / (n - 1.0) : n / (n - 2.0);
    std::vector<double> qs = {0.5 * crit, crit, 2.0, q_max};
    std::sort(qs.begin(), qs.end());
    qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
    for (double q : qs) add_check(norms, norm_summary, verify_norm_scaling(ctx.dim, target, q, opts));
  }
  rep.csv("verify_norm_scaling.csv", norms);
  summary["norm_scaling"] = norm_summary;

  Csv inter = verify_table();
  json inter_summary = json::array();
  for (auto c : {InteractionCase::sumbu2, InteractionCase::fepli1, InteractionCase::fepli2})
    add_check(inter, inter_summary, verify_nonlinear_interactions(ctx.dim, k, c, d, opts));
  rep.csv("verify_interactions.csv", inter);
  summary["interactions"] = inter_summary;

  Csv proj = verify_table();
  json proj_summary = json::array();
  const auto pg = verify_projection_and_gram(ctx.dim, k, d, opts);
  for (const auto& c : pg.checks) add_check(proj, proj_summary, c);
  rep.csv("verify_projection_gram.csv", proj);
  summary["projection_gram"] = proj_summary;
  summary["gram_diagonal_change"] = jnum(pg.diagonal_change);
  summary["gram_diagonal_verdict"] = std::string(verdict_name(pg.diagonal_verdict));
  summary["d_bar"] = jvec(d);
  summary["d_in_eta_box"] = ctx.in_eta_box(d);
  rep.json_file("verify.json", summary);
  return 0;
}

json error_json(const std::string& kind, const std::string& message, int code,
                const std::vector<double>& trace = {}) {
  return {{"exit_code", code}, {"kind", kind}, {"message", message}, {"trace", jvec(trace)}};
}

void write_manifest(Report& rep, const RunConfig& cfg, const std::string& status, int code) {
  json files = json::object();
  for (const auto& name : rep.files()) {
    const fs::path path = rep.dir() / name;
    files[name] = {{"bytes", fs::file_size(path)}, {"sha256", sha256_hex(path)}};
  }
  json config = json::object();
  for (const auto& [key, value] : config_pairs(cfg)) config[key] = value;
  json versions = {{"bubbletower", kVersion},
                   {"boost", BOOST_LIB_VERSION},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"compiler", __VERSION__}};
  const fs::path path = rep.dir() / "manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << json{{"command", cfg.cmd},
              {"config", config},
              {"files", files},
              {"status", status},
              {"exit_code", code},
              {"versions", versions}}
             .dump(2)
      << "\n";
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"constants", "reduce", "ansatz",
                                                 "solve",     "sweep",  "verify"};
  return names;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::pair<std::string, std::string>> config_pairs(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : keys()) out.emplace_back(k.name, k.get(cfg));
  return out;
}

std::string print_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [key, value] : config_pairs(cfg)) out += key + "=" + value + "\n";
  return out;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& k : keys())
    if (k.name == key) return k.set(cfg, value);
  fail(ErrorKind::config, "unknown config key '" + key + "'");
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string s = trim(line);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::config, "config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(std::string_view(s).substr(0, eq));
    if (key.empty())
      fail(ErrorKind::config, "config line " + std::to_string(lineno) + ": empty key");
    RunConfig probe;
    set_config_value(probe, key, trim(std::string_view(s).substr(eq + 1)));
    if (!out.emplace(key, trim(std::string_view(s).substr(eq + 1))).second)
      fail(ErrorKind::config, "duplicate config key '" + key + "'");
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::config, "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::vector<double> expand_eps(const std::string& spec) {
  const std::string s = trim(spec);
  require(!s.empty(), ErrorKind::validation, "eps: empty specification");
  if (s.find(':') == std::string::npos) {
    auto v = parse_list("eps", s);
    require(!v.empty(), ErrorKind::validation, "eps: empty specification");
    return v;
  }
  const auto parts = split(s, ':');
  require(parts.size() == 3 || parts.size() == 4, ErrorKind::validation,
          "eps range must read start:stop:geometric[:count] or start:stop:linear:count");
  const double a = parse_double("eps", parts[0]);
  const double b = parse_double("eps", parts[1]);
  const std::string& kind = parts[2];
  int count = 0;
  if (parts.size() == 4) count = parse_int("eps", parts[3]);
  if (kind == "geometric") {
    require(a > 0.0 && b > 0.0, ErrorKind::validation, "eps: geometric range needs positive ends");
    if (count == 0) count = std::max(2, static_cast<int>(std::lround(std::log2(std::max(a, b) /
                                                                          std::min(a, b)))) + 1);
  } else if (kind == "linear") {
    require(parts.size() == 4, ErrorKind::validation, "eps: linear range needs a count");
  } else {
    fail(ErrorKind::validation, "eps: unknown range kind '" + kind + "'");
  }
  require(count >= 2, ErrorKind::validation, "eps: range needs at least two points");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / (count - 1);
    out[i] = kind == "geometric" ? a * std::pow(b / a, f) : a + (b - a) * f;
  }
  out.front() = a;
  out.back() = b;
  return out;
}

void validate_config(RunConfig& cfg) {
  const auto& names = command_names();
  require(std::find(names.begin(), names.end(), cfg.cmd) != names.end(), ErrorKind::validation,
          "cmd must be one of constants, reduce, ansatz, solve, sweep, verify (got '" + cfg.cmd +
              "')");
  require(cfg.n >= 3, ErrorKind::validation,
          "n must be >= 3 (got " + std::to_string(cfg.n) + ")");
  require(cfg.k >= 1, ErrorKind::validation,
          "k must be >= 1 (got " + std::to_string(cfg.k) + ")");
  require(cfg.center.empty() || static_cast<int>(cfg.center.size()) == cfg.n,
          ErrorKind::validation, "domain.center must have n coordinates");
  require(cfg.radius > 0.0, ErrorKind::validation, "domain.radius must be positive");
  for (double e : expand_eps(cfg.eps))
    require(e > 0.0 && e < 1.0, ErrorKind::validation,
            "eps values must lie in (0, 1) (got " + format_double(e) + ")");
  if (cfg.cmd != "constants" && cfg.cmd != "reduce")
    for (double e : expand_eps(cfg.eps))
      require(e < std::exp(-1.0), ErrorKind::validation,
              "eps values must lie below 1/e for the scale schedule (got " + format_double(e) +
                  ")");
  for (double e : expand_eps(cfg.verify_eps))
    require(e > 0.0 && e < std::exp(-1.0), ErrorKind::validation,
            "verify.eps values must lie in (0, 1/e)");
  require(cfg.eta > 0.0 && cfg.eta < 1.0, ErrorKind::validation, "eta must lie in (0, 1)");
  if (cfg.rho == 0.0) cfg.rho = 0.5 * cfg.radius;
  require(cfg.rho > 0.0 && cfg.rho < cfg.radius, ErrorKind::validation,
          "rho must lie in (0, domain.radius)");
  require(cfg.d.empty() || static_cast<int>(cfg.d.size()) == cfg.k, ErrorKind::validation,
          "d must list k dilations");
  for (double x : cfg.d) require(x > 0.0, ErrorKind::validation, "d entries must be positive");
  require(cfg.grid_nodes_per_decade >= 10, ErrorKind::validation,
          "grid.nodes_per_decade must be >= 10");
  require(cfg.grid_r_min_factor > 0.0 && cfg.grid_r_min_factor < 1.0, ErrorKind::validation,
          "grid.r_min_factor must lie in (0, 1)");
  require(cfg.grid_max_regrids >= 0, ErrorKind::validation, "grid.max_regrids must be >= 0");
  require(cfg.quad_tolerance > 0.0 && cfg.quad_tolerance <= 1e-3, ErrorKind::validation,
          "quad.tolerance must lie in (0, 1e-3]");
  require(cfg.quad_radial_panels >= 1, ErrorKind::validation, "quad.radial_panels must be >= 1");
  require(cfg.quad_spherical_order >= 2, ErrorKind::validation,
          "quad.spherical_order must be >= 2");
  require(cfg.quad_truncation_radius > 1.0, ErrorKind::validation,
          "quad.truncation_radius must exceed 1");
  require(cfg.newton_rel_tol > 0.0 && cfg.newton_abs_tol >= 0.0, ErrorKind::validation,
          "newton tolerances must be positive");
  require(cfg.newton_max_iterations >= 1 && cfg.newton_max_continuation_steps >= 0,
          ErrorKind::validation, "newton iteration limits must be positive");
  require(cfg.reduce_tolerance > 0.0, ErrorKind::validation, "reduce.tolerance must be positive");
  require(cfg.sweep_mode == "warm" || cfg.sweep_mode == "cold", ErrorKind::validation,
          "sweep.mode must be warm or cold");
  require(cfg.ls_tolerance > 0.0 && cfg.ls_max_iterations >= 1, ErrorKind::validation,
          "ls tolerance and iteration limit must be positive");
  require(!cfg.output.empty(), ErrorKind::validation, "output must name a directory");
}

RunConfig parse_config(const std::map<std::string, std::string>& entries) {
  RunConfig cfg;
  for (const auto& [key, value] : entries) set_config_value(cfg, key, value);
  validate_config(cfg);
  return cfg;
}

fs::path output_directory(const RunConfig& cfg) {
  const char* env = std::getenv("BUBBLETOWER_OUT");
  return env && *env ? fs::path(env) : fs::path(cfg.output);
}

std::string sha256_hex(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    fail(ErrorKind::io, "sha256 initialisation failed");
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0)
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::ostringstream hex;
  for (unsigned i = 0; i < len; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

int execute(const RunConfig& input, std::ostream& log) {
  RunConfig cfg = input;
  const fs::path dir = output_directory(cfg);
  try {
    validate_config(cfg);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
      fail(ErrorKind::io, "output directory not writable: " + dir.string());
  } catch (const Error& e) {
    log << "error (" << kind_name(e.kind()) << "): " << e.what() << "\n";
    return 1;
  }

  Report rep(dir);
  std::error_code ec;
  fs::remove(dir / "error.json", ec);
  int code = 0;
  std::string status = "ok";
  try {
    const Context ctx(cfg);
    const auto eps = expand_eps(cfg.eps);
    if (cfg.cmd == "constants") code = run_constants(ctx, rep);
    else if (cfg.cmd == "reduce") code = run_reduce(ctx, rep);
    else if (cfg.cmd == "ansatz") code = run_ansatz(ctx, rep, eps);
    else if (cfg.cmd == "solve") code = run_solve(ctx, rep, eps);
    else if (cfg.cmd == "sweep") code = run_sweep(ctx, rep, eps);
    else code = run_verify(ctx, rep);
    if (code != 0) {
      status = "partial";
      rep.json_file("error.json", error_json("partial", "some points did not converge", code));
      log << "partial results: some points did not converge\n";
    }
  } catch (const SolverError& e) {
    code = 2;
    status = "error";
    rep.json_file("error.json", error_json(std::string(kind_name(e.kind())), e.what(), code,
                                           e.trace()));
    log << "error (" << kind_name(e.kind()) << "): " << e.what() << "\n";
  } catch (const Error& e) {
    code = e.is_numerical() ? 2 : 1;
    status = "error";
    rep.json_file("error.json", error_json(std::string(kind_name(e.kind())), e.what(), code));
    log << "error (" << kind_name(e.kind()) << "): " << e.what() << "\n";
  } catch (const std::exception& e) {
    code = 2;
    status = "error";
    rep.json_file("error.json", error_json("internal", e.what(), code));
    log << "error: " << e.what() << "\n";
  }
  try {
    write_manifest(rep, cfg, status, code);
  } catch (const Error& e) {
    log << "error (" << kind_name(e.kind()) << "): " << e.what() << "\n";
    return code == 0 ? 1 : code;
  }
  log << "wrote " << rep.files().size() + 1 << " files to " << dir.string() << "\n";
  return code;
}

}  // namespace bubbletower
