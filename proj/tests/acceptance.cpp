// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "bubbletower/asymptotics_lab.hpp"
#include "bubbletower/cli_runner.hpp"
#include "bubbletower/constants.hpp"
#include "bubbletower/errors.hpp"
#include "bubbletower/radial_pde.hpp"
#include "bubbletower/reduced_system.hpp"

using namespace bubbletower;
namespace fs = std::filesystem;

namespace {

constexpr double kConstRelTol = 1e-6;
constexpr double kConstSeconds = 60.0;
constexpr double kProjDenseRelTol = 1e-3;
constexpr double kProjSlopeSlack = 0.2;
constexpr double kReducedTol = 1e-10;
constexpr double kReducedSeconds = 60.0;
constexpr double kMuExponent = 1.0;
constexpr double kMuExponentRelTol = 0.10;
constexpr double kMuFitMinDecades = 1.5;
constexpr double kPdeSeconds = 300.0;
constexpr int kTowerConsecutive = 4;
constexpr double kDilationFactor = 2.0;
constexpr double kLsRatio = 0.95;
constexpr double kLsOrthogonality = 1e-10;
constexpr double kNormTol = 0.2;
constexpr double kLabSeconds = 600.0;

const std::vector<double> kSweep = {0.2, 0.14, 0.1, 0.07, 0.05, 0.035, 0.025};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

ReducedState reduced_root(int n, int k) {
  const Dimension dim(n);
  auto ball = std::make_shared<BallDomain>(dim);
  const auto consts = ReducedConstants::compute(ball, GreenNormalization::unit_far_field);
  return solve_reduced(dim, k, consts, ball_search_box(*ball));
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_a2 = 0.0, worst_a4 = 0.0;
  int worst_n = 0;
  for (int n = 3; n <= 6; ++n) {
    const Dimension dim(n);
    worst_a2 = std::max(worst_a2, rel(const_a(dim, 2).value, a2_closed_form(dim)));
    const double g = rel(const_a(dim, 4).value, a4_closed_form(dim));
    if (g > worst_a4) {
      worst_a4 = g;
      worst_n = n;
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = worst_a2 < kConstRelTol && worst_a4 < kConstRelTol && secs < kConstSeconds;
  o.detail = "a2 max rel err " + fmt("%.2e", worst_a2) + ", a4 max rel gap to closed form " +
             fmt("%.3e", worst_a4) + " (n=" + std::to_string(worst_n) + "), " +
             fmt("%.1f s", secs);
  return o;
}

Outcome criterion2() {
  double worst = 0.0;
  for (int n = 3; n <= 5; ++n) {
    const Dimension dim(n);
    worst = std::max(worst, rel(const_a(dim, 1).value, 0.5 * (n - 2) * const_a(dim, 2).value));
  }
  return {worst < kConstRelTol, "max rel err " + fmt("%.2e", worst)};
}

Outcome criterion3() {
  // dense finite-volume Dirichlet solve of -Delta w = f_0(U_mu)
  double dense_err = 0.0, ratio = INFINITY, worst_slope = INFINITY;
  for (int n = 3; n <= 6; ++n) {
    const Dimension dim(n);
    const double mu = 0.05;
    std::vector<double> errs;
    for (int npd : {80, 160}) {
      const auto grid = RadialGrid::geometric(1e-3 * mu, npd);
      const RadialOperator op(dim, grid);
      std::vector<double> rhs(op.unknowns());
      for (std::size_t i = 0; i < rhs.size(); ++i)
        rhs[i] = op.volumes()[i] * f_zero(dim, bubble_radial(dim, mu, grid[i]));
      const auto w = op.stiffness_matrix().solve(rhs);
      double e = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i)
        e = std::max(e, std::abs(w[i] - projected_bubble_radial(dim, mu, 1.0, grid[i])));
      errs.push_back(e / bubble_radial(dim, mu, 0.0));
    }
    dense_err = std::max(dense_err, errs[1]);
    ratio = std::min(ratio, errs[0] / errs[1]);
    LabOptions lab;
    const std::vector<double> d = {0.5};
    const auto rep = verify_projection_and_gram(dim, 1, d, lab);
    for (const auto& c : rep.checks)
      if (c.sweep_variable == "mu")
        worst_slope = std::min(worst_slope, c.fit.exponent - (n + 2.0) / 2.0);
  }
  Outcome o;
  o.pass = dense_err < kProjDenseRelTol && ratio > 3.0 && worst_slope >= -kProjSlopeSlack;
  o.detail = "dense solve rel err " + fmt("%.2e", dense_err) + " (refinement ratio " +
             fmt("%.2f", ratio) + "), asymptotic slope minus (n+2)/2 >= " +
             fmt("%.3f", worst_slope);
  return o;
}

Outcome criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  double worst_g = 0.0, min_sv = INFINITY;
  for (int n : {3, 4})
    for (int k : {1, 2}) {
      const auto st = reduced_root(n, k);
      worst_g = std::max(worst_g, st.g_value.lpNorm<Eigen::Infinity>());
      min_sv = std::min(min_sv, st.singular_values.minCoeff());
      for (const auto& b : st.bracketed_roots) ok = ok && !b.empty();
    }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = ok && worst_g < kReducedTol && min_sv > 0.0 && secs < kReducedSeconds;
  o.detail = "max |G| " + fmt("%.2e", worst_g) + ", min singular value " + fmt("%.3e", min_sv) +
             ", sign changes " + (ok ? "found" : "missing") + ", " + fmt("%.1f s", secs);
  return o;
}

struct PdeSweeps {
  SweepReport k1;
  SweepReport k2;
  std::vector<double> d1, d2;
  double seconds_k1 = 0.0;
};

Outcome criterion5(const PdeSweeps& s) {
  int converged = 0;
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : s.k1.points)
    if (p.converged) {
      ++converged;
      pts.emplace_back(schedule_parameter(p.eps), p.mu[0]);
    }
  Outcome o;
  double slope = NAN;
  if (converged == static_cast<int>(kSweep.size())) {
    FitOptions fo;
    fo.min_decades = kMuFitMinDecades;
    slope = fit_asymptotic_order(pts, fo).exponent;
  }
  o.pass = converged == static_cast<int>(kSweep.size()) &&
           std::abs(slope - kMuExponent) <= kMuExponentRelTol * kMuExponent &&
           s.seconds_k1 < kPdeSeconds;
  o.detail = std::to_string(converged) + "/" + std::to_string(kSweep.size()) +
             " converged from the ansatz, mu_1 exponent " + fmt("%.3f", slope) + " (target 1 +- 10%), " +
             fmt("%.1f s", s.seconds_k1);
  return o;
}

Outcome criterion6(const PdeSweeps& s) {
  int run = 0, best = 0, structural_run = 0, best_structural = 0;
  double worst_d1 = 0.0, worst_d2 = 0.0;
  for (const auto& p : s.k2.points) {
    const bool structure = p.converged && p.nodal_radii.size() == 1 && p.heights.size() == 2 &&
                           p.heights[0] < 0.0 && p.heights[1] > 0.0;
    bool dil = false;
    if (structure) {
      const double f1 = std::max(p.d[0] / s.d2[0], s.d2[0] / p.d[0]);
      const double f2 = std::max(p.d[1] / s.d2[1], s.d2[1] / p.d[1]);
      worst_d1 = std::max(worst_d1, f1);
      worst_d2 = std::max(worst_d2, f2);
      dil = f1 <= kDilationFactor && f2 <= kDilationFactor;
    }
    structural_run = structure ? structural_run + 1 : 0;
    best_structural = std::max(best_structural, structural_run);
    run = structure && dil ? run + 1 : 0;
    best = std::max(best, run);
  }
  Outcome o;
  o.pass = best >= kTowerConsecutive;
  o.detail = "longest run " + std::to_string(best) + " (structure alone " +
             std::to_string(best_structural) + "), worst d_1 factor " + fmt("%.2f", worst_d1) +
             ", worst d_2 factor " + fmt("%.1f", worst_d2);
  return o;
}

struct LsSummary {
  bool pass = true;
  std::string detail;
};

LsSummary ls_sweep(int k, const std::vector<double>& d) {
  const Dimension dim(3);
  const BallDomain ball(dim);
  LsSummary out;
  double prev = INFINITY, worst_ratio = 0.0, worst_orth = 0.0;
  int failures = 0;
  bool decreasing = true;
  for (double eps : kSweep) {
    const auto cfg = TowerConfig::make(dim, k, eps, d, {}, ball.center(), 0.5);
    const auto grid = grid_for_scale(cfg.scales().back(), 1.0, GridOptions{});
    try {
      const auto ls = ls_correction(ball, grid, cfg);
      worst_ratio = std::max(worst_ratio, ls.update_ratio);
      for (double x : ls.orthogonality) worst_orth = std::max(worst_orth, x);
      decreasing = decreasing && ls.phi_norm < prev;
      prev = ls.phi_norm;
    } catch (const Error& e) {
      ++failures;
      prev = INFINITY;
    }
  }
  out.pass = failures == 0 && worst_ratio < kLsRatio && worst_orth < kLsOrthogonality && decreasing;
  out.detail = "k=" + std::to_string(k) + ": " + std::to_string(kSweep.size() - failures) + "/" +
               std::to_string(kSweep.size()) + " converged, max ratio " +
               fmt("%.3f", worst_ratio) + ", max orthogonality " + fmt("%.1e", worst_orth) +
               ", |phi| " + (decreasing ? "decreasing" : "not decreasing");
  return out;
}

Outcome criterion7(const PdeSweeps& s) {
  const auto a = ls_sweep(1, s.d1);
  const auto b = ls_sweep(2, s.d2);
  return {a.pass, a.detail + "; " + b.detail + " (informational)"};
}

Outcome criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  const Dimension dim(3);
  std::string detail;
  bool ok = true;
  struct Case {
    NormTarget t;
    double q;
  };
  for (const auto& c : {Case{NormTarget::U, 2.0}, Case{NormTarget::psi0, 6.0},
                        Case{NormTarget::psih, 2.0}}) {
    const auto chk = verify_norm_scaling(dim, c.t, c.q);
    const bool pass = std::abs(chk.fit.exponent - chk.predicted) <= kNormTol;
    ok = ok && pass;
    detail += chk.name + " " + fmt("%.3f", chk.fit.exponent) + "/" + fmt("%.3f", chk.predicted) +
              ", ";
  }
  const auto d1 = reduced_root(3, 1).dilations();
  const auto d2 = reduced_root(3, 2).dilations();
  for (int k : {1, 2}) {
    const auto chk =
        verify_nonlinear_interactions(dim, k, InteractionCase::fepli2, k == 1 ? d1 : d2);
    ok = ok && chk.verdict != Verdict::fail;
    detail += chk.name + " " + fmt("%.3f", chk.fit.exponent) + " " +
              std::string(verdict_name(chk.verdict)) + ", ";
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < kLabSeconds;
  return {ok, detail + fmt("%.1f s", secs)};
}

Outcome criterion9() {
  const fs::path base = fs::temp_directory_path() / "bubbletower_acceptance_det";
  fs::remove_all(base);
  RunConfig cfg;
  cfg.cmd = "sweep";
  cfg.k = 1;
  cfg.eps = "0.2:0.05:geometric:5";
  cfg.ls_enabled = true;
  std::vector<std::string> first, second;
  std::ostringstream log;
  bool ok = true;
  std::size_t compared = 0;
  for (const char* run : {"a", "b"}) {
    cfg.output = (base / run).string();
    ok = ok && execute(cfg, log) == 0;
  }
  for (const auto& entry : fs::directory_iterator(base / "a")) {
    if (entry.path().extension() != ".csv") continue;
    auto read = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::ostringstream s;
      s << in.rdbuf();
      return s.str();
    };
    const auto other = base / "b" / entry.path().filename();
    ok = ok && fs::exists(other) && read(entry.path()) == read(other);
    ++compared;
  }
  ok = ok && compared > 0;
  return {ok, std::to_string(compared) + " CSV files compared byte for byte"};
}

}  // namespace

int main() {
  bool all = true;
  auto report = [&](int id, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::printf("criterion %d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  };
  report(1, criterion1);
  report(2, criterion2);
  report(3, criterion3);
  report(4, criterion4);

  PdeSweeps sweeps;
  try {
    sweeps.d1 = reduced_root(3, 1).dilations();
    sweeps.d2 = reduced_root(3, 2).dilations();
    const BallDomain ball{Dimension(3)};
    SweepOptions cold;
    cold.mode = StartMode::cold;
    const auto t0 = std::chrono::steady_clock::now();
    sweeps.k1 = sweep_epsilon(ball, 1, kSweep, sweeps.d1, cold);
    sweeps.seconds_k1 = seconds_since(t0);
    sweeps.k2 = sweep_epsilon(ball, 2, kSweep, sweeps.d2, SweepOptions{});
  } catch (const std::exception& e) {
    std::printf("sweep setup failed: %s\n", e.what());
  }
  report(5, [&] { return criterion5(sweeps); });
  report(6, [&] { return criterion6(sweeps); });
  report(7, [&] { return criterion7(sweeps); });
  report(8, criterion8);
  report(9, criterion9);
  return all ? 0 : 1;
}
