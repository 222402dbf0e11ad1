#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bubbletower/asymptotics_lab.hpp"
#include "bubbletower/errors.hpp"

using namespace bubbletower;

namespace {
const std::vector<double> kD2 = {0.34543744786032103, 0.026626362914555873};
}

TEST_CASE("three-valued verdicts") {
  CHECK(judge(1.05, 1.0, 0.1) == Verdict::pass);
  CHECK(judge(1.15, 1.0, 0.1) == Verdict::marginal);
  CHECK(judge(1.25, 1.0, 0.1) == Verdict::fail);
  CHECK(judge(NAN, 1.0, 0.1) == Verdict::fail);
  CHECK(judge_at_least(5.0, 2.5, 0.2) == Verdict::pass);
  CHECK(judge_at_least(2.2, 2.5, 0.2) == Verdict::marginal);
  CHECK(judge_at_least(1.0, 2.5, 0.2) == Verdict::fail);
  CHECK(verdict_name(Verdict::marginal) == "marginal");
}

TEST_CASE("default sweep and coordinate moments") {
  const auto eps = default_lab_eps();
  REQUIRE(eps.size() == 8);
  CHECK(eps.front() == 0.125);
  CHECK(eps.back() == std::ldexp(1.0, -10));
  CHECK(coordinate_moment(Dimension(3), 2.0) == doctest::Approx(1.0 / 3.0));
  CHECK(coordinate_moment(Dimension(5), 2.0) == doctest::Approx(1.0 / 5.0));
  CHECK(coordinate_moment(Dimension(3), 0.0) == doctest::Approx(1.0));
  // E|theta_1|^4 = 3 / (n (n + 2))
  CHECK(coordinate_moment(Dimension(4), 4.0) == doctest::Approx(3.0 / 24.0));
}

TEST_CASE("norm scaling in n = 3 across the regimes") {
  const Dimension dim(3);
  struct Case {
    NormTarget target;
    double q, predicted;
  };
  for (const auto& c : {Case{NormTarget::U, 2.0, 1.0}, Case{NormTarget::U, 6.0, 0.0},
                        Case{NormTarget::psi0, 6.0, 0.0}, Case{NormTarget::psi0, 3.0, 1.5},
                        Case{NormTarget::psih, 2.0, 2.0}, Case{NormTarget::psih, 1.0, 1.5}}) {
    const auto chk = verify_norm_scaling(dim, c.target, c.q);
    CHECK(chk.predicted == doctest::Approx(c.predicted));
    CHECK(chk.verdict == Verdict::pass);
    CHECK(std::abs(chk.fit.exponent - chk.fit_drop_largest) < 0.05);
    CHECK(chk.samples.size() == 8);
  }
  CHECK_THROWS_AS(verify_norm_scaling(dim, NormTarget::U, 7.0), Error);
}

TEST_CASE("norm scaling in n = 4 and 5") {
  for (int n : {4, 5}) {
    const Dimension dim(n);
    const double q_max = 2.0 * n / (n - 2.0);
    const auto a = verify_norm_scaling(dim, NormTarget::U, 1.0);
    CHECK(a.predicted == doctest::Approx(0.5));
    CHECK(a.verdict == Verdict::pass);
    const auto b = verify_norm_scaling(dim, NormTarget::psi0, q_max);
    CHECK(b.predicted == doctest::Approx(0.0).scale(1.0));
    CHECK(b.verdict == Verdict::pass);
  }
}

TEST_CASE("nonlinear interactions") {
  const Dimension dim(3);
  const std::vector<double> d1 = {kD2[0]};
  const auto single = verify_nonlinear_interactions(dim, 1, InteractionCase::sumbu2, d1);
  CHECK(single.verdict == Verdict::pass);
  for (const auto& s : single.samples) CHECK(s.measured == 0.0);
  for (int k : {1, 2}) {
    const auto& d = k == 1 ? d1 : kD2;
    const auto f2 = verify_nonlinear_interactions(dim, k, InteractionCase::fepli2, d);
    CHECK(f2.verdict != Verdict::fail);
    CHECK(f2.sweep_variable == "eps");
  }
  const auto s2 = verify_nonlinear_interactions(dim, 2, InteractionCase::sumbu2, kD2);
  CHECK(s2.sweep_variable == "t");
  CHECK(s2.verdict == Verdict::pass);
  CHECK_THROWS_AS(verify_nonlinear_interactions(dim, 2, InteractionCase::fepli1, d1), Error);
}

TEST_CASE("projection and gram report") {
  const Dimension dim(3);
  const auto rep = verify_projection_and_gram(dim, 2, kD2);
  REQUIRE(rep.checks.size() == 5);
  CHECK(rep.checks[0].fit.exponent == doctest::Approx(0.5).epsilon(0.02));
  CHECK(rep.checks[0].verdict == Verdict::pass);
  CHECK(rep.checks[1].verdict == Verdict::pass);
  CHECK(rep.checks[2].verdict == Verdict::pass);
  CHECK(rep.checks[2].fit.exponent >= 2.5 - 0.2);
  CHECK(rep.checks[3].name == "gram translation (1,2)");
  CHECK(rep.checks[3].verdict == Verdict::pass);
  CHECK(rep.diagonal_verdict == Verdict::pass);
  CHECK(rep.diagonal_change < 0.02);
  CHECK(rep.last_gram.rows() == 8);
}
