#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "nlbif/hypotheses.hpp"

using namespace nlbif;
using Catch::Matchers::WithinRel;

namespace {
const GridParams grid{200.0, 400, 100.0};
}

TEST_CASE("analytic instance: everything passes, Q2 relaxed", "[hypotheses]") {
  const Discretization d(make_analytic_instance(), grid);
  const HypothesisReport rep = validate_hypotheses(d);
  for (const char* name : {"f1", "f2", "K0", "Q1", "K1", "q_exponent"}) {
    INFO(name);
    CHECK(rep.at(name).status == HypothesisStatus::pass);
  }
  CHECK(rep.at("Q2").status == HypothesisStatus::relaxed);
  CHECK(rep.acceptable());
  // M = |P|_1^{1/2} for q2 = P^{1/2}, gamma = 1; |P|_1 = pi^2 less the 4 pi / R_max tail
  CHECK_THAT(rep.bound_M, WithinRel(std::sqrt(d.p_mass()), 1e-12));
  CHECK_THAT(rep.bound_M, WithinRel(std::sqrt(std::numbers::pi * std::numbers::pi - 4.0 * std::numbers::pi / 200.0), 1e-3));
}

TEST_CASE("f = 2P fails domination", "[hypotheses]") {
  ProblemSpec spec = make_analytic_instance();
  spec.f = GrowthRate{RadialFunction::builtin("inv_quad_sq").scaled(2.0), 3.0};
  const Discretization d(spec, grid);
  const HypothesisReport rep = validate_hypotheses(d);
  CHECK(rep.at("f1").status == HypothesisStatus::fail);
  CHECK_THAT(rep.at("f1").measured, WithinRel(2.0, 1e-12));
  CHECK_FALSE(rep.acceptable());
}

TEST_CASE("q must exceed N/2", "[hypotheses]") {
  ProblemSpec spec = make_analytic_instance();
  spec.f.q = 1.0;
  const HypothesisReport rep = validate_hypotheses(Discretization(spec, grid));
  CHECK(rep.at("q_exponent").status == HypothesisStatus::fail);
}

TEST_CASE("Gaussian convolution: M = |g|_2 and Q2 decays", "[hypotheses]") {
  const Discretization d(make_gaussian_instance(), grid);
  const HypothesisReport rep = validate_hypotheses(d);
  CHECK(rep.at("Q1").status == HypothesisStatus::pass);
  CHECK_THAT(rep.bound_M, WithinRel(std::pow(std::numbers::pi / 2.0, 0.75), 1e-4));
  CHECK(rep.at("Q2").status == HypothesisStatus::pass);
  CHECK(rep.at("K0").status == HypothesisStatus::pass);
  CHECK(rep.acceptable());
}

TEST_CASE("sphere fraction inside a ball", "[hypotheses]") {
  CHECK(sphere_fraction_in_ball(1.0, 10.0, 2.0, 3) == 0.0);
  CHECK(sphere_fraction_in_ball(1.0, 0.5, 2.0, 3) == 1.0);
  // N = 3: the fraction is linear in the cap height
  const double s = 2.0, c = 2.0, rho = 2.0;
  const double t0 = (s * s + c * c - rho * rho) / (2.0 * s * c);
  CHECK_THAT(sphere_fraction_in_ball(s, c, rho, 3), WithinRel(0.5 * (1.0 - t0), 1e-12));
}
