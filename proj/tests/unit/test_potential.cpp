#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "nlbif/discretization.hpp"
#include "nlbif/potential.hpp"

using namespace nlbif;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
std::shared_ptr<const RadialGrid> grid(int M = 2000, double R = 200.0) {
  return std::make_shared<const RadialGrid>(build_grid(3, R, M, 100.0));
}
}  // namespace

TEST_CASE("zero source", "[potential]") {
  const auto g = grid(200);
  const PotentialResult res = radial_potential(Field::zeros(g));
  CHECK(res.u.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(res.decay_constant == 0.0);
  CHECK_FALSE(res.tail_warning);
  CHECK(check_monotone_positive(res, Field::zeros(g)) == std::optional<bool>(false));
}

TEST_CASE("potential of e^{-r}", "[potential]") {
  const auto g = grid();
  const Field F = Field::sample(g, RadialFunction::builtin("exp"));
  const PotentialResult res = radial_potential(F);
  CHECK_THAT(res.decay_constant, WithinRel(2.0, 1e-2));
  CHECK_THAT(res.decay_constant, WithinRel(2.0, 1e-4));
  CHECK_FALSE(res.tail_warning);
  CHECK(check_monotone_positive(res, F) == std::optional<bool>(true));
  auto exact = [](double r) { return r < 1e-8 ? 1.0 : (2.0 - 2.0 * std::exp(-r)) / r - std::exp(-r); };
  for (Eigen::Index i = 0; i < g->size(); i += 97) CHECK_THAT(res.u(i), WithinAbs(exact(g->nodes(i)), 1e-4));

  const double c0 = certify_bound(F, F.values);
  CHECK(c0 == 1.0);
  CHECK(decay_bound_ratio(res.u, c0, radial_mass(F)) <= 1.0 + 1e-12);
  CHECK_THAT(radial_mass(F), WithinRel(8.0 * std::numbers::pi, 1e-4));
}

TEST_CASE("truncated tail triggers the warning", "[potential]") {
  const auto g = grid(400, 10.0);
  const PotentialResult res = radial_potential(Field::sample(g, RadialFunction::builtin("inv_quad_sq")));
  CHECK(res.tail_warning);
  CHECK(res.tail_mass_ratio > 1e-6);
}

TEST_CASE("sign-changing source skips the monotonicity check", "[potential]") {
  const auto g = grid(400);
  const Field F(g, g->nodes.unaryExpr([](double r) { return std::cos(r) * std::exp(-r); }));
  CHECK_FALSE(check_monotone_positive(radial_potential(F), F).has_value());
}

TEST_CASE("gradient bound", "[potential]") {
  const auto g = grid(1000);
  const Field F = Field::sample(g, RadialFunction::builtin("exp"));
  const GradientBound b = check_gradient_bound(radial_potential(F).u, F, 5.0);
  CHECK(b.holds);
  CHECK(b.lhs > 0.0);
  const GradientBound z = check_gradient_bound(Field::zeros(g), Field::zeros(g), 5.0);
  CHECK(z.holds);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  CHECK_THROWS_AS(check_gradient_bound(Field::zeros(g), Field::zeros(g), 150.0), InvalidGrid);

  const Discretization d(make_analytic_instance(), GridParams{200.0, 1000, 100.0});
  const Field phi1 = d.sample(analytic_eigenfunction(3));
  const Field src = d.field(3.0 * d.f().cwiseProduct(phi1.values));
  CHECK(check_gradient_bound(phi1, src, 1.0).holds);
}

TEST_CASE("potential needs N >= 3", "[potential]") {
  const auto g2 = std::make_shared<const RadialGrid>(build_grid(2, 10.0, 100, 1.0));
  CHECK_THROWS_AS(radial_potential(Field::zeros(g2)), InvalidInstance);
}

TEST_CASE("decay bound holds for random positive sources", "[potential][property]") {
  const auto g = grid(800);
  const Vector P = g->sample(RadialFunction::builtin("inv_quad_sq"));
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double L = 0.2 + 3.0 * unif(rng);
    Vector F = P.cwiseProduct(g->nodes.unaryExpr([&](double r) { return 0.5 + 0.5 * std::cos(L * r); }));
    const Field Ff(g, F);
    const PotentialResult res = radial_potential(Ff);
    const double c0 = certify_bound(Ff, P);
    CHECK(decay_bound_ratio(res.u, c0, radial_mass(Field(g, P))) <= 1.0 + 1e-9);
    CHECK(res.u.values.minCoeff() >= 0.0);
  }
}
