#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "nlbif/grid.hpp"
#include "nlbif/potential.hpp"

using namespace nlbif;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
std::shared_ptr<const RadialGrid> make(int dim, double R, int M, double S) {
  return std::make_shared<const RadialGrid>(build_grid(dim, R, M, S));
}
}  // namespace

TEST_CASE("sphere area", "[grid]") {
  CHECK_THAT(sphere_area(3), WithinRel(4.0 * std::numbers::pi, 1e-15));
  CHECK_THAT(sphere_area(4), WithinRel(2.0 * std::numbers::pi * std::numbers::pi, 1e-15));
}

TEST_CASE("build_grid rejects bad parameters", "[grid]") {
  CHECK_THROWS_AS(build_grid(3, 0.0, 100, 1.0), InvalidGrid);
  CHECK_THROWS_AS(build_grid(3, -1.0, 100, 1.0), InvalidGrid);
  CHECK_THROWS_AS(build_grid(3, 10.0, 15, 1.0), InvalidGrid);
  CHECK_THROWS_AS(build_grid(3, 10.0, 100, 0.5), InvalidGrid);
  CHECK_NOTHROW(build_grid(3, 10.0, 16, 1.0));
}

TEST_CASE("grid nodes and weights", "[grid]") {
  for (double S : {1.0, 100.0}) {
    const RadialGrid g = build_grid(3, 50.0, 200, S);
    REQUIRE(g.size() == 201);
    CHECK(g.nodes(0) == 0.0);
    CHECK_THAT(g.r_max(), WithinRel(50.0, 1e-14));
    for (Eigen::Index i = 1; i < g.size(); ++i) CHECK(g.nodes(i) > g.nodes(i - 1));
    CHECK(g.weights.minCoeff() > 0.0);
    // exact shell volumes sum to the ball volume
    CHECK_THAT(g.weights.sum(), WithinRel(4.0 / 3.0 * std::numbers::pi * std::pow(50.0, 3), 1e-12));
  }
  const RadialGrid g = build_grid(3, 100.0, 2000, 100.0);
  CHECK_THAT((g.nodes(g.size() - 1) - g.nodes(g.size() - 2)) / (g.nodes(1) - g.nodes(0)), WithinRel(100.0, 0.05));
}

TEST_CASE("quadrature of e^{-r}", "[grid]") {
  const RadialFunction e = RadialFunction::builtin("exp");
  const RadialGrid g = build_grid(3, 100.0, 1000, 1.0);
  CHECK_THAT(g.integrate(g.sample(e)), WithinRel(8.0 * std::numbers::pi, 5e-3));
  CHECK(g.integrate(g.sample(RadialFunction::builtin("zero"))) == 0.0);

  double prev = 0.0;
  for (int M : {250, 500, 1000}) {
    const RadialGrid gm = build_grid(3, 100.0, M, 1.0);
    const double err = std::abs(gm.integrate(gm.sample(e)) - 8.0 * std::numbers::pi);
    if (prev > 0.0) CHECK_THAT(prev / err, WithinAbs(4.0, 0.5));
    prev = err;
  }
}

TEST_CASE("field norms", "[grid]") {
  const auto g = make(3, 200.0, 2000, 100.0);
  const FieldNorms z = norms(Field::zeros(g), RadialFunction::builtin("exp"));
  CHECK(z.sup == 0.0);
  CHECK(z.l2p == 0.0);
  CHECK(z.d12 == 0.0);
  CHECK(z.decay == 0.0);

  const Field u = Field::sample(g, RadialFunction::builtin("inv_quad_sqrt"));
  const FieldNorms nu = norms(u, RadialFunction::builtin("exp"));
  CHECK_THAT(nu.sup, WithinRel(1.0, 1e-15));
  CHECK_THAT(nu.decay, WithinRel(1.0, 2e-5));

  const Field e = Field::sample(g, RadialFunction::builtin("exp"));
  const FieldNorms ne = norms(e, RadialFunction::builtin("exp"));
  CHECK_THAT(ne.l2p * ne.l2p, WithinRel(4.0 * std::numbers::pi * 2.0 / 27.0, 1e-4));
  // D^{1,2} seminorm of e^{-r}: 4 pi int r^2 e^{-2r} dr = pi
  CHECK_THAT(ne.d12 * ne.d12, WithinRel(std::numbers::pi, 1e-3));
}

TEST_CASE("laplacian: zero rhs and harmonic tail", "[grid]") {
  const auto g = make(3, 200.0, 1000, 100.0);
  const DiscreteLaplacian L(g);
  CHECK(L.solve(Vector::Zero(g->size())).cwiseAbs().maxCoeff() == 0.0);

  Vector h = g->nodes.unaryExpr([](double r) { return r > 0.0 ? 1.0 / r : 0.0; });
  const Vector Ah = L.apply(h);
  const Vector scale = g->nodes.unaryExpr([](double r) { return r > 0.0 ? 1.0 / (r * r * r) : 0.0; });
  for (Eigen::Index i = 10; i < g->size(); ++i) CHECK(std::abs(Ah(i)) <= 1e-2 * scale(i));
  // the Robin flux alone is exact for c r^{2-N}
  const double R = g->r_max();
  const double dr = -1.0 / (R * R);
  CHECK_THAT(L.robin_coefficient() * h(g->size() - 1), WithinRel(-g->omega * R * R * dr, 1e-14));
}

TEST_CASE("laplacian matches the closed-form potential of e^{-r}", "[grid]") {
  // u(r) = (2 - 2 e^{-r}) / r - e^{-r} solves -Lap u = e^{-r} in R^3
  auto exact = [](double r) { return r < 1e-8 ? 1.0 - r / 3.0 : (2.0 - 2.0 * std::exp(-r)) / r - std::exp(-r); };
  CHECK_THAT(exact(1.0), WithinRel(0.89636167648567304, 1e-14));
  CHECK_THAT(exact(20.0), WithinRel(0.099999997732731015, 1e-14));
  double prev = 0.0;
  for (int M : {500, 1000, 2000}) {
    const auto g = make(3, 200.0, M, 100.0);
    const Vector u = DiscreteLaplacian(g).solve(g->sample(RadialFunction::builtin("exp")));
    double err = 0.0;
    for (Eigen::Index i = 0; i < g->size(); ++i) err = std::max(err, std::abs(u(i) - exact(g->nodes(i))));
    if (prev > 0.0) CHECK_THAT(prev / err, WithinAbs(4.0, 0.5));
    prev = err;
    const Vector pot = radial_potential(Field::sample(g, RadialFunction::builtin("exp"))).u.values;
    CHECK((u - pot).cwiseAbs().maxCoeff() < 1e-3);
  }
}

TEST_CASE("laplacian symmetry, definiteness and maximum principle", "[grid][property]") {
  std::mt19937 rng(7);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 20; ++trial) {
    const int M = 16 + static_cast<int>(rng() % 400);
    const double S = 1.0 + 200.0 * std::uniform_real_distribution<double>()(rng);
    const int dim = 3 + static_cast<int>(rng() % 3);
    const auto g = make(dim, 10.0 + 100.0 * std::uniform_real_distribution<double>()(rng), M, S);
    const DiscreteLaplacian L(g);
    const Vector u = Vector::NullaryExpr(g->size(), [&] { return n01(rng); });
    const Vector v = Vector::NullaryExpr(g->size(), [&] { return n01(rng); });
    const Vector& w = g->weights;
    const double lhs = w.dot(L.apply(u).cwiseProduct(v)), rhs = w.dot(u.cwiseProduct(L.apply(v)));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (std::abs(lhs) + std::abs(rhs) + 1.0) * M);
    CHECK(w.dot(L.apply(u).cwiseProduct(u)) > 0.0);
    CHECK_THAT(w.dot(L.apply(u).cwiseProduct(u)), WithinRel(L.energy(u), 1e-9));

    const Vector rhs_pos = Vector::NullaryExpr(g->size(), [&] { return std::abs(n01(rng)); });
    CHECK(L.solve(rhs_pos).minCoeff() >= 0.0);
    // normwise backward error of K x = W v
    const Vector x = L.solve(v);
    const Tridiagonal& K = L.stiffness();
    const double knorm = (K.lower.cwiseAbs().sum() + K.diag.cwiseAbs().sum() + K.upper.cwiseAbs().sum());
    const double berr = (K.multiply(x) - w.cwiseProduct(v)).cwiseAbs().maxCoeff() /
                        (knorm * x.cwiseAbs().maxCoeff() + w.cwiseProduct(v).cwiseAbs().maxCoeff());
    CHECK(berr <= 1e-14);
  }
}

TEST_CASE("radial functions", "[grid]") {
  CHECK_THROWS_AS(RadialFunction::builtin("nope"), ConfigError);
  const RadialFunction t = RadialFunction::tabulated({0.0, 1.0, 2.0}, {1.0, 3.0, 2.0});
  CHECK_THAT(t(0.5), WithinRel(2.0, 1e-15));
  CHECK_THAT(t(1.5), WithinRel(2.5, 1e-15));
  CHECK_THROWS(t(2.5));
  CHECK_THAT(RadialFunction::builtin("inv_quad_sq")(1.0), WithinRel(0.25, 1e-15));
  CHECK_THAT(RadialFunction::builtin("exp", 2.0)(2.0), WithinRel(std::exp(-1.0), 1e-15));
  CHECK_THAT(RadialFunction::builtin("inv_quad_sq").pow(0.5)(1.0), WithinRel(0.5, 1e-15));
  CHECK_THAT(RadialFunction::builtin("one").scaled(3.0)(7.0), WithinRel(3.0, 1e-15));
}
