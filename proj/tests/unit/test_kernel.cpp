#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "nlbif/discretization.hpp"
#include "nlbif/kernel_table.hpp"

using namespace nlbif;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("sphere mean of a constant is the constant", "[kernel]") {
  const RadialFunction one = RadialFunction::builtin("one");
  for (int dim : {3, 4, 5})
    for (double r : {0.3, 1.0, 4.0})
      for (double s : {0.2, 1.5, 3.0}) CHECK_THAT(sphere_mean(one, r, s, dim, 100.0), WithinRel(1.0, 1e-12));
}

TEST_CASE("sphere mean of the Gaussian in three dimensions", "[kernel]") {
  // mean over |y| = s of e^{-|x-y|^2}, |x| = r: e^{-(r-s)^2} (1 - e^{-4rs}) / (4rs)
  const RadialFunction g = RadialFunction::builtin("gaussian");
  const SphereMeanTable table(g, 3, 6.5, 1.0);
  for (double r : {0.05, 0.7, 2.0, 5.0})
    for (double s : {0.1, 0.9, 2.5, 4.0}) {
      const double exact = std::exp(-(r - s) * (r - s)) * -std::expm1(-4.0 * r * s) / (4.0 * r * s);
      CHECK_THAT(sphere_mean(g, r, s, 3, 6.5), WithinAbs(exact, 1e-12));
      CHECK_THAT(table(r, s), WithinAbs(exact, 1e-10));
    }
}

TEST_CASE("separable kernel table is rank one", "[kernel]") {
  Discretization d(make_analytic_instance(), GridParams{200.0, 300, 100.0});
  const KernelTable& K = d.kernel();
  REQUIRE(K.kind() == KernelKind::separable);
  REQUIRE(K.rank_one().has_value());
  const Eigen::MatrixXd outer = K.rank_one()->a * K.rank_one()->b.transpose();
  CHECK((outer - K.values()).cwiseAbs().maxCoeff() == 0.0);
  // K(x, y) = f(x) P(y) for q2 = P^{(2-gamma)/2}
  CHECK((K.rank_one()->b - d.P()).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("Gaussian convolution kernel: bound M and row masses", "[kernel]") {
  Discretization d(make_gaussian_instance(), GridParams{200.0, 500, 100.0});
  const KernelTable& K = d.kernel();
  REQUIRE(K.kind() == KernelKind::radial_convolution);
  // gamma = 1: M = |g|_{L^2} = (pi/2)^{3/4}
  CHECK_THAT(K.bound(), WithinRel(1.40310414553422, 1e-4));
  // sum_j w_j gbar(r_i, s_j) = int g = pi^{3/2} away from the outer boundary
  const RadialGrid& g = d.grid();
  for (Eigen::Index i : {Eigen::Index(0), Eigen::Index(50), Eigen::Index(200)}) {
    double mass = 0.0;
    for (Eigen::Index j = 0; j < g.size(); ++j) mass += g.weights(j) * K.q_mean(i, j);
    CHECK_THAT(mass, WithinRel(std::pow(std::numbers::pi, 1.5), 1e-6));
  }
}

TEST_CASE("tabulated kernel validation", "[kernel]") {
  ProblemSpec spec = make_analytic_instance();
  spec.grid = GridParams{50.0, 40, 10.0};
  const RadialGrid g = build_grid(3, spec.grid);
  const Vector f = g.sample(spec.f.eval), P = g.sample(spec.P.eval);
  const Eigen::MatrixXd good = f * P.transpose();
  CHECK_NOTHROW(KernelTable(TabulatedKernel{good}, g, f, P, 1.0));

  Eigen::MatrixXd neg = good;
  neg(3, 4) = -1e-3;
  CHECK_THROWS_AS(KernelTable(TabulatedKernel{neg}, g, f, P, 1.0), InvalidKernel);
  Eigen::MatrixXd nan = good;
  nan(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(KernelTable(TabulatedKernel{nan}, g, f, P, 1.0), InvalidKernel);
  CHECK_THROWS_AS(KernelTable(TabulatedKernel{Eigen::MatrixXd::Ones(5, 5)}, g, f, P, 1.0), InvalidKernel);
}

TEST_CASE("instance validation", "[kernel]") {
  ProblemSpec spec = make_analytic_instance();
  spec.dim = 2;
  CHECK_THROWS_AS(spec.check(), InvalidInstance);
  spec = make_analytic_instance();
  spec.gamma = 2.0;
  CHECK_THROWS_AS(spec.check(), InvalidInstance);
  spec = make_analytic_instance();
  spec.gamma = 0.5;
  CHECK_THROWS_AS(spec.check(), InvalidInstance);
  spec = make_analytic_instance();
  spec.f = GrowthRate{RadialFunction::builtin("zero"), 3.0};
  CHECK_THROWS_AS(Discretization(spec, GridParams{10.0, 32, 1.0}), InvalidInstance);
}

TEST_CASE("analytic fixture", "[kernel]") {
  const ProblemSpec spec = make_analytic_instance();
  CHECK(spec.dim == 3);
  CHECK(analytic_lambda1(3) == 3.0);
  CHECK(analytic_eigenfunction(3)(0.0) == 1.0);
  CHECK_THAT(1e6 * analytic_eigenfunction(3)(1e6), WithinRel(1.0, 1e-11));
  CHECK_THAT(spec.omega(), WithinRel(4.0 * std::numbers::pi, 1e-15));
}
