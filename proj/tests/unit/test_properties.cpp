#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "nlbif/continuation.hpp"
#include "nlbif/csv.hpp"

using namespace nlbif;

TEST_CASE("CSV round trip of random values is exact", "[property][csv]") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> expo(-300, 300);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  const auto g = std::make_shared<const RadialGrid>(build_grid(3, 7.0, 200, 3.0));
  for (int trial = 0; trial < 10; ++trial) {
    const Vector v = Vector::NullaryExpr(g->size(), [&] { return std::ldexp(mant(rng), expo(rng)); });
    std::ostringstream os;
    write_field_csv(os, Field(g, v));
    std::istringstream is(os.str());
    CHECK((field_on_grid(read_field_csv(is), g).values - v).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("lambda identity holds for any solution pair generated on the rank-one branch", "[property]") {
  const Discretization d(make_rank_one_instance(), GridParams{200.0, 500, 100.0});
  const EigenPair eig = principal_eigenpair(d);
  const double m = d.grid().weights.dot(d.P().cwiseProduct(eig.phi1.values));
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> unif(1e-3, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double t = unif(rng);
    const double lambda = eig.lambda1 + m * t;
    const LambdaIdentity id = lambda_identity(lambda, eig.phi1.with_values(t * eig.phi1.values), eig, d);
    CHECK(id.residual <= 1e-10);
  }
}

TEST_CASE("residual is odd and the trivial line is a solution for every lambda", "[property]") {
  const Discretization d(make_gaussian_instance(), GridParams{200.0, 200, 100.0});
  std::mt19937 rng(4);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> lam(0.0, 20.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double lambda = lam(rng);
    const Vector u = Vector::NullaryExpr(d.grid().size(), [&] { return n01(rng); });
    const Vector r1 = residual(lambda, d.field(u), d).values;
    const Vector r2 = residual(lambda, d.field(-u), d).values;
    CHECK((r1 + r2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(residual(lambda, d.zeros(), d).values.cwiseAbs().maxCoeff() == 0.0);
  }
}
