#include <catch_amalgamated.hpp>

#include <sstream>
#include <string>

#include "nlbif/config.hpp"
#include "nlbif/csv.hpp"

using namespace nlbif;
using nlohmann::json;

namespace {
const std::string dir = NLBIF_CONFIG_DIR;

json base() {
  return json::parse(R"({"dim": 3, "gamma": 1.0, "f": "inv_quad_sq", "P": "inv_quad_sq",
                         "kernel": {"type": "separable", "q2": {"builtin": "inv_quad_sq", "power": 0.5}},
                         "grid": {"R_max": 50, "M": 64, "stretch": 10}})");
}
}  // namespace

TEST_CASE("shipped configs load", "[config]") {
  for (const char* name : {"analytic.json", "rank1.json", "rank1_gamma15.json", "gaussian.json"}) {
    INFO(name);
    const RunConfig cfg = load_config(dir + "/" + name);
    CHECK(cfg.problem.dim == 3);
    CHECK(cfg.problem.grid.cells == 2000);
    CHECK(cfg.problem.grid.r_max == 200.0);
  }
  CHECK(load_config(dir + "/analytic.json").problem.oracle == OracleKind::analytic_eigen);
  CHECK(load_config(dir + "/rank1_gamma15.json").problem.gamma == 1.5);
  CHECK(std::holds_alternative<RadialConvolutionKernel>(load_config(dir + "/gaussian.json").problem.kernel));
}

TEST_CASE("config fields", "[config]") {
  json j = base();
  j["solver"] = {{"eig_tol", 1e-10}, {"newton_max_iter", 7}};
  j["f"] = {{"builtin", "exp"}, {"length", 2.0}, {"scale", 0.5}};
  const RunConfig cfg = parse_config(j);
  CHECK(cfg.solver.eigen.tol == 1e-10);
  CHECK(cfg.solver.newton.max_iter == 7);
  CHECK(cfg.problem.grid.cells == 64);
  CHECK(cfg.problem.f.eval(2.0) == 0.5 * std::exp(-1.0));
  CHECK(cfg.problem.f.q == 3.0);

  j = base();
  j["P"] = {{"r", {0.0, 100.0}}, {"values", {1.0, 1.0}}};
  CHECK(parse_config(j).problem.P.eval(50.0) == 1.0);
}

TEST_CASE("tabulated kernel from an inline matrix", "[config]") {
  json j = base();
  j["grid"] = {{"R_max", 10}, {"M", 16}, {"stretch", 1}};
  std::vector<std::vector<double>> rows(17, std::vector<double>(17, 1e-3));
  j["kernel"] = {{"type", "tabulated"}, {"matrix", rows}};
  const RunConfig cfg = parse_config(j);
  REQUIRE(std::holds_alternative<TabulatedKernel>(cfg.problem.kernel));
  CHECK(std::get<TabulatedKernel>(cfg.problem.kernel).table.rows() == 17);
  CHECK_NOTHROW(Discretization(cfg.problem));
}

TEST_CASE("malformed configs", "[config]") {
  auto bad = [](json j) { CHECK_THROWS_AS(parse_config(j), ConfigError); };
  json j = base();
  j.erase("dim");
  bad(j);
  j = base();
  j["kernel"]["type"] = "fourier";
  bad(j);
  j = base();
  j["f"] = "no_such_function";
  bad(j);
  j = base();
  j["f"] = 3;
  bad(j);
  j = base();
  j["oracle"] = "magic";
  bad(j);
  j = base();
  j["solver"] = {{"newton_tol", -1.0}};
  bad(j);
  j = base();
  j["kernel"] = {{"type", "tabulated"}, {"matrix", {{1.0, 2.0}, {3.0}}}};
  bad(j);
  j = base();
  j["gamma"] = 2.5;
  CHECK_THROWS_AS(parse_config(j), InvalidInstance);
  CHECK_THROWS_AS(load_config(dir + "/missing.json"), ConfigError);
}

TEST_CASE("field CSV format", "[config][csv]") {
  const auto g = std::make_shared<const RadialGrid>(build_grid(3, 1.0, 16, 1.0));
  Vector v = Vector::Constant(g->size(), 0.1);
  v(3) = 1.0 / 3.0;
  std::ostringstream os;
  write_field_csv(os, Field(g, v));
  const std::string s = os.str();
  CHECK(s.rfind("r,value\n0,0.10000000000000001\n", 0) == 0);
  CHECK(s.find("0.1875,0.33333333333333331\n") != std::string::npos);
  CHECK(s.back() == '\n');

  std::istringstream is(s);
  const FieldSamples back = read_field_csv(is);
  REQUIRE(back.r.size() == static_cast<std::size_t>(g->size()));
  const Field f = field_on_grid(back, g);
  CHECK((f.values - v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("field CSV resampling and errors", "[config][csv]") {
  const auto g = std::make_shared<const RadialGrid>(build_grid(3, 2.0, 16, 1.0));
  std::istringstream is("r,value\n0,0\n4,8\n");
  const Field f = field_on_grid(read_field_csv(is), g);
  for (Eigen::Index i = 0; i < g->size(); ++i) CHECK_THAT(f(i), Catch::Matchers::WithinRel(2.0 * g->nodes(i), 1e-14));
  std::istringstream one("r,value\n0,1\n");
  CHECK_THROWS_AS(read_field_csv(one), ConfigError);
  std::istringstream text("r,value\n0,abc\n1,2\n");
  CHECK_THROWS_AS(read_field_csv(text), ConfigError);
}

TEST_CASE("matrix CSV round trip", "[config][csv]") {
  Eigen::MatrixXd m(2, 3);
  m << 1.0, 0.1, 1e-300, 2.5, 1.0 / 7.0, 3.0;
  std::ostringstream os;
  write_matrix_csv(os, m);
  std::istringstream is(os.str());
  CHECK(read_matrix_csv(is) == m);
  std::istringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(read_matrix_csv(ragged), ConfigError);
}
