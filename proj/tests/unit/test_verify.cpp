#include <catch_amalgamated.hpp>

#include "nlbif/config.hpp"
#include "nlbif/verify.hpp"

using namespace nlbif;

namespace {
std::vector<ProblemSpec> fixtures() {
  const std::string dir = NLBIF_CONFIG_DIR;
  std::vector<ProblemSpec> out;
  for (const char* name : {"analytic.json", "rank1.json", "rank1_gamma15.json", "gaussian.json"})
    out.push_back(load_config(dir + "/" + name).problem);
  return out;
}
}  // namespace

TEST_CASE("missing fixtures", "[verify]") {
  CHECK_THROWS_AS(run_suite({}, Level::fast), MissingFixture);
  CHECK_THROWS_AS(run_suite({make_analytic_instance()}, Level::fast), MissingFixture);
  CHECK_THROWS_AS(run_suite({make_rank_one_instance()}, Level::fast), MissingFixture);
}

TEST_CASE("fast suite on the shipped fixtures", "[verify]") {
  const auto specs = fixtures();
  const VerificationReport a = run_suite(specs, Level::fast);
  REQUIRE(a.checks.size() == check_names().size());
  for (const auto& name : check_names()) {
    const CheckResult* c = a.find(name);
    REQUIRE(c);
    INFO(name << ": " << c->details.dump());
    CHECK(c->passed());
  }
  CHECK(a.all_pass());
  CHECK(a.to_json()["level"] == "fast");
  CHECK(a.to_json()["checks"].size() == 8);

  const VerificationReport b = run_suite(specs, Level::fast);
  CHECK(a.to_json(false).dump() == b.to_json(false).dump());
}

TEST_CASE("tolerance table", "[verify]") {
  CHECK(default_tolerances(Level::fast).cells == 500);
  CHECK(default_tolerances(Level::full).cells == 2000);
  CHECK(!Tolerances::version.empty());
}

TEST_CASE("full and fast levels agree on pass/fail", "[verify]") {
  const std::vector<ProblemSpec> specs{make_analytic_instance(), make_rank_one_instance(), make_rank_one_instance(3, 1.5)};
  const VerificationReport fast = run_suite(specs, Level::fast);
  const VerificationReport full = run_suite(specs, Level::full);
  REQUIRE(fast.checks.size() == full.checks.size());
  for (std::size_t k = 0; k < fast.checks.size(); ++k) {
    INFO(fast.checks[k].name);
    CHECK(fast.checks[k].name == full.checks[k].name);
    CHECK(fast.checks[k].status == full.checks[k].status);
  }
  CHECK(full.to_json()["checks"][0]["details"]["cells"] == 2000);
}
