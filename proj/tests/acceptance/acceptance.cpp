// Runs the eight acceptance criteria on the default grid and prints one line per criterion.
#include <cstdio>
#include <string>
#include <vector>

#include "nlbif/config.hpp"
#include "nlbif/verify.hpp"

using namespace nlbif;

int main() {
  const std::string dir = NLBIF_CONFIG_DIR;
  std::vector<ProblemSpec> specs;
  for (const char* name : {"analytic.json", "rank1.json", "rank1_gamma15.json"})
    specs.push_back(load_config(dir + "/" + name).problem);

  const VerificationReport rep = run_suite(specs, Level::full);
  const auto& names = check_names();
  int failed = 0;
  for (std::size_t k = 0; k < names.size(); ++k) {
    const CheckResult* c = rep.find(names[k]);
    if (!c) {
      std::printf("[FAIL] %zu %-18s missing from report\n", k + 1, names[k].c_str());
      ++failed;
      continue;
    }
    if (!c->passed()) ++failed;
    std::printf("[%s] %zu %-18s measured=%.6g expected=%.6g tolerance=%.3g runtime=%.3fs\n",
                c->passed() ? "PASS" : "FAIL", k + 1, c->name.c_str(), c->measured, c->expected, c->tolerance,
                c->runtime);
  }
  if (rep.checks.size() != names.size()) {
    std::printf("[FAIL] report has %zu checks, expected %zu\n", rep.checks.size(), names.size());
    ++failed;
  }
  std::printf("%d of %zu criteria failed\n", failed, names.size());
  return failed == 0 ? 0 : 1;
}
