#pragma once

#include <array>
#include <string_view>

namespace nlbif {

enum class Level { fast, full };

inline const char* to_string(Level l) { return l == Level::fast ? "fast" : "full"; }

/// Defaults for every verification check. Bump `version` whenever a value changes.
struct Tolerances {
  static constexpr std::string_view version = "1";

  int cells = 2000;
  double r_max = 200.0;
  double stretch = 100.0;

  double eigen_rel = 1e-2;
  double eigen_seconds = 5.0;

  double decay_rel = 1e-2;
  double decay_expected = 2.0;

  double branch_rel = 2e-2;
  double branch_seconds = 60.0;
  double branch_ds = 0.2;

  double trivial_sup = 1e-8;
  int dichotomy_seeds = 10;
  std::array<double, 3> below{0.5, 0.9, 0.99};
  std::array<double, 3> above{1.01, 1.5, 2.0};

  double identity_rel = 1e-6;

  double plateau_rel = 5e-2;
  double plateau_window = 0.1;
  double decay_bound_slack = 1e-9;

  double jacobian_rel = 1e-5;
  double jacobian_h = 1e-6;
  double richardson_ratio = 4.0;
  double richardson_spread = 0.5;
  double self_adjoint = 1e-9;
  int self_adjoint_pairs = 20;
  double slope_rel = 5e-2;
  std::array<double, 2> slope_gammas{1.0, 1.5};

  unsigned seed = 20240917u;
};

inline Tolerances default_tolerances(Level level) {
  Tolerances t;
  if (level == Level::fast) t.cells = 500;
  return t;
}

}  // namespace nlbif
