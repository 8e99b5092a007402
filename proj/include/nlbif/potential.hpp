#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "nlbif/error.hpp"
#include "nlbif/grid.hpp"

namespace nlbif {

namespace detail {

/// int_{r_i}^{r_{i+1}} s^power F(s) ds for F linear on the cell; exact for power <= 6.
inline double linear_cell_moment(const Field& F, Eigen::Index i, double power) {
  using GL = boost::math::quadrature::gauss<double, 4>;
  const Vector& r = F.grid->nodes;
  const double a = r(i), b = r(i + 1), fa = F(i), fb = F(i + 1);
  return GL::integrate([&](double x) { return std::pow(x, power) * (fa + (fb - fa) * (x - a) / (b - a)); }, a, b);
}

}  // namespace detail

/// omega_N int_0^{R_max} s^{N-1} F ds with the quadrature used by radial_potential.
inline double radial_mass(const Field& F) {
  const RadialGrid& g = *F.grid;
  double acc = 0.0;
  for (Eigen::Index i = 0; i + 1 < g.size(); ++i) acc += detail::linear_cell_moment(F, i, g.dim - 1.0);
  return g.omega * acc;
}

struct PotentialResult {
  Field u;
  /// Median of r^{N-2} u over the last decade of nodes.
  double decay_constant = 0.0;
  /// Set when the source carries non-negligible mass at R_max.
  bool tail_warning = false;
  double tail_mass_ratio = 0.0;
};

/// Median of r^{N-2} u(r) over nodes with r >= window_start * R_max.
inline double plateau_median(const Field& u, double window_start = 0.1) {
  const RadialGrid& g = *u.grid;
  std::vector<double> vals;
  for (Eigen::Index i = 0; i < g.size(); ++i)
    if (g.nodes(i) >= window_start * g.r_max()) vals.push_back(std::pow(g.nodes(i), g.dim - 2.0) * u(i));
  if (vals.empty()) return 0.0;
  auto mid = vals.begin() + static_cast<std::ptrdiff_t>(vals.size() / 2);
  std::nth_element(vals.begin(), mid, vals.end());
  if (vals.size() % 2 == 1) return *mid;
  const double hi = *mid;
  return 0.5 * (hi + *std::max_element(vals.begin(), mid));
}

/// Decaying solution of -Lap u = F by the radial Green's function:
///   u(r) = [ r^{2-N} int_0^r s^{N-1} F ds + int_r^{R_max} s F ds ] / (N - 2),
/// both integrals by cumulative trapezoid on the grid. F is taken to vanish beyond R_max.
inline PotentialResult radial_potential(const Field& F, double tail_tol = 1e-6) {
  const RadialGrid& g = *F.grid;
  const double N = g.dim;
  if (g.dim < 3) throw InvalidInstance("radial_potential needs N >= 3");
  const Eigen::Index n = g.size();
  const Vector& r = g.nodes;

  auto cell = [&](Eigen::Index i, double power) { return detail::linear_cell_moment(F, i, power); };
  Vector inner(n), outer(n);
  inner(0) = 0.0;
  for (Eigen::Index i = 1; i < n; ++i) inner(i) = inner(i - 1) + cell(i - 1, N - 1.0);
  outer(n - 1) = 0.0;
  for (Eigen::Index i = n - 2; i >= 0; --i) outer(i) = outer(i + 1) + cell(i, 1.0);

  Vector u(n);
  u(0) = outer(0) / (N - 2.0);
  for (Eigen::Index i = 1; i < n; ++i) u(i) = (std::pow(r(i), 2.0 - N) * inner(i) + outer(i)) / (N - 2.0);

  PotentialResult out{F.with_values(std::move(u))};
  out.decay_constant = plateau_median(out.u);

  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) total += g.weights(i) * std::abs(F(i));
  const double tail = g.omega * std::pow(g.r_max(), N) * std::abs(F(n - 1));
  out.tail_mass_ratio = total > 0.0 ? tail / total : 0.0;
  out.tail_warning = out.tail_mass_ratio > tail_tol;
  return out;
}

/// Smallest c0 with |F| <= c0 P at every node.
inline double certify_bound(const Field& F, const Vector& P) { return F.values.cwiseAbs().cwiseQuotient(P).maxCoeff(); }

/// max over nodes r_i >= r_1 of |u(r_i)| / (c0 |P|_1 / (omega (N-2)) r_i^{2-N}); <= 1 when the bound holds.
inline double decay_bound_ratio(const Field& u, double c0, double p_mass) {
  const RadialGrid& g = *u.grid;
  const double scale = c0 * p_mass / (g.omega * (g.dim - 2.0));
  double worst = 0.0;
  for (Eigen::Index i = 1; i < g.size(); ++i) {
    const double bound = scale * std::pow(g.nodes(i), 2.0 - g.dim);
    worst = std::max(worst, bound > 0.0 ? std::abs(u(i)) / bound : (u(i) == 0.0 ? 0.0 : INFINITY));
  }
  return worst;
}

/// True iff u > 0 and strictly decreasing. Empty when F is not a nonnegative source.
inline std::optional<bool> check_monotone_positive(const PotentialResult& res, const Field& F) {
  if (F.values.minCoeff() < 0.0) return std::nullopt;
  const Vector& u = res.u.values;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (!(u(i) > 0.0)) return false;
    if (i > 0 && !(u(i) < u(i - 1))) return false;
  }
  return true;
}

struct GradientBound {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

/// max_{r <= R} |u'| against (N/R) max_{r <= 2R} |u| + (12 R / (N-2)) max_{r <= 2R} |F|.
inline GradientBound check_gradient_bound(const Field& u, const Field& F, double R) {
  const RadialGrid& g = *u.grid;
  if (!(R > 0.0) || 2.0 * R > g.r_max() * (1.0 + 1e-12)) throw InvalidGrid("gradient bound needs 0 < 2R <= R_max");
  GradientBound out;
  double umax = 0.0, fmax = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (g.nodes(i) <= 2.0 * R) {
      umax = std::max(umax, std::abs(u(i)));
      fmax = std::max(fmax, std::abs(F(i)));
    }
    if (i + 1 < g.size() && g.nodes(i + 1) <= R)
      out.lhs = std::max(out.lhs, std::abs(u(i + 1) - u(i)) / (g.nodes(i + 1) - g.nodes(i)));
  }
  out.rhs = g.dim / R * umax + 12.0 * R / (g.dim - 2.0) * fmax;
  out.holds = out.lhs <= out.rhs;
  return out;
}

}  // namespace nlbif
