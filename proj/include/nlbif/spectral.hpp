#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlbif/discretization.hpp"
#include "nlbif/error.hpp"
#include "nlbif/grid.hpp"

namespace nlbif {

struct EigenPair {
  double lambda1 = 0.0;
  Field phi1;  // positive, sup-normalized
  /// |phi1 - lambda1 S(phi1)|_inf / |phi1|_inf
  double residual = 0.0;
  /// |A phi1 - lambda1 f phi1|_inf, for reference
  double raw_residual = 0.0;
  double decay_floor = 0.0;
  double lambda2 = std::numeric_limits<double>::quiet_NaN();
  double lambda2_residual = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
};

/// S(v): the decaying solution of -Lap u = f v.
inline Field apply_S(const Field& v, const Discretization& d) {
  return v.with_values(d.laplacian().solve(d.f().cwiseProduct(v.values)));
}

/// ||u||_{1,2}^2 / sum w f u^2
inline double rayleigh(const Field& u, const Discretization& d) {
  const double denom = d.f_inner(u.values, u.values);
  if (!(denom > 0.0)) throw Error("rayleigh: zero denominator");
  return d.laplacian().energy(u.values) / denom;
}

/// min over r >= window_start R_max of r^{N-2} u(r).
inline double check_decay_floor(const Field& u, double window_start = 0.1) {
  const RadialGrid& g = *u.grid;
  double floor = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < g.size(); ++i)
    if (g.nodes(i) >= window_start * g.r_max()) floor = std::min(floor, std::pow(g.nodes(i), g.dim - 2.0) * u(i));
  return std::isfinite(floor) ? floor : 0.0;
}

/// (max - min) / max of r^{N-2} u(r) over r >= window_start R_max.
inline double plateau_variation(const Field& u, double window_start = 0.1) {
  const RadialGrid& g = *u.grid;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (g.nodes(i) < window_start * g.r_max()) continue;
    const double v = std::pow(g.nodes(i), g.dim - 2.0) * u(i);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi > 0.0 ? (hi - lo) / hi : std::numeric_limits<double>::infinity();
}

struct EigenOptions {
  double tol = 1e-12;
  int max_iter = 5000;
  double lambda2_tol = 1e-8;
  bool compute_lambda2 = true;
};

/// Principal eigenpair of A u = lambda f u by inverse iteration u <- S(u) from e^{-r}, with the
/// Rayleigh quotient as eigenvalue estimate. lambda2 comes from the same iteration deflated
/// against phi1 in the f-weighted inner product.
inline EigenPair principal_eigenpair(const Discretization& d, const EigenOptions& opt = {}) {
  const RadialGrid& g = d.grid();
  auto resid = [&](const Vector& x, double lam, const Vector& Sx) {
    return (x - lam * Sx).cwiseAbs().maxCoeff() / x.cwiseAbs().maxCoeff();
  };

  EigenPair out;
  Vector x = g.nodes.unaryExpr([](double r) { return std::exp(-r); });
  double lam = 0.0, res = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    Vector y = d.laplacian().solve(d.f().cwiseProduct(x));
    y /= y.cwiseAbs().maxCoeff();
    lam = d.laplacian().energy(y) / d.f_inner(y, y);
    const Vector Sy = d.laplacian().solve(d.f().cwiseProduct(y));
    res = resid(y, lam, Sy);
    x = std::move(y);
    if (res < opt.tol) break;
  }
  if (!(res < opt.tol))
    throw IterationLimit("principal_eigenpair: no convergence after " + std::to_string(opt.max_iter) + " iterations",
                         res);
  if (x.sum() < 0.0) x = -x;
  x /= x.maxCoeff();

  out.lambda1 = lam;
  out.phi1 = d.field(x);
  out.residual = res;
  out.raw_residual = (d.laplacian().apply(x) - lam * d.f().cwiseProduct(x)).cwiseAbs().maxCoeff();
  out.decay_floor = check_decay_floor(out.phi1);
  out.iterations = it + 1;

  if (opt.compute_lambda2) {
    const double phi_norm2 = d.f_inner(x, x);
    auto deflate = [&](Vector v) { return Vector(v - (d.f_inner(v, x) / phi_norm2) * x); };
    Vector z = deflate(g.nodes.unaryExpr([](double r) { return std::exp(-r) * (1.0 - r); }));
    double lam2 = 0.0, res2 = std::numeric_limits<double>::infinity();
    for (int k = 0; k < opt.max_iter && !(res2 < opt.lambda2_tol); ++k) {
      Vector y = deflate(d.laplacian().solve(d.f().cwiseProduct(z)));
      y /= y.cwiseAbs().maxCoeff();
      lam2 = d.laplacian().energy(y) / d.f_inner(y, y);
      res2 = resid(y, lam2, deflate(d.laplacian().solve(d.f().cwiseProduct(y))));
      z = std::move(y);
    }
    out.lambda2 = lam2;
    out.lambda2_residual = res2;
  }
  return out;
}

}  // namespace nlbif
