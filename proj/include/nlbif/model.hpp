#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <variant>

#include <Eigen/Dense>

#include "nlbif/error.hpp"
#include "nlbif/radial_function.hpp"

namespace nlbif {

/// Surface area of the unit sphere S^{N-1}: 2 pi^{N/2} / Gamma(N/2). Equals 4 pi for N = 3.
inline double sphere_area(int dim) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

/// Positive, integrable radial weight P.
struct WeightP {
  RadialFunction eval;
};

/// Growth rate f (radial), with the exponent q of its uniform local L^q bound.
struct GrowthRate {
  RadialFunction eval;
  double q = 3.0;
};

/// K(x,y) = f(x) P(y)^{gamma/2} q2(|y|).
struct SeparableKernel {
  RadialFunction q2;
};

/// K(x,y) = f(x) P(y)^{gamma/2} g(|y - x|). `support` bounds the radius where g is non-negligible.
struct RadialConvolutionKernel {
  RadialFunction g;
  double support = 8.0;
};

/// Sphere-averaged kernel values K(r_i, s_j) given directly on the grid nodes.
struct TabulatedKernel {
  Eigen::MatrixXd table;
};

using KernelSpec = std::variant<SeparableKernel, RadialConvolutionKernel, TabulatedKernel>;

/// Radial grid parameters: outer radius, number of cells, ratio of last to first cell width.
struct GridParams {
  double r_max = 200.0;
  int cells = 2000;
  double stretch = 100.0;
};

/// Which closed-form oracle, if any, applies to an instance.
enum class OracleKind { none, analytic_eigen, rank_one };

struct ProblemSpec {
  std::string name = "unnamed";
  int dim = 3;
  double gamma = 1.0;
  GrowthRate f;
  WeightP P;
  KernelSpec kernel = SeparableKernel{};
  GridParams grid;
  OracleKind oracle = OracleKind::none;

  double omega() const { return sphere_area(dim); }

  /// Throws InvalidInstance unless N >= 3 and 1 <= gamma < 2.
  void check() const {
    if (dim < 3) throw InvalidInstance("dimension must be at least 3, got " + std::to_string(dim));
    if (!(gamma >= 1.0 && gamma < 2.0))
      throw InvalidInstance("gamma must lie in [1, 2), got " + std::to_string(gamma));
  }
};

/// lambda_1 of -Lap u = lambda (1+r^2)^-2 u in R^N.
inline double analytic_lambda1(int dim) { return static_cast<double>(dim * (dim - 2)); }

/// Principal eigenfunction (1 + r^2)^{-(N-2)/2} of the analytic instance, equal to 1 at r = 0.
inline RadialFunction analytic_eigenfunction(int dim) {
  const double e = -0.5 * (dim - 2);
  return {"analytic_phi1", [e](double r) { return std::pow(1.0 + r * r, e); }};
}

/// f = P = (1+r^2)^-2 with the separable kernel q2 = P^{(2-gamma)/2}, so that K(x,y) = f(x) P(y).
/// The principal eigenpair of the linear problem is known in closed form.
inline ProblemSpec make_analytic_instance(int dim = 3, double gamma = 1.0) {
  ProblemSpec spec;
  spec.name = "analytic";
  spec.dim = dim;
  spec.gamma = gamma;
  const auto profile = RadialFunction::builtin("inv_quad_sq");
  spec.f = GrowthRate{profile, static_cast<double>(dim)};
  spec.P = WeightP{profile};
  spec.kernel = SeparableKernel{profile.pow(0.5 * (2.0 - gamma))};
  spec.oracle = OracleKind::analytic_eigen;
  spec.check();
  return spec;
}

/// The analytic instance tagged as the rank-one branch oracle.
inline ProblemSpec make_rank_one_instance(int dim = 3, double gamma = 1.0) {
  ProblemSpec spec = make_analytic_instance(dim, gamma);
  spec.name = gamma == 1.0 ? "rank_one" : "rank_one_gamma" + std::to_string(gamma).substr(0, 4);
  spec.oracle = OracleKind::rank_one;
  return spec;
}

/// f = P = (1+r^2)^-2 with a Gaussian convolution kernel g(z) = e^{-|z|^2}.
inline ProblemSpec make_gaussian_instance(int dim = 3, double gamma = 1.0) {
  ProblemSpec spec;
  spec.name = "gaussian";
  spec.dim = dim;
  spec.gamma = gamma;
  const auto profile = RadialFunction::builtin("inv_quad_sq");
  spec.f = GrowthRate{profile, static_cast<double>(dim)};
  spec.P = WeightP{profile};
  spec.kernel = RadialConvolutionKernel{RadialFunction::builtin("gaussian"), 6.5};
  spec.check();
  return spec;
}

}  // namespace nlbif
