#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

#include "nlbif/error.hpp"
#include "nlbif/model.hpp"
#include "nlbif/radial_function.hpp"
#include "nlbif/tridiagonal.hpp"

namespace nlbif {

/// Nodes 0 = r_0 < ... < r_M = R_max with finite-volume cells [r_{i-1/2}, r_{i+1/2}].
///
/// weights(i) is the exact volume of the shell of cell i, omega_N (r_{i+1/2}^N - r_{i-1/2}^N) / N,
/// so sum_i weights(i) h(r_i) is a second order quadrature of a radial integrand over B_{R_max}.
struct RadialGrid {
  int dim = 3;
  double omega = 0.0;
  Vector nodes;    // M + 1 entries
  Vector faces;    // M entries, r_{i+1/2} = (r_i + r_{i+1}) / 2
  Vector weights;  // M + 1 entries

  Eigen::Index size() const { return nodes.size(); }
  int cells() const { return static_cast<int>(nodes.size()) - 1; }
  double r_max() const { return nodes(nodes.size() - 1); }

  Vector sample(const RadialFunction& h) const { return nodes.unaryExpr([&h](double r) { return h(r); }); }
  double integrate(const Vector& values) const { return weights.dot(values); }
};

/// Nodes follow r(xi) = R (S^xi - 1) / (S - 1), xi = i / M, where S = `stretch` is the ratio of the
/// last to the first cell width (S = 1 gives a uniform grid). Doubling M nests the grids.
inline RadialGrid build_grid(int dim, double r_max, int cells, double stretch = 1.0) {
  if (!(r_max > 0.0)) throw InvalidGrid("R_max must be positive");
  if (cells < 16) throw InvalidGrid("need at least 16 cells, got " + std::to_string(cells));
  if (!(stretch >= 1.0)) throw InvalidGrid("stretch must be >= 1");
  if (dim < 1) throw InvalidGrid("dimension must be positive");

  RadialGrid g;
  g.dim = dim;
  g.omega = sphere_area(dim);
  g.nodes.resize(cells + 1);
  for (int i = 0; i <= cells; ++i) {
    const double xi = static_cast<double>(i) / cells;
    g.nodes(i) = stretch == 1.0 ? r_max * xi : r_max * std::expm1(xi * std::log(stretch)) / (stretch - 1.0);
  }
  g.nodes(0) = 0.0;
  g.nodes(cells) = r_max;
  g.faces = 0.5 * (g.nodes.head(cells) + g.nodes.tail(cells));
  g.weights.resize(cells + 1);
  const double n = dim;
  for (int i = 0; i <= cells; ++i) {
    const double lo = i == 0 ? 0.0 : g.faces(i - 1);
    const double hi = i == cells ? r_max : g.faces(i);
    g.weights(i) = g.omega / n * (std::pow(hi, n) - std::pow(lo, n));
  }
  return g;
}

inline RadialGrid build_grid(int dim, const GridParams& p) { return build_grid(dim, p.r_max, p.cells, p.stretch); }

/// Samples of a radial function on a grid.
struct Field {
  std::shared_ptr<const RadialGrid> grid;
  Vector values;

  Field() = default;
  Field(std::shared_ptr<const RadialGrid> g, Vector v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid->size()) throw InvalidGrid("field size does not match its grid");
  }

  static Field zeros(std::shared_ptr<const RadialGrid> g) {
    const auto n = g->size();
    return Field(std::move(g), Vector::Zero(n));
  }
  static Field sample(std::shared_ptr<const RadialGrid> g, const RadialFunction& h) {
    Vector v = g->sample(h);
    return Field(std::move(g), std::move(v));
  }

  Eigen::Index size() const { return values.size(); }
  double operator()(Eigen::Index i) const { return values(i); }
  Field with_values(Vector v) const { return Field(grid, std::move(v)); }
};

/// -(u'' + (N-1)/r u') discretized by finite volumes:
///   (A u)_i = (F_{i-1/2} - F_{i+1/2}) / V_i,  F_{i+1/2} = omega r_{i+1/2}^{N-1} (u_{i+1} - u_i) / (r_{i+1} - r_i),
/// with F_{-1/2} = 0 (u'(0) = 0) and the Robin outflow F_R = -omega (N-2) R^{N-2} u_M, which is exact
/// for c r^{2-N}. The stiffness matrix K = diag(V) A is symmetric positive definite.
class DiscreteLaplacian {
 public:
  explicit DiscreteLaplacian(std::shared_ptr<const RadialGrid> grid) : grid_(std::move(grid)) {
    const RadialGrid& g = *grid_;
    const Eigen::Index n = g.size();
    const double N = g.dim;
    face_coef_.resize(n - 1);
    for (Eigen::Index i = 0; i + 1 < n; ++i)
      face_coef_(i) = g.omega * std::pow(g.faces(i), N - 1.0) / (g.nodes(i + 1) - g.nodes(i));
    robin_coef_ = g.omega * (N - 2.0) * std::pow(g.r_max(), N - 2.0);

    stiffness_.diag = Vector::Zero(n);
    stiffness_.diag.head(n - 1) += face_coef_;
    stiffness_.diag.tail(n - 1) += face_coef_;
    stiffness_.diag(n - 1) += robin_coef_;
    stiffness_.lower = -face_coef_;
    stiffness_.upper = -face_coef_;

    operator_.diag = stiffness_.diag.cwiseQuotient(g.weights);
    operator_.upper = stiffness_.upper.cwiseQuotient(g.weights.head(n - 1));
    operator_.lower = stiffness_.lower.cwiseQuotient(g.weights.tail(n - 1));

    stiffness_lu_ = TridiagonalLU(stiffness_);
  }

  const RadialGrid& grid() const { return *grid_; }
  const std::shared_ptr<const RadialGrid>& grid_ptr() const { return grid_; }

  /// A (acts on nodal values).
  const Tridiagonal& matrix() const { return operator_; }
  /// K = diag(weights) A, symmetric.
  const Tridiagonal& stiffness() const { return stiffness_; }
  double robin_coefficient() const { return robin_coef_; }
  const Vector& face_coefficients() const { return face_coef_; }

  Vector apply(const Vector& u) const { return operator_.multiply(u); }
  Field apply(const Field& u) const { return u.with_values(apply(u.values)); }

  /// Unique u with A u = rhs.
  Vector solve(const Vector& rhs) const { return stiffness_lu_.solve(rhs.cwiseProduct(grid_->weights)); }
  Field solve(const Field& rhs) const { return rhs.with_values(solve(rhs.values)); }

  /// u^T K u: squared D^{1,2} seminorm including the harmonic exterior beyond R_max.
  double energy(const Vector& u) const {
    const Eigen::Index n = u.size();
    const Vector du = u.tail(n - 1) - u.head(n - 1);
    return face_coef_.dot(du.cwiseAbs2()) + robin_coef_ * u(n - 1) * u(n - 1);
  }

 private:
  std::shared_ptr<const RadialGrid> grid_;
  Vector face_coef_;
  double robin_coef_ = 0.0;
  Tridiagonal stiffness_;
  Tridiagonal operator_;
  TridiagonalLU stiffness_lu_;
};

struct FieldNorms {
  double sup = 0.0;
  double l2p = 0.0;
  double d12 = 0.0;
  double decay = 0.0;
};

/// sup |u|, |u|_{2,P}, ||u||_{1,2} and sup r^{N-2} |u|.
inline FieldNorms norms(const Field& u, const Vector& p_samples) {
  const RadialGrid& g = *u.grid;
  FieldNorms out;
  out.sup = u.values.cwiseAbs().maxCoeff();
  out.l2p = std::sqrt(g.weights.dot(p_samples.cwiseProduct(u.values.cwiseAbs2())));
  const Eigen::Index n = u.size();
  double energy = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double h = g.nodes(i + 1) - g.nodes(i);
    const double grad = (u(i + 1) - u(i)) / h;
    energy += g.omega * std::pow(g.faces(i), g.dim - 1.0) * h * grad * grad;
  }
  energy += g.omega * (g.dim - 2.0) * std::pow(g.r_max(), g.dim - 2.0) * u(n - 1) * u(n - 1);
  out.d12 = std::sqrt(energy);
  for (Eigen::Index i = 0; i < n; ++i)
    out.decay = std::max(out.decay, std::pow(g.nodes(i), g.dim - 2.0) * std::abs(u(i)));
  return out;
}

inline FieldNorms norms(const Field& u, const RadialFunction& P) { return norms(u, u.grid->sample(P)); }

}  // namespace nlbif
