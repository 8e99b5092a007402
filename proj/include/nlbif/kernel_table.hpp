#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <Eigen/Dense>

#include "nlbif/error.hpp"
#include "nlbif/grid.hpp"
#include "nlbif/model.hpp"

namespace nlbif {

/// Mean of h(|r e - s w|)^power over w on the unit sphere S^{N-1}, e a fixed unit vector.
///
/// Integrated in the chord length rho = |r e - s w| on [|r - s|, min(r + s, support)] with 32-point
/// Gauss-Legendre; the density of cos(theta) is c_N (1 - t^2)^{(N-3)/2}. Even N integrate in a cosine
/// variable instead.
inline double sphere_mean(const RadialFunction& h, double r, double s, int dim, double support, double power = 1.0) {
  auto value = [&](double rho) { return power == 1.0 ? h(rho) : std::pow(h(rho), power); };
  if (r == 0.0 || s == 0.0) return value(std::max(r, s));
  const double lo = std::abs(r - s);
  const double hi = std::min(r + s, support);
  if (lo >= hi) return 0.0;
  const double cn = std::tgamma(0.5 * dim) / (std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (dim - 1)));
  const double half_exp = 0.5 * (dim - 3);
  auto integrand = [&](double rho) {
    double w = rho / (r * s);
    if (dim != 3) {
      const double t = (r * r + s * s - rho * rho) / (2.0 * r * s);
      w *= std::pow(std::max(0.0, 1.0 - t * t), half_exp);
    }
    return value(rho) * w;
  };
  using GL = boost::math::quadrature::gauss<double, 32>;
  if (dim % 2 == 1) return cn * GL::integrate(integrand, lo, hi);
  // half-integer exponent: rho = lo + (hi - lo)(1 - cos psi)/2 removes the square-root endpoint behaviour
  const double half = 0.5 * (hi - lo);
  return cn * GL::integrate([&](double psi) { return integrand(lo + half * (1.0 - std::cos(psi))) * half * std::sin(psi); },
                            0.0, std::numbers::pi);
}

/// Sphere mean of h^power as a function of (r, s), for repeated evaluation.
///
/// For N = 3 the mean is (H(r+s) - H(|r-s|)) / (2 r s) with H(x) = int_0^x h(rho)^power rho d rho,
/// tabulated once and interpolated by cubic Hermite (H' is known exactly). Pairs with a short
/// chord interval, and other dimensions, fall back to sphere_mean.
class SphereMeanTable {
 public:
  SphereMeanTable(RadialFunction h, int dim, double support, double power, int intervals = 4096)
      : h_(std::move(h)), dim_(dim), support_(support), power_(power), dx_(support / intervals) {
    if (dim_ != 3) return;
    prim_.resize(intervals + 1);
    deriv_.resize(intervals + 1);
    auto integrand = [this](double rho) { return value(rho) * rho; };
    prim_[0] = 0.0;
    for (int k = 0; k <= intervals; ++k) {
      const double x = k * dx_;
      deriv_[k] = integrand(x);
      if (k > 0)
        prim_[k] = prim_[k - 1] + boost::math::quadrature::gauss<double, 8>::integrate(integrand, x - dx_, x);
    }
  }

  double operator()(double r, double s) const {
    if (dim_ != 3 || 2.0 * std::min(r, s) <= 0.1 * support_) return sphere_mean(h_, r, s, dim_, support_, power_);
    return std::max(0.0, primitive(r + s) - primitive(std::abs(r - s))) / (2.0 * r * s);
  }

 private:
  double value(double rho) const { return power_ == 1.0 ? h_(rho) : std::pow(h_(rho), power_); }

  double primitive(double x) const {
    const auto last = static_cast<std::ptrdiff_t>(prim_.size()) - 1;
    if (x >= support_) return prim_[last];
    const auto k = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(x / dx_), last - 1);
    const double t = (x - k * dx_) / dx_;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * prim_[k] + (t3 - 2 * t2 + t) * dx_ * deriv_[k] + (-2 * t3 + 3 * t2) * prim_[k + 1] +
           (t3 - t2) * dx_ * deriv_[k + 1];
  }

  RadialFunction h_;
  int dim_;
  double support_;
  double power_;
  double dx_;
  std::vector<double> prim_;
  std::vector<double> deriv_;
};

/// (1 / w_j) int_{cell j} omega s^{N-1} mean(r, s) ds, 8-point Gauss-Legendre on each half cell.
template <class Mean>
double cell_average(const Mean& mean, double r, const RadialGrid& g, Eigen::Index j) {
  const Eigen::Index last = g.size() - 1;
  const double lo = j == 0 ? 0.0 : g.faces(j - 1);
  const double hi = j == last ? g.r_max() : g.faces(j);
  auto integrand = [&](double s) { return g.omega * std::pow(s, g.dim - 1.0) * mean(r, s); };
  using GL = boost::math::quadrature::gauss<double, 8>;
  double acc = 0.0;
  if (g.nodes(j) > lo) acc += GL::integrate(integrand, lo, g.nodes(j));
  if (hi > g.nodes(j)) acc += GL::integrate(integrand, g.nodes(j), hi);
  return acc / g.weights(j);
}

enum class KernelKind { separable, radial_convolution, tabulated };

/// K(x,y) = a(|x|) b(|y|) on the grid.
struct RankOneFactors {
  Vector a;
  Vector b;
};

/// Sphere-averaged kernel Kbar(r_i, s_j) on the grid nodes, with the decomposition
/// Kbar = f(r_i) P(s_j)^{gamma/2} Qbar(r_i, s_j) and the bound M = max_i |Q(x_i, .)|_{2/(2-gamma)}.
class KernelTable {
 public:
  KernelTable(const KernelSpec& spec, const RadialGrid& grid, const Vector& f, const Vector& P, double gamma)
      : gamma_(gamma), p_(2.0 / (2.0 - gamma)), f_(f), p_half_gamma_(P.array().pow(0.5 * gamma).matrix()),
        weights_(grid.weights) {
    const Eigen::Index n = grid.size();
    if (const auto* sep = std::get_if<SeparableKernel>(&spec)) {
      kind_ = KernelKind::separable;
      q2_ = grid.sample(sep->q2);
      const Vector b = p_half_gamma_.cwiseProduct(q2_);
      table_.resize(n, n);
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) table_(i, j) = f_(i) * b(j);
      rank_one_ = RankOneFactors{f_, b};
    } else if (const auto* conv = std::get_if<RadialConvolutionKernel>(&spec)) {
      kind_ = KernelKind::radial_convolution;
      if (!(conv->support > 0.0)) throw InvalidKernel("convolution kernel support must be positive");
      g_mean_ = Eigen::MatrixXd::Zero(n, n);
      g_pow_mean_ = Eigen::MatrixXd::Zero(n, n);
      const SphereMeanTable mean(conv->g, grid.dim, conv->support, 1.0);
      const SphereMeanTable pow_mean(conv->g, grid.dim, conv->support, p_);
      for (Eigen::Index j = 0; j < n; ++j) {
        const double lo = j == 0 ? 0.0 : grid.faces(j - 1);
        const double hi = j == n - 1 ? grid.r_max() : grid.faces(j);
        for (Eigen::Index i = 0; i < n; ++i) {
          const double r = grid.nodes(i);
          if (r - hi >= conv->support || lo - r >= conv->support) continue;
          g_mean_(i, j) = cell_average(mean, r, grid, j);
          g_pow_mean_(i, j) = cell_average(pow_mean, r, grid, j);
        }
      }
      table_.resize(n, n);
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) table_(i, j) = f_(i) * (p_half_gamma_(j) * g_mean_(i, j));
    } else {
      kind_ = KernelKind::tabulated;
      table_ = std::get<TabulatedKernel>(spec).table;
      if (table_.rows() != n || table_.cols() != n)
        throw InvalidKernel("tabulated kernel is " + std::to_string(table_.rows()) + "x" +
                            std::to_string(table_.cols()) + ", grid has " + std::to_string(n) + " nodes");
    }
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        if (!(table_(i, j) >= 0.0) || !std::isfinite(table_(i, j)))
          throw InvalidKernel("kernel sample K(" + std::to_string(i) + "," + std::to_string(j) +
                              ") is negative or not finite");
    compute_bound();
  }

  KernelKind kind() const { return kind_; }
  const Eigen::MatrixXd& values() const { return table_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return table_(i, j); }
  const std::optional<RankOneFactors>& rank_one() const { return rank_one_; }
  double gamma() const { return gamma_; }
  /// Hoelder exponent 2 / (2 - gamma) of the Q-norm.
  double exponent() const { return p_; }
  /// M = max over nodes x_i of (sum_j w_j mean(Q(x_i, .)^p))^{1/p}.
  double bound() const { return bound_; }

  /// Qbar(r_i, s_j), the factor left after dividing out f(r_i) P(s_j)^{gamma/2}.
  double q_mean(Eigen::Index i, Eigen::Index j) const {
    switch (kind_) {
      case KernelKind::separable: return q2_(j);
      case KernelKind::radial_convolution: return g_mean_(i, j);
      case KernelKind::tabulated: break;
    }
    const double denom = f_(i) * p_half_gamma_(j);
    return denom > 0.0 ? table_(i, j) / denom : 0.0;
  }

  /// Sphere mean of Q(x, y)^p for |x| = r_i, |y| = s_j.
  double q_pow_mean(Eigen::Index i, Eigen::Index j) const {
    switch (kind_) {
      case KernelKind::separable: return std::pow(q2_(j), p_);
      case KernelKind::radial_convolution: return g_pow_mean_(i, j);
      case KernelKind::tabulated: break;
    }
    return std::pow(q_mean(i, j), p_);
  }

  /// f(r_i) P(s_j)^{gamma/2} Qbar(r_i, s_j), recomputed from the decomposition.
  double dominating_value(Eigen::Index i, Eigen::Index j) const { return f_(i) * (p_half_gamma_(j) * q_mean(i, j)); }

  /// int_{|y| <= L} mean Q(x_i, y)^p dy for one node x_i.
  double local_q_mass(Eigen::Index i, double ball_radius, const Vector& nodes) const {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < nodes.size() && nodes(j) <= ball_radius; ++j) acc += weights_(j) * q_pow_mean(i, j);
    return acc;
  }

 private:
  void compute_bound() {
    bound_ = 0.0;
    const Eigen::Index n = table_.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) acc += weights_(j) * q_pow_mean(i, j);
      bound_ = std::max(bound_, std::pow(acc, 1.0 / p_));
    }
  }

  KernelKind kind_ = KernelKind::separable;
  double gamma_;
  double p_;
  Vector f_;
  Vector p_half_gamma_;
  Vector weights_;
  Vector q2_;
  Eigen::MatrixXd g_mean_;
  Eigen::MatrixXd g_pow_mean_;
  Eigen::MatrixXd table_;
  std::optional<RankOneFactors> rank_one_;
  double bound_ = 0.0;
};

}  // namespace nlbif
