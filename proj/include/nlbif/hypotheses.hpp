#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "nlbif/discretization.hpp"
#include "nlbif/error.hpp"

namespace nlbif {

enum class HypothesisStatus { pass, fail, relaxed };

inline const char* to_string(HypothesisStatus s) {
  switch (s) {
    case HypothesisStatus::pass: return "pass";
    case HypothesisStatus::fail: return "fail";
    case HypothesisStatus::relaxed: return "relaxed";
  }
  return "?";
}

struct HypothesisResult {
  std::string name;
  HypothesisStatus status = HypothesisStatus::pass;
  double measured = 0.0;
  std::string detail;
};

struct HypothesisReport {
  std::vector<HypothesisResult> results;
  /// (R, eps(R)) for the (Q2) profile at fixed L.
  std::vector<std::pair<double, double>> q2_profile;
  double bound_M = 0.0;

  const HypothesisResult& at(const std::string& name) const {
    for (const auto& r : results)
      if (r.name == name) return r;
    throw Error("no hypothesis named " + name);
  }
  /// True when nothing failed; relaxed entries are warnings.
  bool acceptable() const {
    return std::none_of(results.begin(), results.end(),
                        [](const auto& r) { return r.status == HypothesisStatus::fail; });
  }
};

/// Fraction of the sphere |y| = s lying inside the ball B_rho(x), |x| = c.
inline double sphere_fraction_in_ball(double s, double c, double rho, int dim) {
  if (s == 0.0) return c < rho ? 1.0 : 0.0;
  if (c == 0.0) return s < rho ? 1.0 : 0.0;
  const double t0 = (s * s + c * c - rho * rho) / (2.0 * s * c);  // cos(theta) threshold
  if (t0 <= -1.0) return 1.0;
  if (t0 >= 1.0) return 0.0;
  if (dim == 3) return 0.5 * (1.0 - t0);
  const double e = 0.5 * (dim - 3);
  auto density = [e](double t) { return std::pow(std::max(0.0, 1.0 - t * t), e); };
  using GL = boost::math::quadrature::gauss<double, 32>;
  return GL::integrate(density, t0, 1.0) / GL::integrate(density, -1.0, 1.0);
}

struct HypothesisOptions {
  /// Ball radius L for the (Q2) profile.
  double q2_ball = 1.0;
  /// (Q2) passes when eps at the outermost profile radius is below this fraction of eps(0).
  double q2_decay = 1e-6;
  /// (K1) is tested on the product of balls of this radius about the origin.
  double k1_radius = 1.0;
};

/// Numerical check of the standing hypotheses on the grid samples.
/// Throws InvalidInstance when f or P is not positive at a node.
inline HypothesisReport validate_hypotheses(const Discretization& d, double tol = 1e-12,
                                            const HypothesisOptions& opt = {}) {
  const RadialGrid& g = d.grid();
  const Vector& f = d.f();
  const Vector& P = d.P();
  const KernelTable& K = d.kernel();
  const Eigen::Index n = g.size();
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(f(i) > 0.0) || !(P(i) > 0.0))
      throw InvalidInstance("f and P must be positive; violated at r=" + std::to_string(g.nodes(i)));

  HypothesisReport rep;
  rep.bound_M = K.bound();

  // (f1) 0 < f <= P
  {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) worst = std::max(worst, f(i) / P(i));
    rep.results.push_back({"f1", worst <= 1.0 + tol ? HypothesisStatus::pass : HypothesisStatus::fail, worst,
                           "max f/P over nodes"});
  }

  // (f2) q > N/2 and sup_x |f|_{L^q(B_2(x))} finite
  {
    const double q = d.spec().f.q;
    double worst = 0.0;
    for (Eigen::Index c = 0; c < n; ++c) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (std::abs(g.nodes(j) - g.nodes(c)) >= 2.0) continue;
        acc += g.weights(j) * std::pow(f(j), q) * sphere_fraction_in_ball(g.nodes(j), g.nodes(c), 2.0, g.dim);
      }
      worst = std::max(worst, std::pow(acc, 1.0 / q));
    }
    const bool ok = q > 0.5 * g.dim && std::isfinite(worst);
    rep.results.push_back({"f2", ok ? HypothesisStatus::pass : HypothesisStatus::fail, worst,
                           "sup over centers of |f|_{L^q(B_2(x))}, q=" + std::to_string(q)});
  }

  // (K0) 0 <= K <= f P^{g/2} Q
  {
    double excess = 0.0;
    double min_k = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) {
        min_k = std::min(min_k, K(i, j));
        const double dom = K.dominating_value(i, j);
        excess = std::max(excess, (K(i, j) - dom) / std::max(dom, std::numeric_limits<double>::min()));
      }
    const bool ok = min_k >= 0.0 && excess <= tol;
    rep.results.push_back({"K0", ok ? HypothesisStatus::pass : HypothesisStatus::fail, excess,
                           "max relative excess of K over f P^{g/2} Q"});
  }

  // (Q1) M finite
  rep.results.push_back({"Q1", std::isfinite(K.bound()) ? HypothesisStatus::pass : HypothesisStatus::fail, K.bound(),
                         "M = max_x |Q(x,.)|_{2/(2-g)}"});

  // (Q2) eps(R) = sup_{|x| >= R} int_{|y|<=L} Q^p, profile over R
  {
    std::vector<double> per_node(n);
    for (Eigen::Index i = 0; i < n; ++i) per_node[i] = K.local_q_mass(i, opt.q2_ball, g.nodes);
    std::vector<double> suffix_max(n);
    double run = 0.0;
    for (Eigen::Index i = n - 1; i >= 0; --i) suffix_max[i] = run = std::max(run, per_node[i]);
    for (double frac : {0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 0.9}) {
      const double R = frac * g.r_max();
      const auto it = std::lower_bound(g.nodes.data(), g.nodes.data() + n, R);
      rep.q2_profile.emplace_back(R, suffix_max[static_cast<std::size_t>(it - g.nodes.data())]);
    }
    const double e0 = rep.q2_profile.front().second;
    const double elast = rep.q2_profile.back().second;
    const double ratio = e0 > 0.0 ? elast / e0 : 0.0;
    rep.results.push_back({"Q2", ratio <= opt.q2_decay ? HypothesisStatus::pass : HypothesisStatus::relaxed, ratio,
                           "eps(0.9 R_max)/eps(0) at L=" + std::to_string(opt.q2_ball)});
  }

  // (K1) sufficient condition: K > 0 on B_rho x B_rho
  {
    double min_k = std::numeric_limits<double>::infinity();
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < n && g.nodes(i) <= opt.k1_radius; ++i, ++count)
      for (Eigen::Index j = 0; j < n && g.nodes(j) <= opt.k1_radius; ++j) min_k = std::min(min_k, K(i, j));
    const bool ok = count >= 2 && min_k > 0.0;
    rep.results.push_back({"K1", ok ? HypothesisStatus::pass : HypothesisStatus::fail, ok ? min_k : 0.0,
                           "heuristic: min K on B_rho x B_rho, rho=" + std::to_string(opt.k1_radius)});
  }

  // q > N/2 reported separately from the local bound
  rep.results.push_back({"q_exponent", d.spec().f.q > 0.5 * g.dim ? HypothesisStatus::pass : HypothesisStatus::fail,
                         d.spec().f.q, "q > N/2"});
  return rep;
}

}  // namespace nlbif
