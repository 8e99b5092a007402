#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nlbif/discretization.hpp"
#include "nlbif/error.hpp"
#include "nlbif/grid.hpp"
#include "nlbif/nonlocal.hpp"
#include "nlbif/spectral.hpp"
#include "nlbif/tridiagonal.hpp"

namespace nlbif {

/// A u + phi_u u - lambda f u
inline Field residual(double lambda, const Field& u, const Discretization& d) {
  const Vector phi = phi_eval(u, d).phi.values;
  return u.with_values(d.laplacian().apply(u.values) + phi.cwiseProduct(u.values) -
                       lambda * d.f().cwiseProduct(u.values));
}

/// G(v): the decaying solution of -Lap u = -phi_v v.
inline Field apply_G(const Field& v, const Discretization& d) {
  const Vector phi = phi_eval(v, d).phi.values;
  return v.with_values(d.laplacian().solve(-phi.cwiseProduct(v.values)));
}

/// Jacobian of the residual in u, applied to v.
inline Vector jacobian_apply(double lambda, const Vector& u, const Vector& v, const Discretization& d) {
  const Field uf = d.field(u);
  const Vector phi = phi_eval(uf, d).phi.values;
  const Vector dphi = d.kernel().values() * phi_derivative_weights(u, d).cwiseProduct(v);
  return d.laplacian().apply(v) + phi.cwiseProduct(v) + u.cwiseProduct(dphi) - lambda * d.f().cwiseProduct(v);
}

/// Factorized Jacobian J = T + diag(u) Kbar diag(dw), T = A + diag(phi_u - lambda f).
///
/// Rank-one kernels use Woodbury on T + sigma e_k e_k^T (T is singular exactly at a positive
/// solution, with u in its kernel); other kernels use a dense LU.
class JacobianSolver {
 public:
  JacobianSolver(double lambda, const Vector& u, const Discretization& d) {
    const Eigen::Index n = u.size();
    const Vector phi = phi_eval(d.field(u), d).phi.values;
    const Vector dw = phi_derivative_weights(u, d);
    Tridiagonal T = d.laplacian().matrix();
    T.diag += phi - lambda * d.f();

    if (const auto& r1 = d.kernel().rank_one()) {
      rank_one_ = true;
      Eigen::Index k = 0;
      u.cwiseAbs().maxCoeff(&k);
      const double sigma = std::max(std::abs(T.diag(k)), 1.0);
      Tridiagonal shifted = T;
      shifted.diag(k) += sigma;
      tri_ = TridiagonalLU(shifted);
      Eigen::MatrixXd U(n, 2), C = Eigen::MatrixXd::Zero(n, 2);
      U.col(0) = u.cwiseProduct(r1->a);
      U.col(1) = Vector::Unit(n, k);
      C.col(0) = r1->b.cwiseProduct(dw);
      C(k, 1) = -sigma;
      Z_.resize(n, 2);
      Z_.col(0) = tri_.solve(U.col(0));
      Z_.col(1) = tri_.solve(U.col(1));
      C_ = C;
      const Eigen::Matrix2d cap = Eigen::Matrix2d::Identity() + C.transpose() * Z_;
      const double det = cap.determinant();
      const double scale = cap.cwiseAbs().maxCoeff();
      if (!(std::abs(det) > 1e-14 * scale * scale)) throw SingularSystem("Jacobian is singular");
      cap_inv_ = cap.inverse();
    } else {
      Eigen::MatrixXd J = T.dense();
      J.noalias() += u.asDiagonal() * d.kernel().values() * dw.asDiagonal();
      lu_ = Eigen::PartialPivLU<Eigen::MatrixXd>(J);
      if (!std::isfinite(lu_.matrixLU().diagonal().cwiseAbs().minCoeff()) ||
          lu_.matrixLU().diagonal().cwiseAbs().minCoeff() == 0.0)
        throw SingularSystem("Jacobian is singular");
    }
  }

  Vector solve(const Vector& rhs) const {
    Vector x;
    if (rank_one_) {
      const Vector y = tri_.solve(rhs);
      x = y - Z_ * (cap_inv_ * (C_.transpose() * y));
    } else {
      x = lu_.solve(rhs);
    }
    if (!x.allFinite()) throw SingularSystem("Jacobian solve produced non-finite values");
    return x;
  }

 private:
  bool rank_one_ = false;
  TridiagonalLU tri_;
  Eigen::MatrixXd Z_;
  Eigen::MatrixXd C_;
  Eigen::Matrix2d cap_inv_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

struct LambdaIdentity {
  /// sum w phi_u u phi1 / sum w f u phi1
  double ratio = 0.0;
  /// |(lambda - lambda1) - ratio| / |lambda - lambda1|
  double residual = 0.0;
};

/// Testing the equation against phi1: lambda - lambda1 = <phi_u u, phi1> / <f u, phi1>.
inline LambdaIdentity lambda_identity(double lambda, const Field& u, const EigenPair& eig, const Discretization& d) {
  const Vector& w = d.grid().weights;
  const Vector& p1 = eig.phi1.values;
  const Vector phi = phi_eval(u, d).phi.values;
  const double num = w.dot(phi.cwiseProduct(u.values).cwiseProduct(p1));
  const double den = w.dot(d.f().cwiseProduct(u.values).cwiseProduct(p1));
  LambdaIdentity out;
  out.ratio = den != 0.0 ? num / den : 0.0;
  const double gap = lambda - eig.lambda1;
  out.residual = std::abs(gap - out.ratio) / std::max(std::abs(gap), std::numeric_limits<double>::min());
  return out;
}

struct BranchPoint {
  double lambda = 0.0;
  Field u;
  double sup_norm = 0.0;
  double d12_norm = 0.0;
  double identity_residual = std::numeric_limits<double>::quiet_NaN();
  bool positive = false;
  /// |A^{-1} R|_inf at acceptance
  double residual = 0.0;
};

inline BranchPoint make_branch_point(double lambda, Field u, const Discretization& d, const EigenPair* eig) {
  BranchPoint p;
  p.lambda = lambda;
  const FieldNorms nrm = norms(u, d.P());
  p.sup_norm = nrm.sup;
  p.d12_norm = nrm.d12;
  p.positive = u.values.minCoeff() > 0.0;
  p.residual = d.laplacian().solve(residual(lambda, u, d).values).cwiseAbs().maxCoeff();
  if (eig) p.identity_residual = lambda_identity(lambda, u, *eig, d).residual;
  p.u = std::move(u);
  return p;
}

enum class NewtonStatus { positive, trivial, sign_failure, iteration_limit, singular };

inline const char* to_string(NewtonStatus s) {
  switch (s) {
    case NewtonStatus::positive: return "positive";
    case NewtonStatus::trivial: return "trivial";
    case NewtonStatus::sign_failure: return "sign_failure";
    case NewtonStatus::iteration_limit: return "iteration_limit";
    case NewtonStatus::singular: return "singular";
  }
  return "?";
}

struct NewtonOptions {
  /// Converged when the Newton step is below tol * |u|_inf.
  double tol = 1e-11;
  int max_iter = 200;
  /// |u|_inf below this is reported as the trivial solution.
  double trivial_threshold = 1e-10;
};

struct NewtonResult {
  NewtonStatus status = NewtonStatus::iteration_limit;
  BranchPoint point;
  int iterations = 0;
  /// |A^{-1} R|_inf per iteration
  std::vector<double> history;
};

/// Newton iteration on the positive cone: iterates are projected onto u >= 0 and damped by
/// backtracking on |A^{-1} R|_inf.
inline NewtonResult newton_solve(double lambda, const Field& u0, const Discretization& d, const NewtonOptions& opt = {},
                                 const EigenPair* eig = nullptr) {
  if (u0.values.minCoeff() < 0.0) throw Error("newton_solve: initial guess must be nonnegative");
  auto merit = [&](const Vector& v) {
    return d.laplacian().solve(residual(lambda, d.field(v), d).values).cwiseAbs().maxCoeff();
  };
  NewtonResult out;
  Vector u = u0.values;
  double m = merit(u);
  out.history.push_back(m);
  for (int it = 0; it < opt.max_iter; ++it) {
    out.iterations = it + 1;
    const double usup = u.cwiseAbs().maxCoeff();
    if (usup < opt.trivial_threshold) {
      out.status = NewtonStatus::trivial;
      out.point = make_branch_point(lambda, d.field(u), d, nullptr);
      return out;
    }
    Vector step;
    try {
      const JacobianSolver J(lambda, u, d);
      step = -J.solve(residual(lambda, d.field(u), d).values);
    } catch (const SingularSystem&) {
      out.status = NewtonStatus::singular;
      out.point = make_branch_point(lambda, d.field(u), d, nullptr);
      return out;
    }
    const double ssup = step.cwiseAbs().maxCoeff();
    if (ssup <= opt.tol * usup) {
      u = (u + step).cwiseMax(0.0);
      out.history.push_back(merit(u));
      out.point = make_branch_point(lambda, d.field(u), d, eig);
      out.status = out.point.positive ? NewtonStatus::positive : NewtonStatus::sign_failure;
      return out;
    }
    double alpha = 1.0;
    Vector cand;
    double mc = 0.0;
    for (;;) {
      cand = (u + alpha * step).cwiseMax(0.0);
      mc = merit(cand);
      if (mc <= (1.0 - 1e-4 * alpha) * m || alpha < 1.0 / 64) break;
      alpha *= 0.5;
    }
    u = std::move(cand);
    m = mc;
    out.history.push_back(m);
  }
  out.status = u.cwiseAbs().maxCoeff() < opt.trivial_threshold ? NewtonStatus::trivial : NewtonStatus::iteration_limit;
  out.point = make_branch_point(lambda, d.field(u), d, nullptr);
  return out;
}

/// Raised when continuation cannot leave the trivial branch.
class SeedFailure : public Error {
 public:
  SeedFailure(const std::string& what, std::vector<double> history) : Error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

enum class Termination { max_amplitude, max_lambda, step_failure };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::max_amplitude: return "maxAmplitude";
    case Termination::max_lambda: return "maxLambda";
    case Termination::step_failure: return "stepFailure";
  }
  return "?";
}

struct Branch {
  std::vector<BranchPoint> points;
  double start_lambda = 0.0;
  Termination termination = Termination::step_failure;

  /// |u|_inf at lambda by linear interpolation through (lambda1, 0) and the accepted points.
  double amplitude_at(double lambda) const {
    double l0 = start_lambda, a0 = 0.0;
    if (lambda <= l0) return 0.0;
    for (const auto& p : points) {
      if (lambda <= p.lambda) return a0 + (p.sup_norm - a0) * (lambda - l0) / (p.lambda - l0);
      l0 = p.lambda;
      a0 = p.sup_norm;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }
};

struct ContinuationOptions {
  double lambda_max = std::numeric_limits<double>::infinity();
  double amp_max = std::numeric_limits<double>::infinity();
  /// Largest arclength step.
  double ds = 0.1;
  double ds_min = 1e-6;
  double growth = 1.5;
  /// Seed at lambda1 * (1 + seed_offset).
  double seed_offset = 1e-3;
  double identity_tol = 1e-6;
  int max_points = 5000;
  int max_corrector_iter = 12;
  NewtonOptions newton;
};

namespace detail {

/// Unit tangent (z, 1)/|.| with J z = f u, in the norm s^2 |u|_{2,P}^2 + lambda^2.
inline std::pair<Vector, double> branch_tangent(double lambda, const Vector& u, const Discretization& d, double s2) {
  const JacobianSolver J(lambda, u, d);
  Vector z = J.solve(d.f().cwiseProduct(u));
  const double nrm = std::sqrt(s2 * d.grid().weights.dot(d.P().cwiseProduct(z.cwiseAbs2())) + 1.0);
  return {z / nrm, 1.0 / nrm};
}

}  // namespace detail

/// Traces the positive branch from (lambda1, 0): seed from the linearization u ~ t phi1 with
/// t^gamma = (lambda - lambda1) <f phi1, phi1> / <phi_{phi1} phi1, phi1>, then pseudo-arclength
/// predictor-corrector in (u, lambda) with u measured in |.|_{2,P} / |phi1|_{2,P}.
inline Branch branch_continue(const Discretization& d, const EigenPair& eig, const ContinuationOptions& opt) {
  if (!(opt.ds > 0.0)) throw Error("branch_continue: ds must be positive");
  const Vector& w = d.grid().weights;
  const Vector& P = d.P();
  const Vector& phi1 = eig.phi1.values;
  const double g = d.gamma();
  const double s2 = 1.0 / w.dot(P.cwiseProduct(phi1.cwiseAbs2()));
  auto pdot = [&](const Vector& a, const Vector& b) { return s2 * w.dot(P.cwiseProduct(a).cwiseProduct(b)); };

  Branch br;
  br.start_lambda = eig.lambda1;

  // seed
  const double dl = opt.seed_offset * eig.lambda1;
  const Vector phi_phi1 = phi_eval(eig.phi1, d).phi.values;
  const double c = d.f_inner(phi1, phi1) / w.dot(phi_phi1.cwiseProduct(phi1).cwiseProduct(phi1));
  const double t = std::pow(dl * c, 1.0 / g);
  NewtonResult seed = newton_solve(eig.lambda1 + dl, eig.phi1.with_values(t * phi1), d, opt.newton, &eig);
  if (seed.status != NewtonStatus::positive)
    throw SeedFailure(std::string("branch seed failed: ") + to_string(seed.status), seed.history);
  br.points.push_back(seed.point);

  double lam = seed.point.lambda;
  Vector u = seed.point.u.values;
  auto [tu, tl] = detail::branch_tangent(lam, u, d, s2);
  if (tl < 0.0) {
    tu = -tu;
    tl = -tl;
  }
  double ds = std::min(opt.ds, 2.0 * std::sqrt(pdot(u, u) + dl * dl));

  auto accept = [&](double lnew, Vector unew) -> bool {
    BranchPoint p = make_branch_point(lnew, d.field(std::move(unew)), d, &eig);
    if (!p.positive || !(p.identity_residual <= opt.identity_tol)) return false;
    br.points.push_back(std::move(p));
    return true;
  };

  while (static_cast<int>(br.points.size()) < opt.max_points) {
    if (br.points.back().sup_norm >= opt.amp_max) {
      br.termination = Termination::max_amplitude;
      return br;
    }
    if (ds < opt.ds_min) {
      br.termination = Termination::step_failure;
      return br;
    }
    Vector up = u + ds * tu;
    double lp = lam + ds * tl;

    if (lp >= opt.lambda_max) {
      const NewtonResult last = newton_solve(opt.lambda_max, d.field(up.cwiseMax(0.0)), d, opt.newton, &eig);
      if (last.status == NewtonStatus::positive && accept(opt.lambda_max, last.point.u.values)) {
        br.termination = Termination::max_lambda;
        return br;
      }
      ds *= 0.5;
      continue;
    }

    bool converged = false, failed = false;
    int iters = 0;
    Vector uc = up;
    double lc = lp;
    try {
      for (; iters < opt.max_corrector_iter; ++iters) {
        const Vector R = residual(lc, d.field(uc), d).values;
        const double gap = pdot(tu, uc - u) + tl * (lc - lam) - ds;
        const JacobianSolver J(lc, uc, d);
        const Vector y = J.solve(-R);
        const Vector z = J.solve(d.f().cwiseProduct(uc));
        const double dlam = (-gap - pdot(tu, y)) / (pdot(tu, z) + tl);
        const Vector du = y + dlam * z;
        uc += du;
        lc += dlam;
        if (!(uc.minCoeff() > 0.0)) {
          failed = true;
          break;
        }
        if (du.cwiseAbs().maxCoeff() <= opt.newton.tol * uc.cwiseAbs().maxCoeff() &&
            std::abs(dlam) <= opt.newton.tol * std::abs(lc)) {
          converged = true;
          ++iters;
          break;
        }
      }
    } catch (const SingularSystem&) {
      failed = true;
    }

    if (!converged || failed || lc > opt.lambda_max || !accept(lc, uc)) {
      ds *= 0.5;
      continue;
    }

    auto [nu, nl] = detail::branch_tangent(lc, uc, d, s2);
    if (pdot(nu, tu) + nl * tl < 0.0) {
      nu = -nu;
      nl = -nl;
    }
    tu = std::move(nu);
    tl = nl;
    u = std::move(uc);
    lam = lc;
    if (iters <= 3) ds = std::min(ds * opt.growth, opt.ds);
  }
  br.termination = Termination::step_failure;
  return br;
}

/// Independent Newton solves on a list of lambda values, each seeded from the linearization.
inline std::vector<NewtonResult> lambda_sweep(const Discretization& d, const EigenPair& eig,
                                              const std::vector<double>& lambdas, const NewtonOptions& opt = {}) {
  const Vector& w = d.grid().weights;
  const Vector& phi1 = eig.phi1.values;
  const Vector phi_phi1 = phi_eval(eig.phi1, d).phi.values;
  const double c = d.f_inner(phi1, phi1) / w.dot(phi_phi1.cwiseProduct(phi1).cwiseProduct(phi1));
  std::vector<NewtonResult> out;
  for (double lam : lambdas) {
    const double gap = std::max(lam - eig.lambda1, 0.0);
    const double t = std::pow(gap * c, 1.0 / d.gamma());
    out.push_back(newton_solve(lam, eig.phi1.with_values(t * phi1), d, opt, &eig));
  }
  return out;
}

struct AprioriBounds {
  /// max ||u||_{1,2} over points with lambda <= cap
  double r_d12 = 0.0;
  /// max |u|_inf / |u|_{2*} over the same points
  double r_sup = 0.0;
};

inline AprioriBounds apriori_check(const Branch& br, double lambda_cap) {
  AprioriBounds out;
  for (const auto& p : br.points) {
    if (p.lambda > lambda_cap) continue;
    const RadialGrid& g = *p.u.grid;
    const double crit = 2.0 * g.dim / (g.dim - 2.0);
    const double l2star = std::pow(g.weights.dot(p.u.values.cwiseAbs().array().pow(crit).matrix()), 1.0 / crit);
    out.r_d12 = std::max(out.r_d12, p.d12_norm);
    if (l2star > 0.0) out.r_sup = std::max(out.r_sup, p.sup_norm / l2star);
  }
  return out;
}

}  // namespace nlbif
