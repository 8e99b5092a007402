#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "nlbif/error.hpp"

namespace nlbif {

using Vector = Eigen::VectorXd;

/// Tridiagonal matrix stored by diagonals: lower(i) = A(i+1, i), upper(i) = A(i, i+1).
struct Tridiagonal {
  Vector lower;
  Vector diag;
  Vector upper;

  Eigen::Index size() const { return diag.size(); }

  Vector multiply(const Vector& x) const {
    const Eigen::Index n = size();
    Vector y = diag.cwiseProduct(x);
    if (n > 1) {
      y.head(n - 1) += upper.cwiseProduct(x.tail(n - 1));
      y.tail(n - 1) += lower.cwiseProduct(x.head(n - 1));
    }
    return y;
  }

  Eigen::MatrixXd dense() const {
    const Eigen::Index n = size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      m(i, i) = diag(i);
      if (i + 1 < n) {
        m(i, i + 1) = upper(i);
        m(i + 1, i) = lower(i);
      }
    }
    return m;
  }
};

/// LU factorization with partial pivoting of a tridiagonal matrix (the gttrf/gttrs scheme).
class TridiagonalLU {
 public:
  TridiagonalLU() = default;

  explicit TridiagonalLU(const Tridiagonal& a)
      : dl_(a.lower), d_(a.diag), du_(a.upper), pivot_(static_cast<std::size_t>(a.size())) {
    const Eigen::Index n = d_.size();
    if (n == 0) return;
    du2_ = Vector::Zero(std::max<Eigen::Index>(n - 2, 0));
    for (Eigen::Index i = 0; i < n; ++i) pivot_[i] = i;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      if (std::abs(d_(i)) >= std::abs(dl_(i))) {
        if (d_(i) == 0.0) throw SingularSystem("tridiagonal factorization hit a zero pivot");
        const double fact = dl_(i) / d_(i);
        dl_(i) = fact;
        d_(i + 1) -= fact * du_(i);
      } else {
        const double fact = d_(i) / dl_(i);
        d_(i) = dl_(i);
        dl_(i) = fact;
        const double temp = du_(i);
        du_(i) = d_(i + 1);
        d_(i + 1) = temp - fact * d_(i + 1);
        if (i + 2 < n) {
          du2_(i) = du_(i + 1);
          du_(i + 1) = -fact * du_(i + 1);
        }
        pivot_[i] = i + 1;
      }
    }
    for (Eigen::Index i = 0; i < n; ++i)
      if (d_(i) == 0.0 || !std::isfinite(d_(i))) throw SingularSystem("tridiagonal matrix is singular");
  }

  Vector solve(Vector b) const {
    const Eigen::Index n = d_.size();
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      if (pivot_[i] == i) {
        b(i + 1) -= dl_(i) * b(i);
      } else {
        const double temp = b(i) - dl_(i) * b(i + 1);
        b(i) = b(i + 1);
        b(i + 1) = temp;
      }
    }
    b(n - 1) /= d_(n - 1);
    if (n > 1) b(n - 2) = (b(n - 2) - du_(n - 2) * b(n - 1)) / d_(n - 2);
    for (Eigen::Index i = n - 3; i >= 0; --i) b(i) = (b(i) - du_(i) * b(i + 1) - du2_(i) * b(i + 2)) / d_(i);
    return b;
  }

 private:
  Vector dl_, d_, du_, du2_;
  std::vector<Eigen::Index> pivot_;
};

}  // namespace nlbif
