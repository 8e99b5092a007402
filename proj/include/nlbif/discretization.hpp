#pragma once

#include <memory>
#include <utility>

#include "nlbif/error.hpp"
#include "nlbif/grid.hpp"
#include "nlbif/kernel_table.hpp"
#include "nlbif/model.hpp"

namespace nlbif {

/// A problem instance sampled on a radial grid: operator, f and P samples, kernel table.
/// Immutable after construction.
class Discretization {
 public:
  explicit Discretization(ProblemSpec spec) : Discretization(spec, spec.grid) {}

  Discretization(ProblemSpec spec, const GridParams& grid_params) : spec_(std::move(spec)) {
    spec_.check();
    spec_.grid = grid_params;
    grid_ = std::make_shared<const RadialGrid>(build_grid(spec_.dim, grid_params));
    laplacian_ = std::make_shared<const DiscreteLaplacian>(grid_);
    f_ = grid_->sample(spec_.f.eval);
    P_ = grid_->sample(spec_.P.eval);
    for (Eigen::Index i = 0; i < grid_->size(); ++i) {
      if (!(P_(i) > 0.0))
        throw InvalidInstance("P is not positive at r=" + std::to_string(grid_->nodes(i)));
      if (!(f_(i) > 0.0))
        throw InvalidInstance("f is not positive at r=" + std::to_string(grid_->nodes(i)));
    }
    kernel_ = std::make_shared<const KernelTable>(spec_.kernel, *grid_, f_, P_, spec_.gamma);
  }

  const ProblemSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim; }
  double gamma() const { return spec_.gamma; }
  const RadialGrid& grid() const { return *grid_; }
  const std::shared_ptr<const RadialGrid>& grid_ptr() const { return grid_; }
  const DiscreteLaplacian& laplacian() const { return *laplacian_; }
  const KernelTable& kernel() const { return *kernel_; }
  const Vector& f() const { return f_; }
  const Vector& P() const { return P_; }
  /// |P|_1 by the grid quadrature.
  double p_mass() const { return grid_->integrate(P_); }

  Field field(Vector v) const { return Field(grid_, std::move(v)); }
  Field zeros() const { return Field::zeros(grid_); }
  Field sample(const RadialFunction& h) const { return Field::sample(grid_, h); }

  /// sum_i w_i f_i a_i b_i
  double f_inner(const Vector& a, const Vector& b) const {
    return grid_->weights.dot(f_.cwiseProduct(a).cwiseProduct(b));
  }

 private:
  ProblemSpec spec_;
  std::shared_ptr<const RadialGrid> grid_;
  std::shared_ptr<const DiscreteLaplacian> laplacian_;
  Vector f_;
  Vector P_;
  std::shared_ptr<const KernelTable> kernel_;
};

}  // namespace nlbif
