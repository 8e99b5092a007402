#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlbif/error.hpp"

namespace nlbif {

/// A named scalar profile r -> h(r) on [0, inf).
///
/// Built-in profiles (r scaled by `length`):
///   "inv_quad_sq"   (1 + r^2)^-2
///   "inv_quad_sqrt" (1 + r^2)^-1/2
///   "exp"           e^-r
///   "gaussian"      e^-r^2
///   "one"           1
///   "zero"          0
/// Tabulated profiles interpolate linearly and must cover every point they are evaluated at.
class RadialFunction {
 public:
  RadialFunction() : RadialFunction("zero", [](double) { return 0.0; }) {}
  RadialFunction(std::string name, std::function<double(double)> fn)
      : name_(std::move(name)), fn_(std::make_shared<std::function<double(double)>>(std::move(fn))) {}

  double operator()(double r) const { return (*fn_)(r); }
  const std::string& name() const noexcept { return name_; }

  /// c * h(r)
  RadialFunction scaled(double c) const {
    auto inner = fn_;
    return {name_ + "*" + format_number(c), [inner, c](double r) { return c * (*inner)(r); }};
  }

  /// h(r)^p
  RadialFunction pow(double p) const {
    if (p == 1.0) return *this;
    auto inner = fn_;
    return {name_ + "^" + format_number(p), [inner, p](double r) { return std::pow((*inner)(r), p); }};
  }

  static RadialFunction builtin(std::string_view name, double length = 1.0) {
    if (!(length > 0.0)) throw ConfigError("radial function length must be positive");
    const double L = length;
    std::string label(name);
    if (L != 1.0) label += "(r/" + format_number(L) + ")";
    if (name == "inv_quad_sq")
      return {label, [L](double r) {
                const double s = 1.0 + (r / L) * (r / L);
                return 1.0 / (s * s);
              }};
    if (name == "inv_quad_sqrt")
      return {label, [L](double r) { return 1.0 / std::sqrt(1.0 + (r / L) * (r / L)); }};
    if (name == "exp") return {label, [L](double r) { return std::exp(-r / L); }};
    if (name == "gaussian") return {label, [L](double r) { return std::exp(-(r / L) * (r / L)); }};
    if (name == "one") return {label, [](double) { return 1.0; }};
    if (name == "zero") return {label, [](double) { return 0.0; }};
    throw ConfigError("unknown built-in radial function '" + std::string(name) + "'");
  }

  static RadialFunction tabulated(std::vector<double> r, std::vector<double> v) {
    if (r.size() != v.size() || r.size() < 2)
      throw ConfigError("tabulated profile needs matching r/values arrays with at least 2 samples");
    for (std::size_t i = 1; i < r.size(); ++i)
      if (!(r[i] > r[i - 1])) throw ConfigError("tabulated profile abscissae must be strictly increasing");
    auto rs = std::make_shared<const std::vector<double>>(std::move(r));
    auto vs = std::make_shared<const std::vector<double>>(std::move(v));
    return {"tabulated", [rs, vs](double x) {
              const auto& R = *rs;
              const double tol = 1e-12 * std::max(1.0, R.back());
              if (x < R.front() - tol || x > R.back() + tol)
                throw ConfigError("tabulated profile evaluated outside its range at r=" + format_number(x));
              auto it = std::upper_bound(R.begin(), R.end(), x);
              std::size_t hi = std::clamp<std::size_t>(it - R.begin(), 1, R.size() - 1);
              std::size_t lo = hi - 1;
              const double t = std::clamp((x - R[lo]) / (R[hi] - R[lo]), 0.0, 1.0);
              return (1.0 - t) * (*vs)[lo] + t * (*vs)[hi];
            }};
  }

 private:
  static std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
  }

  std::string name_;
  std::shared_ptr<std::function<double(double)>> fn_;
};

}  // namespace nlbif
