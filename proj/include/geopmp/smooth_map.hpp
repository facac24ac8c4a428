#pragma once

#include "geopmp/manifold.hpp"

#include <functional>
#include <optional>
#include <random>
#include <string>

namespace geopmp {

/// A C^1 map (x, u) -> R^k written in ambient coordinates, so it is already
/// an extension of the map on M to a neighbourhood in R^N.
///
/// Jacobians come from the analytic callbacks when present, otherwise from
/// central differences with step fd_step * (1 + |arg|).
class SmoothMap {
 public:
  using Eval = std::function<Vec(const Vec& x, const Vec& u)>;
  using Jac = std::function<Mat(const Vec& x, const Vec& u)>;

  SmoothMap() = default;
  SmoothMap(int state_dim, int control_dim, int out_dim, Eval f, Jac jac_x = {},
            Jac jac_u = {}, std::string name = {});

  int state_dim() const { return state_dim_; }
  int control_dim() const { return control_dim_; }
  int out_dim() const { return out_dim_; }
  const std::string& name() const { return name_; }
  bool valid() const { return static_cast<bool>(f_); }

  Vec operator()(const Vec& x, const Vec& u) const;
  /// Convenience for scalar-valued maps.
  double scalar(const Vec& x, const Vec& u) const { return (*this)(x, u)(0); }

  Mat jacobian_state(const Vec& x, const Vec& u) const;
  Mat jacobian_control(const Vec& x, const Vec& u) const;
  Mat fd_jacobian_state(const Vec& x, const Vec& u) const;
  Mat fd_jacobian_control(const Vec& x, const Vec& u) const;

  bool has_analytic_state_jacobian() const { return static_cast<bool>(jac_x_); }
  bool has_analytic_control_jacobian() const { return static_cast<bool>(jac_u_); }

  double fd_step() const { return fd_step_; }
  SmoothMap& set_fd_step(double h) {
    fd_step_ = h;
    return *this;
  }
  bool finite_differences_enabled() const { return allow_fd_; }
  SmoothMap& set_finite_differences(bool enabled) {
    allow_fd_ = enabled;
    return *this;
  }

 private:
  int state_dim_ = 0;
  int control_dim_ = 0;
  int out_dim_ = 0;
  Eval f_;
  Jac jac_x_;
  Jac jac_u_;
  std::string name_;
  double fd_step_ = 1e-6;
  bool allow_fd_ = true;
};

/// T*f(p) w: J_x' w with w taken at its canonical representative, projected
/// onto T*_p M. Requires f(p, u) to sit on w's base manifold.
Covector cotangent_pullback(const SmoothMap& f, const ManifoldPoint& p, const Vec& u,
                            const Covector& w);

/// Pullback of a covector on R^k (constraint multipliers) through g(., u).
Covector cotangent_pullback(const SmoothMap& g, const ManifoldPoint& p, const Vec& u,
                            const Vec& w);

/// J_u' w: the control-side cotangent lift into (R^m)*.
Vec control_pullback(const SmoothMap& f, const ManifoldPoint& p, const Vec& u,
                     const Covector& w);

struct Differential {
  Covector state;
  Vec control;
};

/// (d_x c projected onto T*_p M, d_u c) for a scalar-valued map.
Differential differential(const SmoothMap& cost, const ManifoldPoint& p, const Vec& u);

struct JacobianCheck {
  double max_rel_error_state = 0.0;
  double max_rel_error_control = 0.0;
  int probes = 0;
  bool ok(double tol = 1e-5) const {
    return max_rel_error_state <= tol && max_rel_error_control <= tol;
  }
};

/// Relative error ||J - J_fd||_F / max(1, ||J_fd||_F).
double jacobian_rel_error(const Mat& analytic, const Mat& fd);

/// Compares analytic Jacobians against central differences at the supplied
/// probe points. Throws JacobianError if `enforce` and the error exceeds tol.
JacobianCheck validate_jacobians(const SmoothMap& f,
                                 const std::vector<std::pair<Vec, Vec>>& probes,
                                 double tol = 1e-5, bool enforce = true);

}  // namespace geopmp
