#pragma once

// Parameterized map families available to problem files. All carry analytic
// Jacobians so they can be validated against finite differences.

#include "geopmp/smooth_map.hpp"

namespace geopmp::builtin {

/// x' = A x + B u + c
SmoothMap linear_dynamics(const Mat& A, const Mat& B, const Vec& c);

/// On the circle in R^2: x' = Rot(w'u + offset) x.
SmoothMap planar_rotation(const Vec& w, double offset);

/// On SO(3) (column-major vec): R' = R Exp(hat(B u)).
SmoothMap so3_attitude(const Mat& B);

/// 0.5 (x-xr)'Q(x-xr) + 0.5 (u-ur)'R(u-ur) + q'x + r'u + x'S u + constant.
struct QuadraticCostParams {
  Mat Q;
  Mat R;
  Mat S;
  Vec q;
  Vec r;
  Vec x_ref;
  Vec u_ref;
  double constant = 0.0;

  static QuadraticCostParams zeros(int n, int m);
};

SmoothMap quadratic_cost(const QuadraticCostParams& p);

/// g(x) = G x - h, componentwise <= 0 is the constraint.
SmoothMap affine_constraint(const Mat& G, const Vec& h, int control_dim);

/// g_j(x) = 0.5 x'P_j x + a_j'x + b_j.
struct QuadraticRow {
  Mat P;
  Vec a;
  double b = 0.0;
};
SmoothMap quadratic_constraint(const std::vector<QuadraticRow>& rows, int state_dim,
                               int control_dim);

/// SO(3) exponential via Rodrigues' formula.
Eigen::Matrix3d so3_exp(const Eigen::Vector3d& w);
/// Right Jacobian of the SO(3) exponential.
Eigen::Matrix3d so3_right_jacobian(const Eigen::Vector3d& w);

}  // namespace geopmp::builtin
