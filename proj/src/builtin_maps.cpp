#include "geopmp/builtin_maps.hpp"

#include "geopmp/errors.hpp"

#include <cmath>

namespace geopmp::builtin {

namespace {

using Mat3 = Eigen::Matrix3d;

Eigen::Matrix2d rot2(double th) {
  Eigen::Matrix2d R;
  R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  return R;
}

Eigen::Matrix2d rot2_derivative(double th) {
  Eigen::Matrix2d D;
  D << -std::sin(th), -std::cos(th), std::cos(th), -std::sin(th);
  return D;
}

Vec vec9(const Mat3& R) {
  Vec v(9);
  Eigen::Map<Mat3>(v.data()) = R;
  return v;
}

}  // namespace

Mat3 so3_exp(const Eigen::Vector3d& w) {
  const double th = w.norm();
  const Mat3 K = hat(w);
  double a, b;
  if (th < 1e-6) {
    a = 1.0 - th * th / 6.0;
    b = 0.5 - th * th / 24.0;
  } else {
    a = std::sin(th) / th;
    b = (1.0 - std::cos(th)) / (th * th);
  }
  return Mat3::Identity() + a * K + b * K * K;
}

Mat3 so3_right_jacobian(const Eigen::Vector3d& w) {
  const double th = w.norm();
  const Mat3 K = hat(w);
  double a, b;
  if (th < 1e-5) {
    a = 0.5 - th * th / 24.0;
    b = 1.0 / 6.0 - th * th / 120.0;
  } else {
    a = (1.0 - std::cos(th)) / (th * th);
    b = (th - std::sin(th)) / (th * th * th);
  }
  return Mat3::Identity() - a * K + b * K * K;
}

SmoothMap linear_dynamics(const Mat& A, const Mat& B, const Vec& c) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || B.rows() != n || c.size() != n)
    throw DimensionError("linear dynamics: inconsistent A/B/c");
  const int m = static_cast<int>(B.cols());
  return SmoothMap(
      n, m, n, [A, B, c](const Vec& x, const Vec& u) -> Vec { return A * x + B * u + c; },
      [A](const Vec&, const Vec&) { return A; }, [B](const Vec&, const Vec&) { return B; },
      "linear");
}

SmoothMap planar_rotation(const Vec& w, double offset) {
  const int m = static_cast<int>(w.size());
  return SmoothMap(
      2, m, 2,
      [w, offset](const Vec& x, const Vec& u) -> Vec { return rot2(w.dot(u) + offset) * x; },
      [w, offset](const Vec&, const Vec& u) -> Mat { return rot2(w.dot(u) + offset); },
      [w, offset](const Vec& x, const Vec& u) -> Mat {
        return (rot2_derivative(w.dot(u) + offset) * x) * w.transpose();
      },
      "planar_rotation");
}

SmoothMap so3_attitude(const Mat& B) {
  if (B.rows() != 3) throw DimensionError("so3 attitude: B must have 3 rows");
  const int m = static_cast<int>(B.cols());
  return SmoothMap(
      9, m, 9,
      [B](const Vec& x, const Vec& u) -> Vec {
        const Mat3 R = Eigen::Map<const Mat3>(x.data());
        return vec9(R * so3_exp(B * u));
      },
      [B](const Vec&, const Vec& u) -> Mat {
        const Mat3 E = so3_exp(B * u);
        Mat J = Mat::Zero(9, 9);
        // vec(R E) = (E' kron I) vec(R)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) J.block<3, 3>(3 * i, 3 * j) = E(j, i) * Mat3::Identity();
        return J;
      },
      [B](const Vec& x, const Vec& u) -> Mat {
        const Mat3 R = Eigen::Map<const Mat3>(x.data());
        const Eigen::Vector3d w = B * u;
        const Mat3 RE = R * so3_exp(w);
        const Mat3 Jr = so3_right_jacobian(w);
        Mat J(9, B.cols());
        for (Eigen::Index k = 0; k < B.cols(); ++k) J.col(k) = vec9(RE * hat(Jr * B.col(k)));
        return J;
      },
      "so3_attitude");
}

QuadraticCostParams QuadraticCostParams::zeros(int n, int m) {
  QuadraticCostParams p;
  p.Q = Mat::Zero(n, n);
  p.R = Mat::Zero(m, m);
  p.S = Mat::Zero(n, m);
  p.q = Vec::Zero(n);
  p.r = Vec::Zero(m);
  p.x_ref = Vec::Zero(n);
  p.u_ref = Vec::Zero(m);
  return p;
}

SmoothMap quadratic_cost(const QuadraticCostParams& p) {
  const int n = static_cast<int>(p.Q.rows());
  const int m = static_cast<int>(p.R.rows());
  if (p.Q.cols() != n || p.R.cols() != m || p.S.rows() != n || p.S.cols() != m ||
      p.q.size() != n || p.r.size() != m || p.x_ref.size() != n || p.u_ref.size() != m)
    throw DimensionError("quadratic cost: inconsistent dimensions");
  return SmoothMap(
      n, m, 1,
      [p](const Vec& x, const Vec& u) -> Vec {
        const Vec dx = x - p.x_ref;
        const Vec du = u - p.u_ref;
        Vec out(1);
        out(0) = 0.5 * dx.dot(p.Q * dx) + 0.5 * du.dot(p.R * du) + p.q.dot(x) + p.r.dot(u) +
                 x.dot(p.S * u) + p.constant;
        return out;
      },
      [p](const Vec& x, const Vec& u) -> Mat {
        const Vec g = 0.5 * (p.Q + p.Q.transpose()) * (x - p.x_ref) + p.q + p.S * u;
        return g.transpose();
      },
      [p](const Vec& x, const Vec& u) -> Mat {
        const Vec g = 0.5 * (p.R + p.R.transpose()) * (u - p.u_ref) + p.r + p.S.transpose() * x;
        return g.transpose();
      },
      "quadratic_cost");
}

SmoothMap affine_constraint(const Mat& G, const Vec& h, int control_dim) {
  if (G.rows() != h.size()) throw DimensionError("affine constraint: G/h mismatch");
  const int n = static_cast<int>(G.cols());
  const int r = static_cast<int>(G.rows());
  return SmoothMap(
      n, control_dim, r, [G, h](const Vec& x, const Vec&) -> Vec { return G * x - h; },
      [G](const Vec&, const Vec&) { return G; },
      [r, control_dim](const Vec&, const Vec&) { return Mat(Mat::Zero(r, control_dim)); },
      "affine_constraint");
}

SmoothMap quadratic_constraint(const std::vector<QuadraticRow>& rows, int state_dim,
                               int control_dim) {
  for (const auto& row : rows)
    if (row.P.rows() != state_dim || row.P.cols() != state_dim || row.a.size() != state_dim)
      throw DimensionError("quadratic constraint: row dimension mismatch");
  const int r = static_cast<int>(rows.size());
  return SmoothMap(
      state_dim, control_dim, r,
      [rows](const Vec& x, const Vec&) -> Vec {
        Vec g(static_cast<Eigen::Index>(rows.size()));
        for (size_t j = 0; j < rows.size(); ++j)
          g(j) = 0.5 * x.dot(rows[j].P * x) + rows[j].a.dot(x) + rows[j].b;
        return g;
      },
      [rows, state_dim](const Vec& x, const Vec&) -> Mat {
        Mat J(static_cast<Eigen::Index>(rows.size()), state_dim);
        for (size_t j = 0; j < rows.size(); ++j)
          J.row(j) = (0.5 * (rows[j].P + rows[j].P.transpose()) * x + rows[j].a).transpose();
        return J;
      },
      [r, control_dim](const Vec&, const Vec&) { return Mat(Mat::Zero(r, control_dim)); },
      "quadratic_constraint");
}

}  // namespace geopmp::builtin
