#pragma once

#include "geopmp/builtin_maps.hpp"
#include "geopmp/control_set.hpp"
#include "geopmp/io.hpp"
#include "geopmp/problem.hpp"

#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

namespace geopmp::test_support {

inline std::string data_path(const std::string& name) {
  return std::string(GEOPMP_TEST_DATA) + "/" + name;
}

inline ControlProblem fixture(const std::string& name) {
  return parse_problem_file(data_path(name));
}

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Mat mat(std::initializer_list<std::initializer_list<double>> rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.begin()->size());
  Mat M(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double x : row) M(i, j++) = x;
    ++i;
  }
  return M;
}

inline SmoothMap quad(const Mat& Q, const Mat& R) {
  auto p = builtin::QuadraticCostParams::zeros(static_cast<int>(Q.rows()), static_cast<int>(R.rows()));
  p.Q = Q;
  p.R = R;
  return builtin::quadratic_cost(p);
}

/// Time-invariant linear-quadratic problem on R^n; `g` applies at t = 1..T.
inline ControlProblem linear_quadratic(int T, const Mat& A, const Mat& B, const Mat& Q, const Mat& R,
                                       const Mat& QT, const Vec& x0, const ControlSet& set,
                                       const std::optional<SmoothMap>& g = std::nullopt) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  ControlProblem p;
  p.horizon = T;
  p.control_dim = m;
  p.manifold = Manifold::euclidean(n);
  p.x_init = x0;
  for (int t = 0; t < T; ++t) {
    p.dynamics.push_back(builtin::linear_dynamics(A, B, Vec::Zero(n)));
    p.stage_costs.push_back(quad(Q, R));
    p.control_sets.push_back(set);
    p.state_constraints.push_back(g);
  }
  p.terminal_cost = quad(QT, Mat::Zero(m, m));
  finalize_problem(p);
  return p;
}

/// x' = x + u, c = (x^2 + u^2)/2, c_T = x^2/2, x0 = 1, T = 2.
inline ControlProblem scalar_lqr() {
  const Mat I = Mat::Identity(1, 1);
  return linear_quadratic(2, I, I, I, I, I, vec({1.0}), ControlSet::full(1));
}

}  // namespace geopmp::test_support
