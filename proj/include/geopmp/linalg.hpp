#pragma once

// Small dense solvers used throughout: nonnegative least squares, a simplex
// LP, and a strictly convex QP reduced to least-distance programming.

#include <Eigen/Dense>

#include <limits>
#include <string>

namespace geopmp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Lawson-Hanson active-set NNLS: argmin ||A x - b|| subject to x >= 0.
Vec nnls(const Mat& A, const Vec& b);

/// Orthonormal basis (columns) of the null space of A.
Mat null_space(const Mat& A, double rel_tol = 1e-10);

/// Orthonormal basis (columns) of the column space of A.
Mat range_space(const Mat& A, double rel_tol = 1e-10);

/// Numerical rank of A via SVD.
int numerical_rank(const Mat& A, double rel_tol = 1e-10);

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(SolveStatus s);

/// min c'x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  lower <= x <= upper.
/// Empty matrices mean "no rows". Empty bound vectors mean x >= 0.
struct LinearProgram {
  Vec c;
  Mat A_ub;
  Vec b_ub;
  Mat A_eq;
  Vec b_eq;
  Vec lower;
  Vec upper;
};

struct LpResult {
  SolveStatus status = SolveStatus::Infeasible;
  Vec x;
  double objective = 0.0;
};

/// Dense two-phase simplex with Bland's rule. Intended for the tiny programs
/// that arise here (tens of variables).
LpResult solve_lp(const LinearProgram& lp);

/// min 0.5 x'Hx + g'x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  H symmetric PD.
struct QuadraticProgram {
  Mat H;
  Vec g;
  Mat A_eq;
  Vec b_eq;
  Mat A_ub;
  Vec b_ub;
};

struct QpResult {
  SolveStatus status = SolveStatus::Infeasible;
  Vec x;
  Vec ineq_multipliers;  // >= 0, one per A_ub row
  Vec eq_multipliers;
};

/// Equalities are eliminated through a null-space basis; the remaining
/// inequality QP is mapped to a least-distance program solved by NNLS.
QpResult solve_qp(const QuadraticProgram& qp);

}  // namespace geopmp
