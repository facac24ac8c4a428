#pragma once

// The control problem as a finite-dimensional NLP in the stacked controls
// U = (u_0; ...; u_{T-1}). States are eliminated by rollout; gradients come
// from forward sensitivities S_{t+1} = F_x S_t + F_u E_t.

#include "geopmp/problem.hpp"
#include "geopmp/solvers.hpp"

#include <vector>

namespace geopmp::detail {

struct NlpPoint {
  bool ok = false;  // rollout succeeded
  Trajectory traj;
  double objective = 0.0;
  Vec gradient;
  Vec nonlinear;    // smooth control sets then state constraints, all <= 0
  Mat nonlinear_jac;
};

class ControlNlp {
 public:
  explicit ControlNlp(const ControlProblem& problem);

  int size() const { return n_; }
  const ControlProblem& problem() const { return problem_; }

  /// Linear rows from control sets and the frequency constraint.
  const Mat& A_ub() const { return A_ub_; }
  const Vec& b_ub() const { return b_ub_; }
  const Mat& A_eq() const { return A_eq_; }
  const Vec& b_eq() const { return b_eq_; }
  int nonlinear_count() const { return n_nonlinear_; }
  bool has_smooth_sets() const { return has_smooth_sets_; }

  NlpPoint evaluate(const Vec& U, bool derivatives = true) const;
  double objective(const Vec& U) const;

  /// Max violation over every constraint (linear and nonlinear); +inf if the
  /// rollout fails.
  double violation(const Vec& U) const;
  double violation(const Vec& U, const NlpPoint& at) const;

  /// Euclidean projection onto the linear constraints, or nullopt if empty.
  std::optional<Vec> project_linear(const Vec& U) const;

 private:
  const ControlProblem& problem_;
  int n_ = 0;
  int n_nonlinear_ = 0;
  bool has_smooth_sets_ = false;
  Mat A_ub_, A_eq_;
  Vec b_ub_, b_eq_;
};

struct SqpResult {
  Vec U;
  double objective = 0.0;
  double violation = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Local SQP refinement. The Hessian is a finite difference of the Lagrangian
/// gradient with its eigenvalues clipped; steps use an L1 merit line search.
SqpResult sqp_polish(const ControlNlp& nlp, const Vec& U0, int max_iters, double step_tol);

/// Rolls out U and attaches the recovered certificate and its report.
SolveResult finish(const ControlProblem& problem, const Vec& U, SolveMethod method,
                   const SolveOptions& opts);

}  // namespace geopmp::detail
