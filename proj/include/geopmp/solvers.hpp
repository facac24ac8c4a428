#pragma once

// Candidate optimal trajectories: a direct oracle for tiny instances and an
// indirect single-shooting method on the necessary conditions.

#include "geopmp/pmp.hpp"
#include "geopmp/problem.hpp"

#include <string>
#include <vector>

namespace geopmp {

enum class SolveMethod { DirectGrid, ProjectedDescent, IndirectShooting };

std::string to_string(SolveMethod m);
SolveMethod parse_solve_method(const std::string& name);

struct SolveOptions {
  SolveMethod method = SolveMethod::DirectGrid;
  int max_iters = 500;
  /// Stop when the step (or projected gradient) is below this, relative to
  /// 1 + |U|.
  double step_tol = 1e-12;
  /// Residual tolerance of the shooting Newton iteration.
  double residual_tol = 1e-10;
  /// Grid spacing per control coordinate. Coarsened when the grid would
  /// exceed max_grid_points.
  double grid_resolution = 1e-3;
  long max_grid_points = 200000;
  /// Best grid points handed to the local refinement.
  int polish_candidates = 3;
  unsigned seed = 0;
  int multistarts = 4;
  double verify_tol = kDefaultPmpTolerance;

  void validate() const;
};

struct SolveResult {
  Trajectory trajectory;
  double objective = 0.0;
  bool converged = false;
  std::string status;
  int iterations = 0;
  PMPCertificate certificate;
  PMPReport pmp_report;
  /// Objective at each accepted iterate (ProjectedDescent), or the residual
  /// norm per Newton step (IndirectShooting).
  std::vector<double> history;
  SolveMethod method = SolveMethod::DirectGrid;
};

/// DirectGrid needs T*m <= 8 and bounded control sets: it enumerates a grid
/// on the linear-equality manifold, keeps the best feasible points and
/// refines them locally. ProjectedDescent needs linear sets and no state
/// constraints. Throws InfeasibleError when no grid point is feasible.
SolveResult solve_direct(const ControlProblem& problem, const SolveOptions& opts);

/// Normal-case shooting (nu = 1) on the initial adjoint and the frequency
/// multiplier. Needs no state constraints and FullSpace or AffineSubspace
/// control sets. `init_guess` is a control sequence (empty for zeros).
SolveResult solve_shooting(const ControlProblem& problem, const SolveOptions& opts,
                           const std::vector<Vec>& init_guess = {});

/// Dispatches on opts.method.
SolveResult solve(const ControlProblem& problem, const SolveOptions& opts,
                  const std::vector<Vec>& init_guess = {});

}  // namespace geopmp
