#pragma once

#include "geopmp/control_set.hpp"
#include "geopmp/frequency.hpp"
#include "geopmp/manifold.hpp"
#include "geopmp/smooth_map.hpp"

#include <optional>
#include <string>
#include <vector>

namespace geopmp {

/// Module tolerances for feasibility.
struct FeasibilityTolerances {
  double dynamics = 1e-7;
  double constraints = 1e-8;
  double frequency = 1e-8;
};

/// Finite-horizon problem on an embedded manifold:
///
///   minimize  sum_t c_t(x_t, u_t) + c_T(x_T)
///   s.t.      x_{t+1} = f_t(x_t, u_t),  x_0 = x_init,
///             g_t(x_t) <= 0 for t = 1..T,  u_t in U_t,
///             sum_t E_t u_t = 0.
struct ControlProblem {
  int horizon = 0;
  int control_dim = 0;
  ManifoldPtr manifold;
  Vec x_init;
  std::vector<SmoothMap> dynamics;     // f_0 .. f_{T-1}
  std::vector<SmoothMap> stage_costs;  // c_0 .. c_{T-1}
  SmoothMap terminal_cost;             // c_T
  /// state_constraints[t-1] holds g_t for t = 1..T; nullopt means none.
  std::vector<std::optional<SmoothMap>> state_constraints;
  std::vector<ControlSet> control_sets;  // U_0 .. U_{T-1}
  FrequencySpec freq;
  FrequencyConstraintMatrices freq_mats;
  /// Canonical problem-file JSON when the problem came from a file; empty
  /// for problems assembled in code.
  std::string descriptor;

  int state_ambient_dim() const { return manifold->ambient_dim(); }
  /// Number of rows of g_t (0 if absent), t in 1..T.
  int constraint_rows(int t) const;
  bool has_state_constraints() const;
  const std::optional<SmoothMap>& constraint_at(int t) const { return state_constraints[t - 1]; }
};

/// Fills derived fields (freq_mats) and checks dimensions. When
/// `probe_dynamics` is set, also samples random (x, u) and requires the
/// dynamics to map M into M to 1e-7.
void finalize_problem(ControlProblem& problem, bool probe_dynamics = true,
                      unsigned seed = 7);

struct Trajectory {
  std::vector<ManifoldPoint> states;  // x_0 .. x_T
  std::vector<Vec> controls;          // u_0 .. u_{T-1}

  int horizon() const { return static_cast<int>(controls.size()); }
  Vec stacked_controls() const;
};

std::vector<Vec> unstack_controls(const Vec& stacked, int horizon, int control_dim);

/// Forward simulation from x_init. Each state is re-projected onto M when its
/// defect is at most 1e-7; larger defects throw DynamicsLeftManifold.
Trajectory rollout(const ControlProblem& problem, const std::vector<Vec>& controls);

struct FeasibilityReport {
  double dynamics_defect = 0.0;
  double state_constraint_violation = 0.0;
  double control_set_violation = 0.0;
  double freq_residual_norm = 0.0;

  bool feasible(const FeasibilityTolerances& tol = {}) const {
    return dynamics_defect <= tol.dynamics && state_constraint_violation <= tol.constraints &&
           control_set_violation <= tol.constraints && freq_residual_norm <= tol.frequency;
  }
};

FeasibilityReport feasibility_report(const ControlProblem& problem, const Trajectory& traj);

double total_cost(const ControlProblem& problem, const Trajectory& traj);

/// Builds a trajectory from raw ambient states, validating membership.
Trajectory make_trajectory(const ControlProblem& problem, const std::vector<Vec>& states,
                           const std::vector<Vec>& controls);

/// Image of a flat problem under x -> origin + Q x: the manifold becomes an
/// affine n-plane in R^N and every map is extended to the ambient space
/// through the left inverse Q'(y - origin).
ControlProblem reembed(const ControlProblem& flat, const AffineEmbedding& embedding);

/// Maps a flat trajectory onto its re-embedded image.
Trajectory reembed(const Trajectory& flat, const ControlProblem& embedded,
                   const AffineEmbedding& embedding);

}  // namespace geopmp
