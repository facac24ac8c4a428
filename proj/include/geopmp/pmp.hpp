#pragma once

// First-order necessary conditions for ControlProblem evaluated as numeric
// residuals, plus recovery of the multipliers by linear programming.
//
// Sign conventions (adjoints p_t are covectors at x_t, t = 1..T):
//   p_T = -nu dc_T(x_T) - T*g_T(x_T) mu_T
//   p_t = T*_x f_t(x_t, u_t) p_{t+1} - nu d_x c_t(x_t, u_t) - T*g_t(x_t) mu_t
//   w_t = T*_u f_t(x_t, u_t) p_{t+1} - nu d_u c_t(x_t, u_t) + E_t' lambda
// and w_t must lie in the dual cone of the local tent of U_t at u_t.

#include "geopmp/problem.hpp"
#include "geopmp/tents.hpp"

#include <optional>
#include <string>
#include <vector>

namespace geopmp {

inline constexpr double kDefaultPmpTolerance = 1e-6;

struct PMPCertificate {
  std::vector<Vec> adjoints;           // ambient representatives of p_1..p_T
  std::vector<Vec> state_multipliers;  // mu_1..mu_T, mu_t in R^{r_t}
  double abnormal = 0.0;               // nu
  Vec freq_multiplier;                 // lambda in R^ell

  /// nu + sum ||mu_t||_1 + ||lambda||_1
  double mass() const;
  /// Multiplies every component (adjoints included) by s > 0.
  void scale(double s);
};

/// Zero certificate with shapes matching the problem.
PMPCertificate zero_certificate(const ControlProblem& problem);

/// Per-stage Jacobians and gradients along a trajectory. Computing these once
/// makes the adjoint recursion a cheap linear map of the multipliers.
struct StageLinearization {
  Mat P;     // tangent projector at x_t
  Mat Fx;    // d f_t / dx at (x_t, u_t)     (t < T)
  Mat Fu;    // d f_t / du                   (t < T)
  Vec dcx;   // d_x c_t, or d c_T at t = T
  Vec dcu;   // d_u c_t                      (t < T)
  Mat Gx;    // d g_t / dx, r_t x N          (t >= 1)
  Vec g;     // g_t(x_t)
};

struct TrajectoryLinearization {
  std::vector<StageLinearization> stages;  // index t = 0..T
};

TrajectoryLinearization linearize(const ControlProblem& problem, const Trajectory& traj);

/// Adjoint covectors p_1..p_T (index t-1) from the multipliers. Each is
/// returned at its canonical (tangent-projected) representative.
std::vector<Covector> backward_adjoint(const ControlProblem& problem, const Trajectory& traj,
                                       double abnormal, const std::vector<Vec>& state_multipliers);

std::vector<Vec> backward_adjoint(const TrajectoryLinearization& lin, double abnormal,
                                  const std::vector<Vec>& state_multipliers);

/// Stationarity covector w_t for t = 0..T-1.
Vec stationarity_covector(const ControlProblem& problem, const TrajectoryLinearization& lin,
                          const PMPCertificate& cert, int t);

/// Distance from w_t to the dual cone of the local tent of U_t at u_t, or
/// nullopt when no tent can be built (condition not checked).
std::optional<double> stationarity_residual(const ControlProblem& problem, const Trajectory& traj,
                                            const PMPCertificate& cert, int t);

/// max_{t,j} |mu_t^j g_t^j(x_t)|
double complementarity_residual(const ControlProblem& problem, const Trajectory& traj,
                                const PMPCertificate& cert);

struct PMPReport {
  double tolerance = kDefaultPmpTolerance;
  FeasibilityReport feasibility;
  bool feasible = false;

  double adjoint_dynamics = 0.0;
  double transversality = 0.0;
  double stationarity = 0.0;
  double complementarity = 0.0;
  double nonnegativity_violation = 0.0;
  double nontriviality_mass = 0.0;

  std::vector<std::optional<double>> stationarity_per_stage;
  bool stationarity_checked = true;
  std::vector<std::string> notes;

  bool adjoint_ok() const { return adjoint_dynamics <= tolerance; }
  bool transversality_ok() const { return transversality <= tolerance; }
  bool stationarity_ok() const { return stationarity_checked && stationarity <= tolerance; }
  bool complementarity_ok() const { return complementarity <= tolerance; }
  bool nonnegativity_ok() const { return nonnegativity_violation <= tolerance; }
  bool nontriviality_ok() const { return nontriviality_mass > tolerance; }
  bool all_pass() const {
    return feasible && adjoint_ok() && transversality_ok() && stationarity_ok() &&
           complementarity_ok() && nonnegativity_ok() && nontriviality_ok();
  }
};

PMPReport verify(const ControlProblem& problem, const Trajectory& traj,
                 const PMPCertificate& cert, double tol = kDefaultPmpTolerance);

struct RecoveryOptions {
  double tolerance = kDefaultPmpTolerance;
  double activation_tolerance = kActivationTolerance;
};

struct RecoveryResult {
  PMPCertificate certificate;
  PMPReport report;
  /// Optimal value of the residual LP (sum of absolute stationarity slacks,
  /// before the final mass normalization).
  double lp_residual = 0.0;
};

/// Finds (nu, mu, lambda) minimizing the stationarity mismatch subject to
/// nonnegativity, complementarity (mu = 0 on inactive constraints) and unit
/// mass, then rebuilds the adjoints and verifies.
RecoveryResult recover_multipliers(const ControlProblem& problem, const Trajectory& traj,
                                   const RecoveryOptions& opts = {});

}  // namespace geopmp
