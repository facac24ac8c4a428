#pragma once

// Local tents of control sets, their dual cones, active sets and the
// regularity test for state constraints.
//
// Polarity convention: the dual of a cone K is {y : <y, d> <= 0 for d in K}.

#include "geopmp/control_set.hpp"
#include "geopmp/manifold.hpp"
#include "geopmp/smooth_map.hpp"

#include <optional>
#include <string>
#include <vector>

namespace geopmp {

inline constexpr double kActivationTolerance = 1e-8;

/// Halfspace form {vertex + d : G d <= 0, Eq d = 0}.
struct ConeH {
  Vec vertex;
  Mat G;   // rows g_i
  Mat Eq;  // equality rows (affine tents)

  int dim() const { return static_cast<int>(vertex.size()); }
  bool contains_direction(const Vec& d, double tol = 1e-12) const;
};

/// Generator form {vertex + sum a_i g_i + sum b_j l_j : a >= 0}.
/// No generators at all is the zero cone {vertex}.
struct ConeV {
  Vec vertex;
  std::vector<Vec> generators;
  std::vector<Vec> lineality;

  int dim() const { return static_cast<int>(vertex.size()); }
};

/// Supporting cone / half-space / tangent-plane tent of `set` at u.
/// Throws NotInSetError if u is outside the set and TentUnavailable when an
/// active smooth constraint has a vanishing gradient.
ConeH local_tent(const ControlSet& set, const Vec& u, double tol = kActivationTolerance);

/// Farkas dual: conic hull of the halfspace rows, lineality of the equalities.
ConeV dual_cone(const ConeH& cone);

struct ConeProjection {
  double distance = 0.0;
  Vec projection;
};

/// Euclidean distance from y to the cone generated by `cone` (vertex ignored,
/// the cone is treated as a set of covectors). Lineality is projected out and
/// the rest is a nonnegative least squares problem.
ConeProjection project_onto_cone(const ConeV& cone, const Vec& y);

using ActiveSet = std::vector<int>;

/// {j : |g^j(x)| <= tol}. Throws InfeasiblePointError if some g^j(x) > tol.
ActiveSet active_set(const SmoothMap& g, const ManifoldPoint& x, double tol = kActivationTolerance);

struct RegularityResult {
  bool regular = true;
  /// Nonzero multiplier on the active set annihilated by the pullback
  /// (full length r, zero off the active set) when not regular.
  Vec witness;
  ActiveSet active;
};

/// Regular iff the only mu >= 0 supported on the active set with
/// T*g(x) mu = 0 is mu = 0. Decided by max sum(mu) s.t. that equality and
/// 0 <= mu <= 1.
RegularityResult is_regular(const SmoothMap& g, const ManifoldPoint& x,
                            double tol = kActivationTolerance);

std::string cone_to_json(const ConeH& cone);
std::string cone_to_json(const ConeV& cone);

}  // namespace geopmp
