#pragma once

#include "geopmp/smooth_map.hpp"

#include <optional>
#include <string>
#include <utility>
#include <variant>

namespace geopmp {

struct BoxSet {
  Vec lower;
  Vec upper;
};

/// {u : A u <= b}
struct PolytopeSet {
  Mat A;
  Vec b;
};

/// {u : h(u) <= 0}; h is a SmoothMap with state dimension 0.
struct SmoothIneqSet {
  SmoothMap h;
};

/// {u : C u = d}
struct AffineSet {
  Mat C;
  Vec d;
};

struct FullSpaceSet {
  int dim = 0;
};

enum class ControlSetKind { Box, Polytope, SmoothIneq, AffineSubspace, FullSpace };

std::string to_string(ControlSetKind kind);

/// Admissible action set U_t with enough structure to build tents.
class ControlSet {
 public:
  using Rep = std::variant<BoxSet, PolytopeSet, SmoothIneqSet, AffineSet, FullSpaceSet>;

  static ControlSet box(Vec lower, Vec upper);
  static ControlSet polytope(Mat A, Vec b);
  static ControlSet smooth_ineq(SmoothMap h);
  /// ||u - center||^2 - radius^2 <= 0, as a SmoothIneq set.
  static ControlSet ball(Vec center, double radius);
  static ControlSet affine(Mat C, Vec d);
  static ControlSet full(int dim);

  ControlSetKind kind() const { return static_cast<ControlSetKind>(rep_.index()); }
  const Rep& rep() const { return rep_; }
  int dim() const { return dim_; }

  /// Max constraint violation (infinity norm), 0 inside.
  double violation(const Vec& u) const;
  bool contains(const Vec& u, double tol = 1e-8) const { return violation(u) <= tol; }

  /// Linear description when one exists: A_ub u <= b_ub, A_eq u = b_eq.
  bool is_linear() const { return kind() != ControlSetKind::SmoothIneq; }
  void linear_rows(Mat& A_ub, Vec& b_ub, Mat& A_eq, Vec& b_eq) const;

  /// Per-coordinate bounds when the set is bounded (box, bounded polytope).
  std::optional<std::pair<Vec, Vec>> bounds() const;

  /// Euclidean projection (linear sets only).
  Vec project(const Vec& u) const;

 private:
  explicit ControlSet(Rep rep, int dim) : rep_(std::move(rep)), dim_(dim) {}
  Rep rep_;
  int dim_;
};

}  // namespace geopmp
