#pragma once

// Closed embedded submanifolds of R^N and the tangent/cotangent machinery
// built on the ambient Euclidean pairing.

#include "geopmp/linalg.hpp"

#include <memory>
#include <random>
#include <string>
#include <vector>

namespace geopmp {

enum class ManifoldKind { Euclidean, Sphere, SpecialOrthogonal3, AffinePlane, Product };

std::string to_string(ManifoldKind kind);

class Manifold;
using ManifoldPtr = std::shared_ptr<const Manifold>;

/// Default membership tolerance for ManifoldPoint.
inline constexpr double kOnsetTolerance = 1e-9;

/// An n-dimensional manifold given as a closed subset of R^N.
///
/// SO(3) is stored as the column-major vectorization of a 3x3 rotation.
/// AffinePlane is {origin + B y}, B with orthonormal columns; it is how a
/// flat problem is re-embedded isometrically into a larger ambient space.
class Manifold {
 public:
  static ManifoldPtr euclidean(int n, double tol = kOnsetTolerance);
  /// Unit sphere S^{ambient-1} in R^ambient.
  static ManifoldPtr sphere(int ambient, double tol = kOnsetTolerance);
  static ManifoldPtr so3(double tol = kOnsetTolerance);
  static ManifoldPtr affine_plane(Vec origin, Mat basis, double tol = kOnsetTolerance);
  static ManifoldPtr product(std::vector<ManifoldPtr> factors, double tol = kOnsetTolerance);

  ManifoldKind kind() const { return kind_; }
  int intrinsic_dim() const { return intrinsic_dim_; }
  int ambient_dim() const { return ambient_dim_; }
  double tolerance() const { return tol_; }
  const std::vector<ManifoldPtr>& factors() const { return factors_; }
  const Vec& plane_origin() const { return origin_; }
  const Mat& plane_basis() const { return basis_; }

  /// Membership residual: zero exactly on the embedded image.
  double defect(const Vec& x) const;
  bool contains(const Vec& x) const { return defect(x) <= tol_; }

  /// Orthogonal projector onto T_x M. Does not check membership.
  Mat projector_at(const Vec& x) const;

  /// Closest point of M (sphere normalization, SO(3) polar factor).
  Vec nearest_point(const Vec& x) const;

  /// Retraction: nearest_point(x + v) for the curved built-ins.
  Vec retract_at(const Vec& x, const Vec& v) const;

  Vec random_point(std::mt19937_64& rng) const;
  Vec random_tangent(const Vec& x, std::mt19937_64& rng) const;

  std::string describe() const;

 private:
  Manifold() = default;

  ManifoldKind kind_ = ManifoldKind::Euclidean;
  int intrinsic_dim_ = 0;
  int ambient_dim_ = 0;
  double tol_ = kOnsetTolerance;
  Vec origin_;
  Mat basis_;
  std::vector<ManifoldPtr> factors_;
};

/// Ambient coordinates of a point known to lie on its manifold.
class ManifoldPoint {
 public:
  /// Throws MembershipError if the defect exceeds the manifold tolerance.
  ManifoldPoint(ManifoldPtr manifold, Vec ambient);

  const Manifold& manifold() const { return *manifold_; }
  const ManifoldPtr& manifold_ptr() const { return manifold_; }
  const Vec& ambient() const { return ambient_; }
  Mat projector() const { return manifold_->projector_at(ambient_); }

 private:
  ManifoldPtr manifold_;
  Vec ambient_;
};

class TangentVector {
 public:
  /// Throws MembershipError if v has a normal component above the tolerance.
  TangentVector(ManifoldPoint base, Vec ambient, double tol = 1e-8);

  const ManifoldPoint& base() const { return base_; }
  const Vec& ambient() const { return ambient_; }

 private:
  ManifoldPoint base_;
  Vec ambient_;
};

/// Covector at a base point, stored through an ambient representative.
/// Representatives differing by a normal vector are the same covector.
class Covector {
 public:
  Covector(ManifoldPoint base, Vec ambient);

  const ManifoldPoint& base() const { return base_; }
  const Vec& ambient() const { return ambient_; }

  /// Tangent-projected representative.
  Vec canonical() const;

  /// Equality after tangent projection, 1e-8 absolute + 1e-8 relative.
  bool equivalent(const Covector& other, double abs_tol = 1e-8, double rel_tol = 1e-8) const;

 private:
  ManifoldPoint base_;
  Vec ambient_;
};

/// Checked projector: throws MembershipError off the manifold.
Mat tangent_projector(const ManifoldPoint& p);
Mat tangent_projector(const Manifold& m, const Vec& x);

ManifoldPoint retract(const ManifoldPoint& p, const TangentVector& v);

/// Isometric affine embedding R^n -> R^N, x -> origin + Q x, Q'Q = I.
/// Used to re-embed a flat problem into a larger ambient space.
struct AffineEmbedding {
  Vec origin;
  Mat Q;

  Vec embed(const Vec& x) const { return origin + Q * x; }
  /// Left inverse on the image, extended to the whole ambient space.
  Vec restrict(const Vec& y) const { return Q.transpose() * (y - origin); }
  /// Pushes a covector on R^n to a canonical ambient covector.
  Vec push_covector(const Vec& p) const { return Q * p; }
  /// Pulls an ambient covector back to R^n.
  Vec pull_covector(const Vec& p) const { return Q.transpose() * p; }

  ManifoldPtr image() const;

  static AffineEmbedding random(int n, int N, std::mt19937_64& rng);
};

/// Skew-symmetric generator matrix of a 3-vector.
Eigen::Matrix3d hat(const Eigen::Vector3d& w);

}  // namespace geopmp
