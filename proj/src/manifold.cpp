#include "geopmp/manifold.hpp"

#include "geopmp/errors.hpp"

#include <cmath>
#include <sstream>

namespace geopmp {

namespace {

using Mat3 = Eigen::Matrix3d;

Mat3 as_matrix3(const Vec& x) { return Eigen::Map<const Mat3>(x.data()); }

Vec as_vector9(const Mat3& R) {
  Vec v(9);
  Eigen::Map<Mat3>(v.data()) = R;
  return v;
}

Mat3 polar_rotation(const Mat3& A) {
  Eigen::JacobiSVD<Mat3> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 D = Mat3::Identity();
  D(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  return svd.matrixU() * D * svd.matrixV().transpose();
}

template <class F>
void for_each_factor(const std::vector<ManifoldPtr>& factors, F&& f) {
  int offset = 0;
  for (const auto& fac : factors) {
    f(*fac, offset);
    offset += fac->ambient_dim();
  }
}

}  // namespace

std::string to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::Euclidean: return "euclidean";
    case ManifoldKind::Sphere: return "sphere";
    case ManifoldKind::SpecialOrthogonal3: return "so3";
    case ManifoldKind::AffinePlane: return "affine";
    case ManifoldKind::Product: return "product";
  }
  return "unknown";
}

Eigen::Matrix3d hat(const Eigen::Vector3d& w) {
  Eigen::Matrix3d K;
  K << 0, -w(2), w(1), w(2), 0, -w(0), -w(1), w(0), 0;
  return K;
}

ManifoldPtr Manifold::euclidean(int n, double tol) {
  if (n < 1) throw DimensionError("euclidean dimension must be >= 1");
  auto m = std::shared_ptr<Manifold>(new Manifold());
  m->kind_ = ManifoldKind::Euclidean;
  m->intrinsic_dim_ = n;
  m->ambient_dim_ = n;
  m->tol_ = tol;
  return m;
}

ManifoldPtr Manifold::sphere(int ambient, double tol) {
  if (ambient < 2) throw DimensionError("sphere ambient dimension must be >= 2");
  auto m = std::shared_ptr<Manifold>(new Manifold());
  m->kind_ = ManifoldKind::Sphere;
  m->intrinsic_dim_ = ambient - 1;
  m->ambient_dim_ = ambient;
  m->tol_ = tol;
  return m;
}

ManifoldPtr Manifold::so3(double tol) {
  auto m = std::shared_ptr<Manifold>(new Manifold());
  m->kind_ = ManifoldKind::SpecialOrthogonal3;
  m->intrinsic_dim_ = 3;
  m->ambient_dim_ = 9;
  m->tol_ = tol;
  return m;
}

ManifoldPtr Manifold::affine_plane(Vec origin, Mat basis, double tol) {
  if (origin.size() != basis.rows())
    throw DimensionError("affine plane origin/basis size mismatch");
  if (basis.cols() < 1 || basis.cols() > basis.rows())
    throw DimensionError("affine plane basis must have 1..N columns");
  const Mat gram = basis.transpose() * basis;
  if ((gram - Mat::Identity(basis.cols(), basis.cols())).norm() > 1e-10)
    throw DimensionError("affine plane basis must have orthonormal columns");
  auto m = std::shared_ptr<Manifold>(new Manifold());
  m->kind_ = ManifoldKind::AffinePlane;
  m->intrinsic_dim_ = static_cast<int>(basis.cols());
  m->ambient_dim_ = static_cast<int>(basis.rows());
  m->tol_ = tol;
  m->origin_ = std::move(origin);
  m->basis_ = std::move(basis);
  return m;
}

ManifoldPtr Manifold::product(std::vector<ManifoldPtr> factors, double tol) {
  if (factors.empty()) throw DimensionError("product needs at least one factor");
  auto m = std::shared_ptr<Manifold>(new Manifold());
  m->kind_ = ManifoldKind::Product;
  m->tol_ = tol;
  for (const auto& f : factors) {
    m->intrinsic_dim_ += f->intrinsic_dim();
    m->ambient_dim_ += f->ambient_dim();
  }
  m->factors_ = std::move(factors);
  return m;
}

double Manifold::defect(const Vec& x) const {
  if (x.size() != ambient_dim_) return kInf;
  if (!x.allFinite()) return kInf;
  switch (kind_) {
    case ManifoldKind::Euclidean: return 0.0;
    case ManifoldKind::Sphere: return std::abs(x.norm() - 1.0);
    case ManifoldKind::SpecialOrthogonal3: {
      const Mat3 R = as_matrix3(x);
      const double orth = (R.transpose() * R - Mat3::Identity()).norm();
      return std::max(orth, std::abs(R.determinant() - 1.0));
    }
    case ManifoldKind::AffinePlane: {
      const Vec d = x - origin_;
      return (d - basis_ * (basis_.transpose() * d)).norm();
    }
    case ManifoldKind::Product: {
      double worst = 0.0;
      for_each_factor(factors_, [&](const Manifold& f, int off) {
        worst = std::max(worst, f.defect(x.segment(off, f.ambient_dim())));
      });
      return worst;
    }
  }
  return kInf;
}

Mat Manifold::projector_at(const Vec& x) const {
  const int N = ambient_dim_;
  switch (kind_) {
    case ManifoldKind::Euclidean: return Mat::Identity(N, N);
    case ManifoldKind::Sphere: {
      const Vec n = x.normalized();
      return Mat::Identity(N, N) - n * n.transpose();
    }
    case ManifoldKind::SpecialOrthogonal3: {
      // V -> R skew(R' V) in vectorized form.
      const Mat3 R = as_matrix3(x);
      Mat P(9, 9);
      for (int j = 0; j < 9; ++j) {
        Mat3 E = Mat3::Zero();
        E(j % 3, j / 3) = 1.0;
        const Mat3 A = R.transpose() * E;
        P.col(j) = as_vector9(R * (0.5 * (A - A.transpose())));
      }
      return P;
    }
    case ManifoldKind::AffinePlane: return basis_ * basis_.transpose();
    case ManifoldKind::Product: {
      Mat P = Mat::Zero(N, N);
      for_each_factor(factors_, [&](const Manifold& f, int off) {
        const int n = f.ambient_dim();
        P.block(off, off, n, n) = f.projector_at(x.segment(off, n));
      });
      return P;
    }
  }
  return Mat::Identity(N, N);
}

Vec Manifold::nearest_point(const Vec& x) const {
  switch (kind_) {
    case ManifoldKind::Euclidean: return x;
    case ManifoldKind::Sphere: return x.normalized();
    case ManifoldKind::SpecialOrthogonal3: return as_vector9(polar_rotation(as_matrix3(x)));
    case ManifoldKind::AffinePlane: return origin_ + basis_ * (basis_.transpose() * (x - origin_));
    case ManifoldKind::Product: {
      Vec y(x.size());
      for_each_factor(factors_, [&](const Manifold& f, int off) {
        y.segment(off, f.ambient_dim()) = f.nearest_point(x.segment(off, f.ambient_dim()));
      });
      return y;
    }
  }
  return x;
}

Vec Manifold::retract_at(const Vec& x, const Vec& v) const { return nearest_point(x + v); }

Vec Manifold::random_point(std::mt19937_64& rng) const {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vec g(ambient_dim_);
  for (int i = 0; i < ambient_dim_; ++i) g(i) = nd(rng);
  switch (kind_) {
    case ManifoldKind::Euclidean: return g;
    case ManifoldKind::Sphere: return g.normalized();
    case ManifoldKind::SpecialOrthogonal3: return nearest_point(g);
    case ManifoldKind::AffinePlane: {
      Vec y(intrinsic_dim_);
      for (int i = 0; i < intrinsic_dim_; ++i) y(i) = nd(rng);
      return origin_ + basis_ * y;
    }
    case ManifoldKind::Product: {
      Vec y(ambient_dim_);
      for_each_factor(factors_, [&](const Manifold& f, int off) {
        y.segment(off, f.ambient_dim()) = f.random_point(rng);
      });
      return y;
    }
  }
  return g;
}

Vec Manifold::random_tangent(const Vec& x, std::mt19937_64& rng) const {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vec g(ambient_dim_);
  for (int i = 0; i < ambient_dim_; ++i) g(i) = nd(rng);
  return projector_at(x) * g;
}

std::string Manifold::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << "(n=" << intrinsic_dim_ << ", N=" << ambient_dim_ << ")";
  return os.str();
}

ManifoldPoint::ManifoldPoint(ManifoldPtr manifold, Vec ambient)
    : manifold_(std::move(manifold)), ambient_(std::move(ambient)) {
  const double d = manifold_->defect(ambient_);
  if (!(d <= manifold_->tolerance())) {
    std::ostringstream os;
    os << "point off " << manifold_->describe() << ": defect " << d;
    throw MembershipError(os.str());
  }
}

TangentVector::TangentVector(ManifoldPoint base, Vec ambient, double tol)
    : base_(std::move(base)), ambient_(std::move(ambient)) {
  if (ambient_.size() != base_.manifold().ambient_dim())
    throw DimensionError("tangent vector size differs from ambient dimension");
  const Vec normal = ambient_ - base_.projector() * ambient_;
  if (normal.norm() > tol * (1.0 + ambient_.norm()))
    throw MembershipError("vector is not tangent at its base point");
}

Covector::Covector(ManifoldPoint base, Vec ambient)
    : base_(std::move(base)), ambient_(std::move(ambient)) {
  if (ambient_.size() != base_.manifold().ambient_dim())
    throw DimensionError("covector size differs from ambient dimension");
}

Vec Covector::canonical() const { return base_.projector() * ambient_; }

bool Covector::equivalent(const Covector& other, double abs_tol, double rel_tol) const {
  const Vec a = canonical();
  const Vec b = other.canonical();
  return (a - b).norm() <= abs_tol + rel_tol * std::max(a.norm(), b.norm());
}

Mat tangent_projector(const ManifoldPoint& p) { return p.projector(); }

Mat tangent_projector(const Manifold& m, const Vec& x) {
  const double d = m.defect(x);
  if (!(d <= m.tolerance()))
    throw MembershipError("tangent_projector: point off " + m.describe());
  return m.projector_at(x);
}

ManifoldPoint retract(const ManifoldPoint& p, const TangentVector& v) {
  return ManifoldPoint(p.manifold_ptr(), p.manifold().retract_at(p.ambient(), v.ambient()));
}

ManifoldPtr AffineEmbedding::image() const { return Manifold::affine_plane(origin, Q); }

AffineEmbedding AffineEmbedding::random(int n, int N, std::mt19937_64& rng) {
  if (N < n) throw DimensionError("embedding target smaller than source");
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat G(N, n);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = nd(rng);
  Eigen::HouseholderQR<Mat> qr(G);
  AffineEmbedding e;
  e.Q = qr.householderQ() * Mat::Identity(N, n);
  e.origin = Vec(N);
  for (int i = 0; i < N; ++i) e.origin(i) = nd(rng);
  return e;
}

}  // namespace geopmp
