#include "geopmp/control_set.hpp"

#include "geopmp/errors.hpp"

#include <cmath>

namespace geopmp {

std::string to_string(ControlSetKind kind) {
  switch (kind) {
    case ControlSetKind::Box: return "box";
    case ControlSetKind::Polytope: return "polytope";
    case ControlSetKind::SmoothIneq: return "smooth_ineq";
    case ControlSetKind::AffineSubspace: return "affine";
    case ControlSetKind::FullSpace: return "full";
  }
  return "unknown";
}

ControlSet ControlSet::box(Vec lower, Vec upper) {
  if (lower.size() != upper.size()) throw DimensionError("box bounds differ in size");
  if ((upper - lower).minCoeff() < 0.0) throw DimensionError("box requires lower <= upper");
  const int m = static_cast<int>(lower.size());
  return ControlSet(BoxSet{std::move(lower), std::move(upper)}, m);
}

ControlSet ControlSet::polytope(Mat A, Vec b) {
  if (A.rows() != b.size()) throw DimensionError("polytope A/b row mismatch");
  const int m = static_cast<int>(A.cols());
  return ControlSet(PolytopeSet{std::move(A), std::move(b)}, m);
}

ControlSet ControlSet::smooth_ineq(SmoothMap h) {
  if (h.state_dim() != 0) throw DimensionError("control set map must not depend on the state");
  const int m = h.control_dim();
  return ControlSet(SmoothIneqSet{std::move(h)}, m);
}

ControlSet ControlSet::ball(Vec center, double radius) {
  const int m = static_cast<int>(center.size());
  const double r2 = radius * radius;
  SmoothMap h(
      0, m, 1,
      [center, r2](const Vec&, const Vec& u) {
        Vec out(1);
        out(0) = (u - center).squaredNorm() - r2;
        return out;
      },
      [](const Vec&, const Vec&) { return Mat(1, 0); },
      [center](const Vec&, const Vec& u) { return Mat(2.0 * (u - center).transpose()); },
      "ball");
  return smooth_ineq(std::move(h));
}

ControlSet ControlSet::affine(Mat C, Vec d) {
  if (C.rows() != d.size()) throw DimensionError("affine C/d row mismatch");
  const int m = static_cast<int>(C.cols());
  return ControlSet(AffineSet{std::move(C), std::move(d)}, m);
}

ControlSet ControlSet::full(int dim) { return ControlSet(FullSpaceSet{dim}, dim); }

double ControlSet::violation(const Vec& u) const {
  if (u.size() != dim_) throw DimensionError("control dimension differs from control set");
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, BoxSet>) {
          const double lo = (s.lower - u).maxCoeff();
          const double hi = (u - s.upper).maxCoeff();
          return std::max({0.0, lo, hi});
        } else if constexpr (std::is_same_v<S, PolytopeSet>) {
          if (s.A.rows() == 0) return 0.0;
          return std::max(0.0, (s.A * u - s.b).maxCoeff());
        } else if constexpr (std::is_same_v<S, SmoothIneqSet>) {
          return std::max(0.0, s.h(Vec(0), u).maxCoeff());
        } else if constexpr (std::is_same_v<S, AffineSet>) {
          if (s.C.rows() == 0) return 0.0;
          return (s.C * u - s.d).template lpNorm<Eigen::Infinity>();
        } else {
          return 0.0;
        }
      },
      rep_);
}

void ControlSet::linear_rows(Mat& A_ub, Vec& b_ub, Mat& A_eq, Vec& b_eq) const {
  const int m = dim_;
  A_ub = Mat(0, m);
  b_ub = Vec(0);
  A_eq = Mat(0, m);
  b_eq = Vec(0);
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, BoxSet>) {
          std::vector<std::pair<int, double>> eq;
          std::vector<std::tuple<int, double, double>> ub;  // (coord, sign, rhs)
          for (int i = 0; i < m; ++i) {
            if (s.lower(i) == s.upper(i)) {
              eq.push_back({i, s.lower(i)});
              continue;
            }
            if (std::isfinite(s.upper(i))) ub.push_back({i, 1.0, s.upper(i)});
            if (std::isfinite(s.lower(i))) ub.push_back({i, -1.0, -s.lower(i)});
          }
          A_ub = Mat::Zero(static_cast<Eigen::Index>(ub.size()), m);
          b_ub = Vec(static_cast<Eigen::Index>(ub.size()));
          for (size_t r = 0; r < ub.size(); ++r) {
            A_ub(r, std::get<0>(ub[r])) = std::get<1>(ub[r]);
            b_ub(r) = std::get<2>(ub[r]);
          }
          A_eq = Mat::Zero(static_cast<Eigen::Index>(eq.size()), m);
          b_eq = Vec(static_cast<Eigen::Index>(eq.size()));
          for (size_t r = 0; r < eq.size(); ++r) {
            A_eq(r, eq[r].first) = 1.0;
            b_eq(r) = eq[r].second;
          }
        } else if constexpr (std::is_same_v<S, PolytopeSet>) {
          A_ub = s.A;
          b_ub = s.b;
        } else if constexpr (std::is_same_v<S, SmoothIneqSet>) {
          throw Error("smooth inequality control sets have no linear description");
        } else if constexpr (std::is_same_v<S, AffineSet>) {
          A_eq = s.C;
          b_eq = s.d;
        }
      },
      rep_);
}

std::optional<std::pair<Vec, Vec>> ControlSet::bounds() const {
  if (const auto* b = std::get_if<BoxSet>(&rep_)) {
    if (!b->lower.allFinite() || !b->upper.allFinite()) return std::nullopt;
    return std::make_pair(b->lower, b->upper);
  }
  if (const auto* p = std::get_if<PolytopeSet>(&rep_)) {
    Vec lo(dim_), hi(dim_);
    for (int i = 0; i < dim_; ++i) {
      for (double sign : {1.0, -1.0}) {
        LinearProgram lp;
        lp.c = Vec::Zero(dim_);
        lp.c(i) = sign;
        lp.A_ub = p->A;
        lp.b_ub = p->b;
        lp.lower = Vec::Constant(dim_, -kInf);
        lp.upper = Vec::Constant(dim_, kInf);
        const LpResult r = solve_lp(lp);
        if (r.status != SolveStatus::Optimal) return std::nullopt;
        if (sign > 0) lo(i) = r.x(i);
        else hi(i) = r.x(i);
      }
    }
    return std::make_pair(lo, hi);
  }
  return std::nullopt;
}

Vec ControlSet::project(const Vec& u) const {
  if (const auto* b = std::get_if<BoxSet>(&rep_)) return u.cwiseMax(b->lower).cwiseMin(b->upper);
  if (std::holds_alternative<FullSpaceSet>(rep_)) return u;
  if (!is_linear()) throw Error("projection onto a smooth inequality set is not supported");
  QuadraticProgram qp;
  qp.H = Mat::Identity(dim_, dim_);
  qp.g = -u;
  linear_rows(qp.A_ub, qp.b_ub, qp.A_eq, qp.b_eq);
  const QpResult r = solve_qp(qp);
  if (r.status != SolveStatus::Optimal) throw Error("projection onto empty control set");
  return r.x;
}

}  // namespace geopmp
