#include "geopmp/tents.hpp"

#include "geopmp/errors.hpp"

#include "json.hpp"

#include <sstream>

namespace geopmp {

namespace {

Mat stack_rows(const std::vector<Vec>& rows, int dim) {
  Mat M(static_cast<Eigen::Index>(rows.size()), dim);
  for (size_t i = 0; i < rows.size(); ++i) M.row(i) = rows[i].transpose();
  return M;
}

nlohmann::json to_json_vec(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

nlohmann::json to_json_rows(const Mat& M) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) rows.push_back(to_json_vec(M.row(i).transpose()));
  return rows;
}

}  // namespace

bool ConeH::contains_direction(const Vec& d, double tol) const {
  const double scale = tol * std::max(1.0, d.norm());
  if (G.rows() > 0 && (G * d).maxCoeff() > scale) return false;
  if (Eq.rows() > 0 && (Eq * d).lpNorm<Eigen::Infinity>() > scale) return false;
  return true;
}

ConeH local_tent(const ControlSet& set, const Vec& u, double tol) {
  const int m = set.dim();
  if (u.size() != m) throw DimensionError("local_tent: control dimension mismatch");
  if (!set.contains(u, tol)) {
    std::ostringstream os;
    os << "local_tent: control outside " << to_string(set.kind()) << " set (violation "
       << set.violation(u) << ")";
    throw NotInSetError(os.str());
  }
  std::vector<Vec> g_rows, eq_rows;
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, BoxSet>) {
          for (int i = 0; i < m; ++i) {
            Vec e = Vec::Zero(m);
            e(i) = 1.0;
            if (std::abs(u(i) - s.upper(i)) <= tol) g_rows.push_back(e);
            if (std::abs(u(i) - s.lower(i)) <= tol) g_rows.push_back(-e);
          }
        } else if constexpr (std::is_same_v<S, PolytopeSet>) {
          const Vec slack = s.A * u - s.b;
          for (Eigen::Index i = 0; i < s.A.rows(); ++i)
            if (std::abs(slack(i)) <= tol * std::max(1.0, s.A.row(i).norm()))
              g_rows.push_back(s.A.row(i).transpose());
        } else if constexpr (std::is_same_v<S, SmoothIneqSet>) {
          const Vec h = s.h(Vec(0), u);
          const Mat J = s.h.jacobian_control(Vec(0), u);
          for (Eigen::Index j = 0; j < h.size(); ++j) {
            if (std::abs(h(j)) > tol) continue;
            const Vec grad = J.row(j).transpose();
            if (grad.norm() <= 1e-12)
              throw TentUnavailable("local_tent: active smooth constraint with zero gradient");
            g_rows.push_back(grad);
          }
        } else if constexpr (std::is_same_v<S, AffineSet>) {
          for (Eigen::Index i = 0; i < s.C.rows(); ++i) eq_rows.push_back(s.C.row(i).transpose());
        }
      },
      set.rep());
  return ConeH{u, stack_rows(g_rows, m), stack_rows(eq_rows, m)};
}

ConeV dual_cone(const ConeH& cone) {
  ConeV out;
  out.vertex = cone.vertex;
  for (Eigen::Index i = 0; i < cone.G.rows(); ++i) out.generators.push_back(cone.G.row(i).transpose());
  for (Eigen::Index i = 0; i < cone.Eq.rows(); ++i) out.lineality.push_back(cone.Eq.row(i).transpose());
  return out;
}

ConeProjection project_onto_cone(const ConeV& cone, const Vec& y) {
  const int m = static_cast<int>(y.size());
  Mat L(m, static_cast<Eigen::Index>(cone.lineality.size()));
  for (size_t j = 0; j < cone.lineality.size(); ++j) L.col(j) = cone.lineality[j];
  const Mat B = range_space(L);
  const Mat Pperp = Mat::Identity(m, m) - B * B.transpose();

  const Vec y_perp = Pperp * y;
  Vec proj = y - y_perp;
  if (!cone.generators.empty()) {
    Mat G(m, static_cast<Eigen::Index>(cone.generators.size()));
    for (size_t j = 0; j < cone.generators.size(); ++j) G.col(j) = Pperp * cone.generators[j];
    const Vec a = nnls(G, y_perp);
    proj += G * a;
  }
  return {(y - proj).norm(), proj};
}

ActiveSet active_set(const SmoothMap& g, const ManifoldPoint& x, double tol) {
  const Vec val = g(x.ambient(), Vec::Zero(g.control_dim()));
  ActiveSet A;
  for (Eigen::Index j = 0; j < val.size(); ++j) {
    if (val(j) > tol) {
      std::ostringstream os;
      os << "active_set: constraint " << j << " violated (g = " << val(j) << ")";
      throw InfeasiblePointError(os.str());
    }
    if (std::abs(val(j)) <= tol) A.push_back(static_cast<int>(j));
  }
  return A;
}

RegularityResult is_regular(const SmoothMap& g, const ManifoldPoint& x, double tol) {
  RegularityResult res;
  res.active = active_set(g, x, tol);
  res.witness = Vec::Zero(g.out_dim());
  const int k = static_cast<int>(res.active.size());
  if (k == 0) return res;

  const Mat J = g.jacobian_state(x.ambient(), Vec::Zero(g.control_dim()));
  const Mat P = x.projector();
  Mat A(J.cols(), k);
  for (int c = 0; c < k; ++c) A.col(c) = P * J.row(res.active[c]).transpose();
  // Normalizing columns keeps the verdict independent of positive rescaling
  // of individual constraints.
  Vec scale(k);
  for (int c = 0; c < k; ++c) {
    scale(c) = A.col(c).norm();
    if (scale(c) > 0.0) A.col(c) /= scale(c);
  }

  LinearProgram lp;
  lp.c = -Vec::Ones(k);
  lp.A_eq = A;
  lp.b_eq = Vec::Zero(A.rows());
  lp.lower = Vec::Zero(k);
  lp.upper = Vec::Ones(k);
  const LpResult r = solve_lp(lp);
  if (r.status != SolveStatus::Optimal) throw Error("is_regular: LP failed: " + to_string(r.status));
  if (-r.objective <= 1e-9) return res;

  res.regular = false;
  Vec mu(k);
  for (int c = 0; c < k; ++c) mu(c) = scale(c) > 0.0 ? r.x(c) / scale(c) : r.x(c);
  mu /= mu.maxCoeff();
  for (int c = 0; c < k; ++c) res.witness(res.active[c]) = mu(c);
  return res;
}

std::string cone_to_json(const ConeH& cone) {
  nlohmann::json j;
  j["vertex"] = to_json_vec(cone.vertex);
  j["halfspaces"] = to_json_rows(cone.G);
  j["equalities"] = to_json_rows(cone.Eq);
  return j.dump();
}

std::string cone_to_json(const ConeV& cone) {
  nlohmann::json j;
  j["vertex"] = to_json_vec(cone.vertex);
  j["generators"] = nlohmann::json::array();
  for (const auto& g : cone.generators) j["generators"].push_back(to_json_vec(g));
  j["lineality"] = nlohmann::json::array();
  for (const auto& l : cone.lineality) j["lineality"].push_back(to_json_vec(l));
  return j.dump();
}

}  // namespace geopmp
