#include "geopmp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace geopmp {

namespace {

Eigen::JacobiSVD<Mat> full_svd(const Mat& A) {
  return Eigen::JacobiSVD<Mat>(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

int rank_from_singular_values(const Vec& s, double rel_tol) {
  if (s.size() == 0) return 0;
  const double smax = s.maxCoeff();
  if (smax <= 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * std::max(1.0, smax)) ++r;
  return r;
}

}  // namespace

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

int numerical_rank(const Mat& A, double rel_tol) {
  if (A.rows() == 0 || A.cols() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(A);
  return rank_from_singular_values(svd.singularValues(), rel_tol);
}

Mat null_space(const Mat& A, double rel_tol) {
  const Eigen::Index n = A.cols();
  if (A.rows() == 0) return Mat::Identity(n, n);
  auto svd = full_svd(A);
  const int r = rank_from_singular_values(svd.singularValues(), rel_tol);
  return svd.matrixV().rightCols(n - r);
}

Mat range_space(const Mat& A, double rel_tol) {
  if (A.cols() == 0) return Mat(A.rows(), 0);
  auto svd = full_svd(A);
  const int r = rank_from_singular_values(svd.singularValues(), rel_tol);
  return svd.matrixU().leftCols(r);
}

Vec nnls(const Mat& A, const Vec& b) {
  const Eigen::Index n = A.cols();
  Vec x = Vec::Zero(n);
  if (n == 0) return x;
  std::vector<bool> passive(n, false);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     std::max<double>(1.0, A.norm()) *
                     static_cast<double>(std::max(A.rows(), n));

  auto solve_passive = [&](Vec& z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[j]) idx.push_back(j);
    Mat Ap(A.rows(), static_cast<Eigen::Index>(idx.size()));
    for (size_t k = 0; k < idx.size(); ++k) Ap.col(k) = A.col(idx[k]);
    Vec zp = Ap.completeOrthogonalDecomposition().solve(b);
    z.setZero(n);
    for (size_t k = 0; k < idx.size(); ++k) z(idx[k]) = zp(k);
  };

  Vec w = A.transpose() * (b - A * x);
  const int max_outer = 3 * static_cast<int>(n) + 30;
  for (int outer = 0; outer < max_outer; ++outer) {
    Eigen::Index t = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[j] && w(j) > best) {
        best = w(j);
        t = j;
      }
    if (t < 0) break;
    passive[t] = true;

    Vec z;
    for (int inner = 0; inner < 3 * static_cast<int>(n) + 30; ++inner) {
      solve_passive(z);
      bool all_positive = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && z(j) <= 0.0) all_positive = false;
      if (all_positive) break;
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && z(j) <= 0.0) alpha = std::min(alpha, x(j) / (x(j) - z(j)));
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && x(j) <= tol) {
          passive[j] = false;
          x(j) = 0.0;
        }
    }
    x = z;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[j]) x(j) = 0.0;
    w = A.transpose() * (b - A * x);
  }
  return x;
}

namespace {

/// Tableau simplex on min c'z, Az = b (b >= 0), z >= 0.
class Tableau {
 public:
  Tableau(const Mat& A, const Vec& b, int num_real)
      : m_(A.rows()), n_(A.cols()), num_real_(num_real) {
    tab_ = Mat::Zero(m_ + 1, n_ + 1);
    tab_.topLeftCorner(m_, n_) = A;
    tab_.topRightCorner(m_, 1) = b;
    basis_.resize(m_);
  }

  Mat& tab() { return tab_; }
  std::vector<Eigen::Index>& basis() { return basis_; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    tab_.row(r) /= tab_(r, c);
    for (Eigen::Index i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = tab_(i, c);
      if (f != 0.0) tab_.row(i) -= f * tab_.row(r);
    }
    basis_[r] = c;
  }

  // Objective row must already hold reduced costs. Returns status.
  SolveStatus run(Eigen::Index allowed_cols, int max_iter) {
    for (int it = 0; it < max_iter; ++it) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed_cols; ++j)
        if (tab_(m_, j) < -kEps) {
          enter = j;
          break;
        }
      if (enter < 0) return SolveStatus::Optimal;
      Eigen::Index leave = -1;
      double best = kInf;
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double a = tab_(i, enter);
        if (a > kEps) {
          const double ratio = tab_(i, n_) / a;
          if (ratio < best - 1e-14 ||
              (std::abs(ratio - best) <= 1e-14 && leave >= 0 && basis_[i] < basis_[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return SolveStatus::Unbounded;
      pivot(leave, enter);
    }
    return SolveStatus::IterationLimit;
  }

  Eigen::Index rows() const { return m_; }
  Eigen::Index cols() const { return n_; }
  int num_real() const { return num_real_; }

  static constexpr double kEps = 1e-11;

 private:
  Eigen::Index m_, n_;
  int num_real_;
  Mat tab_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
  const Eigen::Index n = lp.c.size();
  Vec lower = lp.lower.size() ? lp.lower : Vec::Zero(n);
  Vec upper = lp.upper.size() ? lp.upper : Vec::Constant(n, kInf);

  // x = offset + T y, y >= 0
  std::vector<std::pair<Eigen::Index, double>> cols;  // (original var, sign)
  Vec offset = Vec::Zero(n);
  std::vector<std::pair<Eigen::Index, double>> bound_rows;  // (y index, rhs)
  for (Eigen::Index j = 0; j < n; ++j) {
    const bool lf = std::isfinite(lower(j));
    const bool uf = std::isfinite(upper(j));
    if (lf) {
      offset(j) = lower(j);
      cols.push_back({j, 1.0});
      if (uf) bound_rows.push_back({static_cast<Eigen::Index>(cols.size()) - 1, upper(j) - lower(j)});
    } else if (uf) {
      offset(j) = upper(j);
      cols.push_back({j, -1.0});
    } else {
      cols.push_back({j, 1.0});
      cols.push_back({j, -1.0});
    }
  }
  const Eigen::Index ny = static_cast<Eigen::Index>(cols.size());
  Mat T = Mat::Zero(n, ny);
  for (Eigen::Index k = 0; k < ny; ++k) T(cols[k].first, k) = cols[k].second;

  const Eigen::Index n_ub = lp.A_ub.rows();
  const Eigen::Index n_eq = lp.A_eq.rows();
  const Eigen::Index n_bd = static_cast<Eigen::Index>(bound_rows.size());
  const Eigen::Index n_slack = n_ub + n_bd;
  const Eigen::Index m = n_ub + n_bd + n_eq;
  const Eigen::Index nz = ny + n_slack;

  Mat A = Mat::Zero(m, nz);
  Vec b = Vec::Zero(m);
  if (n_ub > 0) {
    A.block(0, 0, n_ub, ny) = lp.A_ub * T;
    A.block(0, ny, n_ub, n_ub).setIdentity();
    b.head(n_ub) = lp.b_ub - lp.A_ub * offset;
  }
  for (Eigen::Index k = 0; k < n_bd; ++k) {
    A(n_ub + k, bound_rows[k].first) = 1.0;
    A(n_ub + k, ny + n_ub + k) = 1.0;
    b(n_ub + k) = bound_rows[k].second;
  }
  if (n_eq > 0) {
    A.block(n_ub + n_bd, 0, n_eq, ny) = lp.A_eq * T;
    b.tail(n_eq) = lp.b_eq - lp.A_eq * offset;
  }
  for (Eigen::Index i = 0; i < m; ++i)
    if (b(i) < 0.0) {
      A.row(i) *= -1.0;
      b(i) *= -1.0;
    }
  Vec cz = Vec::Zero(nz);
  cz.head(ny) = T.transpose() * lp.c;

  LpResult result;
  const int max_iter = 50 * static_cast<int>(m + nz) + 1000;

  // Phase 1 with one artificial per row.
  Mat A1(m, nz + m);
  A1 << A, Mat::Identity(m, m);
  Tableau tab(A1, b, static_cast<int>(nz));
  for (Eigen::Index i = 0; i < m; ++i) tab.basis()[i] = nz + i;
  Mat& t = tab.tab();
  for (Eigen::Index j = 0; j < nz; ++j) t(m, j) = -A.col(j).sum();
  t(m, nz + m) = -b.sum();
  SolveStatus s1 = tab.run(nz, max_iter);
  if (s1 == SolveStatus::IterationLimit) {
    result.status = s1;
    return result;
  }
  if (-t(m, nz + m) > 1e-9 * (1.0 + b.lpNorm<Eigen::Infinity>())) {
    result.status = SolveStatus::Infeasible;
    return result;
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (tab.basis()[i] < nz) continue;
    for (Eigen::Index j = 0; j < nz; ++j)
      if (std::abs(t(i, j)) > 1e-9) {
        tab.pivot(i, j);
        break;
      }
  }

  // Phase 2.
  for (Eigen::Index j = 0; j <= nz + m; ++j) {
    double d = (j < nz) ? cz(j) : 0.0;
    if (j == nz + m) d = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::Index bi = tab.basis()[i];
      const double cb = bi < nz ? cz(bi) : 0.0;
      d -= cb * t(i, j);
    }
    t(m, j) = d;
  }
  SolveStatus s2 = tab.run(nz, max_iter);
  result.status = s2;
  if (s2 != SolveStatus::Optimal) return result;

  Vec z = Vec::Zero(nz);
  for (Eigen::Index i = 0; i < m; ++i)
    if (tab.basis()[i] < nz) z(tab.basis()[i]) = t(i, nz + m);
  result.x = offset + T * z.head(ny);
  result.objective = lp.c.dot(result.x);
  return result;
}

QpResult solve_qp(const QuadraticProgram& qp) {
  const Eigen::Index n = qp.H.rows();
  const Eigen::Index n_ub = qp.A_ub.rows();
  const Eigen::Index n_eq = qp.A_eq.rows();
  QpResult res;

  Mat Z;
  Vec x0;
  if (n_eq > 0) {
    Z = null_space(qp.A_eq);
    x0 = qp.A_eq.completeOrthogonalDecomposition().solve(qp.b_eq);
    if ((qp.A_eq * x0 - qp.b_eq).norm() > 1e-9 * (1.0 + qp.b_eq.norm())) {
      res.status = SolveStatus::Infeasible;
      return res;
    }
  } else {
    Z = Mat::Identity(n, n);
    x0 = Vec::Zero(n);
  }

  const Eigen::Index k = Z.cols();
  Vec lambda = Vec::Zero(n_ub);
  Vec x;
  if (k == 0) {
    x = x0;
    if (n_ub > 0 && (qp.A_ub * x - qp.b_ub).maxCoeff() > 1e-9 * (1.0 + qp.b_ub.cwiseAbs().maxCoeff())) {
      res.status = SolveStatus::Infeasible;
      return res;
    }
  } else {
    Mat Hr = Z.transpose() * qp.H * Z;
    Hr = 0.5 * (Hr + Hr.transpose());
    Vec gr = Z.transpose() * (qp.H * x0 + qp.g);
    Eigen::LLT<Mat> llt(Hr);
    if (llt.info() != Eigen::Success) {
      const double ridge = 1e-12 * std::max(1.0, Hr.diagonal().cwiseAbs().maxCoeff());
      llt.compute(Hr + ridge * Mat::Identity(k, k));
    }
    Vec y_star = -llt.solve(gr);
    Vec y = y_star;
    if (n_ub > 0) {
      Mat Ar = qp.A_ub * Z;
      Vec br = qp.b_ub - qp.A_ub * x0;
      // L^{-T}: solve L' w = v
      Mat Lt_inv = llt.matrixU().solve(Mat::Identity(k, k));
      Mat G = -Ar * Lt_inv;
      Vec h = -(br - Ar * y_star);
      Mat E(k + 1, n_ub);
      E.topRows(k) = G.transpose();
      E.row(k) = h.transpose();
      Vec f = Vec::Zero(k + 1);
      f(k) = 1.0;
      Vec u = nnls(E, f);
      Vec r = E * u - f;
      if (r.norm() <= 1e-12 || -r(k) <= 1e-14) {
        res.status = SolveStatus::Infeasible;
        return res;
      }
      Vec zsol = -r.head(k) / r(k);
      lambda = u / (-r(k));
      y = y_star + Lt_inv * zsol;
      Vec slack = Ar * y - br;
      if (slack.maxCoeff() > 1e-8 * (1.0 + br.cwiseAbs().maxCoeff())) {
        res.status = SolveStatus::Infeasible;
        return res;
      }
    }
    x = x0 + Z * y;
  }

  res.status = SolveStatus::Optimal;
  res.x = x;
  res.ineq_multipliers = lambda;
  if (n_eq > 0) {
    Vec rhs = -(qp.H * x + qp.g);
    if (n_ub > 0) rhs -= qp.A_ub.transpose() * lambda;
    res.eq_multipliers = qp.A_eq.transpose().completeOrthogonalDecomposition().solve(rhs);
  } else {
    res.eq_multipliers = Vec(0);
  }
  return res;
}

}  // namespace geopmp
