#include "control_nlp.hpp"

#include "geopmp/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace geopmp::detail {

namespace {

void append_rows(Mat& A, Vec& b, const Mat& A_add, const Vec& b_add) {
  Mat A2(A.rows() + A_add.rows(), A_add.cols());
  Vec b2(b.size() + b_add.size());
  if (A.rows() > 0) A2.topRows(A.rows()) = A;
  A2.bottomRows(A_add.rows()) = A_add;
  b2.head(b.size()) = b;
  b2.tail(b_add.size()) = b_add;
  A = std::move(A2);
  b = std::move(b2);
}

double positive_part_sum(const Vec& v) { return v.cwiseMax(0.0).sum(); }

}  // namespace

ControlNlp::ControlNlp(const ControlProblem& problem) : problem_(problem) {
  const int T = problem.horizon;
  const int m = problem.control_dim;
  n_ = T * m;
  A_ub_ = Mat(0, n_);
  A_eq_ = Mat(0, n_);
  b_ub_ = Vec(0);
  b_eq_ = Vec(0);
  for (int t = 0; t < T; ++t) {
    const auto& set = problem.control_sets[t];
    if (!set.is_linear()) {
      has_smooth_sets_ = true;
      n_nonlinear_ += std::get<SmoothIneqSet>(set.rep()).h.out_dim();
      continue;
    }
    Mat Au, Ae;
    Vec bu, be;
    set.linear_rows(Au, bu, Ae, be);
    Mat Au_full = Mat::Zero(Au.rows(), n_);
    Au_full.middleCols(t * m, m) = Au;
    append_rows(A_ub_, b_ub_, Au_full, bu);
    Mat Ae_full = Mat::Zero(Ae.rows(), n_);
    Ae_full.middleCols(t * m, m) = Ae;
    append_rows(A_eq_, b_eq_, Ae_full, be);
  }
  if (problem.freq_mats.ell > 0)
    append_rows(A_eq_, b_eq_, problem.freq_mats.stacked(), Vec::Zero(problem.freq_mats.ell));
  for (int t = 1; t <= T; ++t) n_nonlinear_ += problem.constraint_rows(t);
}

NlpPoint ControlNlp::evaluate(const Vec& U, bool derivatives) const {
  const int T = problem_.horizon;
  const int m = problem_.control_dim;
  const int N = problem_.state_ambient_dim();
  NlpPoint pt;
  try {
    pt.traj = rollout(problem_, unstack_controls(U, T, m));
  } catch (const DynamicsLeftManifold&) {
    return pt;
  }
  if (!std::isfinite(pt.traj.states.back().ambient().sum())) return pt;
  pt.ok = true;
  pt.objective = total_cost(problem_, pt.traj);
  pt.nonlinear = Vec::Zero(n_nonlinear_);
  if (derivatives) {
    pt.gradient = Vec::Zero(n_);
    pt.nonlinear_jac = Mat::Zero(n_nonlinear_, n_);
  }

  const Vec u_zero = Vec::Zero(m);
  Mat S = Mat::Zero(N, n_);
  std::vector<Mat> sens;
  if (derivatives) sens.push_back(S);
  int row = 0;
  for (int t = 0; t < T; ++t) {
    const Vec& x = pt.traj.states[t].ambient();
    const Vec& u = pt.traj.controls[t];
    if (const auto* s = std::get_if<SmoothIneqSet>(&problem_.control_sets[t].rep())) {
      const int k = s->h.out_dim();
      pt.nonlinear.segment(row, k) = s->h(Vec(0), u);
      if (derivatives) pt.nonlinear_jac.block(row, t * m, k, m) = s->h.jacobian_control(Vec(0), u);
      row += k;
    }
    if (!derivatives) continue;
    const auto& c = problem_.stage_costs[t];
    pt.gradient += S.transpose() * c.jacobian_state(x, u).row(0).transpose();
    pt.gradient.segment(t * m, m) += c.jacobian_control(x, u).row(0).transpose();
    Mat next = problem_.dynamics[t].jacobian_state(x, u) * S;
    next.middleCols(t * m, m) += problem_.dynamics[t].jacobian_control(x, u);
    S = std::move(next);
    sens.push_back(S);
  }
  if (derivatives)
    pt.gradient += S.transpose() *
                   problem_.terminal_cost.jacobian_state(pt.traj.states[T].ambient(), u_zero)
                       .row(0)
                       .transpose();
  for (int t = 1; t <= T; ++t) {
    const auto& g = problem_.constraint_at(t);
    if (!g || g->out_dim() == 0) continue;
    const Vec& x = pt.traj.states[t].ambient();
    const int k = g->out_dim();
    pt.nonlinear.segment(row, k) = (*g)(x, u_zero);
    if (derivatives) pt.nonlinear_jac.middleRows(row, k) = g->jacobian_state(x, u_zero) * sens[t];
    row += k;
  }
  return pt;
}

double ControlNlp::objective(const Vec& U) const {
  const NlpPoint pt = evaluate(U, false);
  return pt.ok ? pt.objective : kInf;
}

double ControlNlp::violation(const Vec& U, const NlpPoint& at) const {
  if (!at.ok) return kInf;
  double v = 0.0;
  if (A_ub_.rows() > 0) v = std::max(v, (A_ub_ * U - b_ub_).maxCoeff());
  if (A_eq_.rows() > 0) v = std::max(v, (A_eq_ * U - b_eq_).cwiseAbs().maxCoeff());
  if (at.nonlinear.size() > 0) v = std::max(v, at.nonlinear.maxCoeff());
  return v;
}

double ControlNlp::violation(const Vec& U) const { return violation(U, evaluate(U, false)); }

std::optional<Vec> ControlNlp::project_linear(const Vec& U) const {
  if (A_ub_.rows() == 0 && A_eq_.rows() == 0) return U;
  QuadraticProgram qp;
  qp.H = Mat::Identity(n_, n_);
  qp.g = -U;
  qp.A_ub = A_ub_;
  qp.b_ub = b_ub_;
  qp.A_eq = A_eq_;
  qp.b_eq = b_eq_;
  const QpResult r = solve_qp(qp);
  if (r.status != SolveStatus::Optimal) return std::nullopt;
  return r.x;
}

namespace {

Vec lagrangian_gradient(const ControlNlp& nlp, const Vec& U, const Vec& mu) {
  const NlpPoint pt = nlp.evaluate(U);
  if (!pt.ok) throw DynamicsLeftManifold("sqp: rollout failed while differencing");
  Vec g = pt.gradient;
  if (mu.size() > 0) g += pt.nonlinear_jac.transpose() * mu;
  return g;
}

Mat convexified_hessian(const ControlNlp& nlp, const Vec& U, const Vec& mu) {
  const int n = nlp.size();
  Mat H(n, n);
  for (int i = 0; i < n; ++i) {
    const double h = 1e-5 * (1.0 + std::abs(U(i)));
    Vec up = U, dn = U;
    up(i) += h;
    dn(i) -= h;
    H.col(i) = (lagrangian_gradient(nlp, up, mu) - lagrangian_gradient(nlp, dn, mu)) / (2.0 * h);
  }
  H = 0.5 * (H + H.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  Vec ev = es.eigenvalues();
  const double floor = 1e-8 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = std::max(std::abs(ev(i)), floor);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

double l1_violation(const ControlNlp& nlp, const Vec& U, const NlpPoint& pt) {
  if (!pt.ok) return kInf;
  double v = 0.0;
  if (nlp.A_ub().rows() > 0) v += positive_part_sum(nlp.A_ub() * U - nlp.b_ub());
  if (nlp.A_eq().rows() > 0) v += (nlp.A_eq() * U - nlp.b_eq()).lpNorm<1>();
  if (pt.nonlinear.size() > 0) v += positive_part_sum(pt.nonlinear);
  return v;
}

}  // namespace

SqpResult sqp_polish(const ControlNlp& nlp, const Vec& U0, int max_iters, double step_tol) {
  const int n = nlp.size();
  const int k = nlp.nonlinear_count();
  SqpResult res;
  res.U = U0;
  Vec mu = Vec::Zero(k);
  double rho = 1.0;

  for (int it = 0; it < max_iters; ++it) {
    res.iterations = it + 1;
    const NlpPoint pt = nlp.evaluate(res.U);
    if (!pt.ok) break;

    QuadraticProgram qp;
    qp.H = convexified_hessian(nlp, res.U, mu);
    qp.g = pt.gradient;
    qp.A_eq = nlp.A_eq();
    qp.b_eq = nlp.b_eq() - nlp.A_eq() * res.U;
    qp.A_ub = Mat(nlp.A_ub().rows() + k, n);
    qp.b_ub = Vec(nlp.A_ub().rows() + k);
    qp.A_ub.topRows(nlp.A_ub().rows()) = nlp.A_ub();
    qp.b_ub.head(nlp.A_ub().rows()) = nlp.b_ub() - nlp.A_ub() * res.U;
    if (k > 0) {
      qp.A_ub.bottomRows(k) = pt.nonlinear_jac;
      qp.b_ub.tail(k) = -pt.nonlinear;
    }
    const QpResult sub = solve_qp(qp);
    if (sub.status != SolveStatus::Optimal) break;
    const Vec& d = sub.x;

    double mult_max = 0.0;
    if (sub.ineq_multipliers.size() > 0) mult_max = sub.ineq_multipliers.cwiseAbs().maxCoeff();
    if (sub.eq_multipliers.size() > 0)
      mult_max = std::max(mult_max, sub.eq_multipliers.cwiseAbs().maxCoeff());
    rho = std::max(rho, 2.0 * mult_max + 1.0);
    const Vec mu_new = k > 0 ? Vec(sub.ineq_multipliers.tail(k)) : Vec(0);

    if (d.lpNorm<Eigen::Infinity>() <= step_tol * (1.0 + res.U.lpNorm<Eigen::Infinity>())) {
      const Vec trial = res.U + d;
      const NlpPoint tp = nlp.evaluate(trial, false);
      if (tp.ok && nlp.violation(trial, tp) <= nlp.violation(res.U, pt)) res.U = trial;
      mu = mu_new;
      res.converged = true;
      break;
    }

    const double phi0 = pt.objective + rho * l1_violation(nlp, res.U, pt);
    const double slope = pt.gradient.dot(d) - rho * l1_violation(nlp, res.U, pt);
    double alpha = 1.0;
    bool accepted = false;
    while (alpha >= 1e-10) {
      const Vec trial = res.U + alpha * d;
      const NlpPoint tp = nlp.evaluate(trial, false);
      if (tp.ok) {
        const double phi = tp.objective + rho * l1_violation(nlp, trial, tp);
        if (phi <= phi0 + 1e-4 * alpha * std::min(slope, 0.0) + 1e-15 * std::abs(phi0)) {
          res.U = trial;
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    mu = mu_new;
    if (!accepted) {
      // The model step cannot improve the merit function further; the
      // remaining step is at the level of rounding.
      res.converged = d.lpNorm<Eigen::Infinity>() <= 1e-8 * (1.0 + res.U.lpNorm<Eigen::Infinity>());
      break;
    }
  }
  const NlpPoint fin = nlp.evaluate(res.U, false);
  res.objective = fin.ok ? fin.objective : kInf;
  res.violation = nlp.violation(res.U, fin);
  return res;
}

}  // namespace geopmp::detail
