// Forward single shooting in the normal case nu = 1.
//
// Outer unknowns theta = (pi, lambda): pi is an ambient representative of
// p_1 and lambda the frequency multiplier. A forward pass recovers u_t and
// p_{t+1} stage by stage from stationarity and the adjoint recursion; the
// outer residual is transversality at T, the normal part of pi and the
// frequency constraint.

#include "geopmp/solvers.hpp"

#include "control_nlp.hpp"
#include "geopmp/errors.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace geopmp {

namespace {

struct StageSet {
  Mat C;  // r x m, empty for FullSpace
  Vec d;
};

using ResidualFn = std::function<Vec(const Vec&)>;

Mat fd_jacobian(const ResidualFn& F, const Vec& v, const Vec& Fv) {
  Mat J(Fv.size(), v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double h = 1e-7 * (1.0 + std::abs(v(i)));
    Vec up = v, dn = v;
    up(i) += h;
    dn(i) -= h;
    J.col(i) = (F(up) - F(dn)) / (2.0 * h);
  }
  return J;
}

/// Gauss-Newton with minimum-norm steps and backtracking. Throws
/// SingularStationarity when it stalls on a rank-deficient Jacobian.
bool inner_solve(const ResidualFn& F, Vec& v, int stage) {
  Vec r = F(v);
  for (int it = 0; it < 60; ++it) {
    const double tol = 1e-13 * (1.0 + v.norm());
    if (r.norm() <= tol) return true;
    const Mat J = fd_jacobian(F, v, r);
    const Eigen::CompleteOrthogonalDecomposition<Mat> cod(J);
    const Vec step = -cod.solve(r);
    bool accepted = false;
    for (double a = 1.0; a >= 1e-6; a *= 0.5) {
      const Vec trial = v + a * step;
      const Vec rt = F(trial);
      if (rt.allFinite() && rt.norm() < r.norm()) {
        v = trial;
        r = rt;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (cod.rank() < J.cols()) {
        std::ostringstream os;
        os << "shooting: stationarity system at stage " << stage << " is singular (rank "
           << cod.rank() << " of " << J.cols() << ", residual " << r.norm() << ")";
        throw SingularStationarity(os.str());
      }
      return r.norm() <= 1e-9 * (1.0 + v.norm());
    }
  }
  return r.norm() <= 1e-9 * (1.0 + v.norm());
}

class Shooter {
 public:
  Shooter(const ControlProblem& p) : problem_(p) {
    T_ = p.horizon;
    m_ = p.control_dim;
    N_ = p.state_ambient_dim();
    ell_ = p.freq_mats.ell;
    for (int t = 0; t < T_; ++t) {
      const auto& set = p.control_sets[t];
      if (const auto* a = std::get_if<AffineSet>(&set.rep())) sets_.push_back({a->C, a->d});
      else if (set.kind() == ControlSetKind::FullSpace) sets_.push_back({Mat(0, m_), Vec(0)});
      else
        throw Error("shooting needs FullSpace or AffineSubspace control sets (stage " +
                    std::to_string(t) + " is " + to_string(set.kind()) + ")");
    }
    warm_.resize(T_);
  }

  int theta_size() const { return N_ + ell_; }

  struct Pass {
    bool ok = false;
    std::vector<Vec> states;
    std::vector<Vec> controls;
    std::vector<Vec> adjoints;  // p_1..p_T
    Vec residual;
  };

  /// One forward pass. Inner solves start from the stored warm starts; on
  /// success the warm starts are updated when `commit` is set.
  Pass run(const Vec& theta, bool commit) {
    const Vec pi = theta.head(N_);
    const Vec lambda = theta.tail(ell_);
    Pass pass;
    pass.states.push_back(problem_.x_init);
    std::vector<Vec> next_warm = warm_;
    Vec p_t, normal0;
    for (int t = 0; t < T_; ++t) {
      const Vec x = pass.states.back();
      const auto& S = sets_[t];
      const int r = static_cast<int>(S.C.rows());
      const auto& f = problem_.dynamics[t];
      const auto& c = problem_.stage_costs[t];
      Vec freq_term = ell_ > 0 ? Vec(problem_.freq_mats.E[t].transpose() * lambda) : Vec::Zero(m_);
      ResidualFn F;
      if (t == 0) {
        F = [&, r](const Vec& v) -> Vec {
          const Vec u = v.head(m_);
          const Vec beta = v.tail(r);
          const Vec x1 = f(x, u);
          const Vec q = problem_.manifold->projector_at(x1) * pi;
          Vec res(m_ + r);
          res.head(m_) = f.jacobian_control(x, u).transpose() * q -
                         c.jacobian_control(x, u).row(0).transpose() + freq_term -
                         S.C.transpose() * beta;
          res.tail(r) = S.C * u - S.d;
          return res;
        };
      } else {
        const Mat Pt = problem_.manifold->projector_at(x);
        F = [&, r, Pt](const Vec& v) -> Vec {
          const Vec u = v.head(m_);
          const Vec pin = v.segment(m_, N_);
          const Vec beta = v.tail(r);
          const Vec xn = f(x, u);
          const Mat Pn = problem_.manifold->projector_at(xn);
          const Vec q = Pn * pin;
          Vec res(N_ + m_ + N_ + r);
          res.head(N_) = Pt * (f.jacobian_state(x, u).transpose() * q -
                               c.jacobian_state(x, u).row(0).transpose()) - p_t;
          res.segment(N_, m_) = f.jacobian_control(x, u).transpose() * q -
                                c.jacobian_control(x, u).row(0).transpose() + freq_term -
                                S.C.transpose() * beta;
          res.segment(N_ + m_, N_) = pin - q;
          res.tail(r) = S.C * u - S.d;
          return res;
        };
      }
      Vec v = next_warm[t];
      if (!inner_solve(F, v, t)) return pass;
      if (!v.allFinite()) return pass;
      next_warm[t] = v;
      const Vec u = v.head(m_);
      const Vec xn = f(x, u);
      if (problem_.manifold->defect(xn) > 1e-7) return pass;
      pass.controls.push_back(u);
      pass.states.push_back(problem_.manifold->nearest_point(xn));
      const Vec pin = t == 0 ? pi : Vec(v.segment(m_, N_));
      p_t = problem_.manifold->projector_at(pass.states.back()) * pin;
      if (t == 0) normal0 = pin - p_t;
      pass.adjoints.push_back(p_t);
    }
    const Vec& xT = pass.states.back();
    // The normal part of pi is pinned to zero, otherwise it is a free
    // direction that Newton can inflate without bound.
    pass.residual = Vec(2 * N_ + ell_);
    pass.residual.segment(N_, N_) = normal0;
    pass.residual.head(N_) =
        p_t + problem_.manifold->projector_at(xT) *
                  problem_.terminal_cost.jacobian_state(xT, Vec::Zero(m_)).row(0).transpose();
    if (ell_ > 0) pass.residual.tail(ell_) = freq_residual(problem_.freq_mats, pass.controls);
    pass.ok = pass.residual.allFinite();
    if (pass.ok && commit) warm_ = std::move(next_warm);
    return pass;
  }

  /// theta and warm starts from a control guess: rollout, backward adjoint,
  /// least-squares lambda and beta.
  Vec initialize(const std::vector<Vec>& guess) {
    std::vector<Vec> U = guess;
    if (U.empty()) U.assign(T_, Vec::Zero(m_));
    if (static_cast<int>(U.size()) != T_) throw DimensionError("init_guess needs T controls");
    for (int t = 0; t < T_; ++t) U[t] = problem_.control_sets[t].project(U[t]);
    const Trajectory traj = rollout(problem_, U);
    const auto lin = linearize(problem_, traj);
    const auto p = backward_adjoint(lin, 1.0, {});

    // w_t at lambda = 0; the C_t' beta part is projected out before fitting lambda.
    std::vector<Vec> w0(T_);
    std::vector<Mat> perp(T_);
    for (int t = 0; t < T_; ++t) {
      w0[t] = lin.stages[t].Fu.transpose() * (lin.stages[t + 1].P * p[t]) - lin.stages[t].dcu;
      const Mat B = range_space(sets_[t].C.transpose());
      perp[t] = Mat::Identity(m_, m_) - B * B.transpose();
    }
    Vec lambda = Vec::Zero(ell_);
    if (ell_ > 0) {
      Mat A(T_ * m_, ell_);
      Vec b(T_ * m_);
      for (int t = 0; t < T_; ++t) {
        A.middleRows(t * m_, m_) = perp[t] * problem_.freq_mats.E[t].transpose();
        b.segment(t * m_, m_) = -perp[t] * w0[t];
      }
      lambda = A.completeOrthogonalDecomposition().solve(b);
    }
    for (int t = 0; t < T_; ++t) {
      const int r = static_cast<int>(sets_[t].C.rows());
      Vec w = w0[t];
      if (ell_ > 0) w += problem_.freq_mats.E[t].transpose() * lambda;
      const Vec beta = r > 0 ? Vec(sets_[t].C.transpose().completeOrthogonalDecomposition().solve(w))
                             : Vec(0);
      if (t == 0) {
        warm_[t] = Vec(m_ + r);
        warm_[t] << U[t], beta;
      } else {
        warm_[t] = Vec(m_ + N_ + r);
        warm_[t] << U[t], p[t], beta;
      }
    }
    Vec theta(N_ + ell_);
    theta << p[0], lambda;
    return theta;
  }

  const std::vector<Vec>& warm() const { return warm_; }
  void set_warm(std::vector<Vec> w) { warm_ = std::move(w); }

 private:
  const ControlProblem& problem_;
  int T_ = 0, m_ = 0, N_ = 0, ell_ = 0;
  std::vector<StageSet> sets_;
  std::vector<Vec> warm_;
};

struct NewtonOutcome {
  bool converged = false;
  Vec theta;
  Shooter::Pass pass;
  double residual = kInf;
  int iterations = 0;
  std::vector<double> history;
};

NewtonOutcome newton(Shooter& sh, Vec theta, const SolveOptions& opts) {
  NewtonOutcome out;
  Shooter::Pass pass = sh.run(theta, true);
  if (!pass.ok) return out;
  double rn = pass.residual.norm();
  out.history.push_back(rn);
  const int max_iters = std::min(opts.max_iters, 200);
  for (int it = 0; it < max_iters && rn > opts.residual_tol; ++it) {
    out.iterations = it + 1;
    const auto base_warm = sh.warm();
    const ResidualFn R = [&](const Vec& th) -> Vec {
      sh.set_warm(base_warm);
      const auto p = sh.run(th, false);
      if (!p.ok) throw NonConvergence("shooting: forward pass failed while differencing", rn);
      return p.residual;
    };
    Mat J;
    try {
      J = fd_jacobian(R, theta, pass.residual);
    } catch (const NonConvergence&) {
      break;
    }
    sh.set_warm(base_warm);
    const Vec step = -J.completeOrthogonalDecomposition().solve(pass.residual);
    bool accepted = false;
    for (double a = 1.0; a >= 1e-8; a *= 0.5) {
      sh.set_warm(base_warm);
      Shooter::Pass trial = sh.run(theta + a * step, true);
      if (trial.ok && trial.residual.norm() < rn) {
        theta += a * step;
        pass = std::move(trial);
        rn = pass.residual.norm();
        accepted = true;
        break;
      }
    }
    out.history.push_back(rn);
    if (!accepted) {
      sh.set_warm(base_warm);
      break;
    }
  }
  out.converged = rn <= opts.residual_tol;
  out.theta = theta;
  out.residual = rn;
  out.pass = std::move(pass);
  return out;
}

}  // namespace

SolveResult solve_shooting(const ControlProblem& problem, const SolveOptions& opts,
                           const std::vector<Vec>& init_guess) {
  opts.validate();
  if (problem.has_state_constraints())
    throw Error("shooting does not handle state constraints; use a direct method");
  Shooter sh(problem);
  const Vec theta0 = sh.initialize(init_guess);
  const auto warm0 = sh.warm();
  const int N = problem.state_ambient_dim();

  NewtonOutcome best;
  int iterations = 0;
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int s = 0; s < opts.multistarts; ++s) {
    Vec theta = theta0;
    if (s > 0) {
      const double scale = 0.5 * (1.0 + theta0.head(N).norm());
      for (int i = 0; i < N; ++i) theta(i) += scale * nd(rng);
    }
    sh.set_warm(warm0);
    NewtonOutcome out = newton(sh, theta, opts);
    iterations += out.iterations;
    if (out.residual < best.residual) best = std::move(out);
    if (best.converged) break;
  }
  if (!best.converged)
    throw NonConvergence("shooting: Newton iteration did not converge (residual " +
                             std::to_string(best.residual) + ")",
                         best.residual);

  SolveResult r;
  r.method = SolveMethod::IndirectShooting;
  r.trajectory = rollout(problem, best.pass.controls);
  r.objective = total_cost(problem, r.trajectory);
  r.converged = true;
  r.status = "converged";
  r.iterations = iterations;
  r.history = best.history;

  PMPCertificate cert = zero_certificate(problem);
  cert.abnormal = 1.0;
  cert.freq_multiplier = best.theta.tail(problem.freq_mats.ell);
  cert.adjoints = backward_adjoint(linearize(problem, r.trajectory), 1.0, cert.state_multipliers);
  cert.scale(1.0 / cert.mass());
  r.pmp_report = verify(problem, r.trajectory, cert, opts.verify_tol);
  r.certificate = std::move(cert);
  return r;
}

}  // namespace geopmp
