#include "geopmp/pmp.hpp"

#include "geopmp/errors.hpp"

#include <algorithm>
#include <cmath>

namespace geopmp {

double PMPCertificate::mass() const {
  double m = abnormal;
  for (const auto& mu : state_multipliers) m += mu.lpNorm<1>();
  m += freq_multiplier.lpNorm<1>();
  return m;
}

void PMPCertificate::scale(double s) {
  abnormal *= s;
  for (auto& p : adjoints) p *= s;
  for (auto& mu : state_multipliers) mu *= s;
  freq_multiplier *= s;
}

PMPCertificate zero_certificate(const ControlProblem& problem) {
  PMPCertificate c;
  const int N = problem.state_ambient_dim();
  c.adjoints.assign(problem.horizon, Vec::Zero(N));
  for (int t = 1; t <= problem.horizon; ++t)
    c.state_multipliers.push_back(Vec::Zero(problem.constraint_rows(t)));
  c.freq_multiplier = Vec::Zero(problem.freq_mats.ell);
  return c;
}

TrajectoryLinearization linearize(const ControlProblem& problem, const Trajectory& traj) {
  const int T = problem.horizon;
  if (traj.horizon() != T) throw DimensionError("linearize: trajectory horizon differs");
  const Vec u_zero = Vec::Zero(problem.control_dim);
  TrajectoryLinearization lin;
  lin.stages.resize(T + 1);
  for (int t = 0; t <= T; ++t) {
    auto& s = lin.stages[t];
    const Vec& x = traj.states[t].ambient();
    s.P = traj.states[t].projector();
    if (t < T) {
      const Vec& u = traj.controls[t];
      s.Fx = problem.dynamics[t].jacobian_state(x, u);
      s.Fu = problem.dynamics[t].jacobian_control(x, u);
      s.dcx = problem.stage_costs[t].jacobian_state(x, u).row(0).transpose();
      s.dcu = problem.stage_costs[t].jacobian_control(x, u).row(0).transpose();
    } else {
      s.dcx = problem.terminal_cost.jacobian_state(x, u_zero).row(0).transpose();
    }
    if (t >= 1) {
      if (const auto& g = problem.constraint_at(t)) {
        s.Gx = g->jacobian_state(x, u_zero);
        s.g = (*g)(x, u_zero);
      } else {
        s.Gx = Mat(0, x.size());
        s.g = Vec(0);
      }
    }
  }
  return lin;
}

namespace {

Vec multiplier_at(const std::vector<Vec>& mu, int t, int rows) {
  if (mu.empty()) return Vec::Zero(rows);
  const Vec& v = mu[t - 1];
  if (v.size() != rows) throw DimensionError("state multiplier size differs from g_t rows");
  return v;
}

}  // namespace

std::vector<Vec> backward_adjoint(const TrajectoryLinearization& lin, double abnormal,
                                  const std::vector<Vec>& mu) {
  const int T = static_cast<int>(lin.stages.size()) - 1;
  std::vector<Vec> p(T);
  {
    const auto& s = lin.stages[T];
    Vec v = -abnormal * s.dcx;
    if (s.Gx.rows() > 0) v -= s.Gx.transpose() * multiplier_at(mu, T, static_cast<int>(s.Gx.rows()));
    p[T - 1] = s.P * v;
  }
  for (int t = T - 1; t >= 1; --t) {
    const auto& s = lin.stages[t];
    Vec v = s.Fx.transpose() * p[t] - abnormal * s.dcx;
    if (s.Gx.rows() > 0) v -= s.Gx.transpose() * multiplier_at(mu, t, static_cast<int>(s.Gx.rows()));
    p[t - 1] = s.P * v;
  }
  return p;
}

std::vector<Covector> backward_adjoint(const ControlProblem& problem, const Trajectory& traj,
                                       double abnormal, const std::vector<Vec>& mu) {
  const auto lin = linearize(problem, traj);
  const auto p = backward_adjoint(lin, abnormal, mu);
  std::vector<Covector> out;
  for (int t = 1; t <= problem.horizon; ++t) out.emplace_back(traj.states[t], p[t - 1]);
  return out;
}

Vec stationarity_covector(const ControlProblem& problem, const TrajectoryLinearization& lin,
                          const PMPCertificate& cert, int t) {
  const Vec p_next = lin.stages[t + 1].P * cert.adjoints[t];
  Vec w = lin.stages[t].Fu.transpose() * p_next - cert.abnormal * lin.stages[t].dcu;
  if (problem.freq_mats.ell > 0) w += problem.freq_mats.E[t].transpose() * cert.freq_multiplier;
  return w;
}

namespace {

std::optional<ConeV> dual_of_tent(const ControlProblem& problem, const Trajectory& traj, int t,
                                  std::string* why = nullptr) {
  try {
    return dual_cone(local_tent(problem.control_sets[t], traj.controls[t]));
  } catch (const NotInSetError& e) {
    if (why) *why = e.what();
  } catch (const TentUnavailable& e) {
    if (why) *why = e.what();
  }
  return std::nullopt;
}

void check_shapes(const ControlProblem& problem, const PMPCertificate& cert) {
  const int T = problem.horizon;
  if (static_cast<int>(cert.adjoints.size()) != T)
    throw DimensionError("certificate needs T adjoints");
  for (const auto& p : cert.adjoints)
    if (p.size() != problem.state_ambient_dim()) throw DimensionError("adjoint size mismatch");
  if (static_cast<int>(cert.state_multipliers.size()) != T)
    throw DimensionError("certificate needs T state multiplier vectors");
  for (int t = 1; t <= T; ++t)
    if (cert.state_multipliers[t - 1].size() != problem.constraint_rows(t))
      throw DimensionError("state multiplier size mismatch at t = " + std::to_string(t));
  if (cert.freq_multiplier.size() != problem.freq_mats.ell)
    throw DimensionError("frequency multiplier size mismatch");
}

}  // namespace

std::optional<double> stationarity_residual(const ControlProblem& problem, const Trajectory& traj,
                                            const PMPCertificate& cert, int t) {
  check_shapes(problem, cert);
  const auto dual = dual_of_tent(problem, traj, t);
  if (!dual) return std::nullopt;
  const auto lin = linearize(problem, traj);
  return project_onto_cone(*dual, stationarity_covector(problem, lin, cert, t)).distance;
}

double complementarity_residual(const ControlProblem& problem, const Trajectory& traj,
                                const PMPCertificate& cert) {
  double worst = 0.0;
  for (int t = 1; t <= problem.horizon; ++t) {
    const auto& g = problem.constraint_at(t);
    if (!g || g->out_dim() == 0) continue;
    const Vec val = (*g)(traj.states[t].ambient(), Vec::Zero(problem.control_dim));
    const Vec& mu = cert.state_multipliers[t - 1];
    worst = std::max(worst, mu.cwiseProduct(val).cwiseAbs().maxCoeff());
  }
  return worst;
}

PMPReport verify(const ControlProblem& problem, const Trajectory& traj,
                 const PMPCertificate& cert, double tol) {
  check_shapes(problem, cert);
  PMPReport r;
  r.tolerance = tol;
  r.feasibility = feasibility_report(problem, traj);
  r.feasible = r.feasibility.feasible();
  if (!r.feasible) r.notes.push_back("trajectory is infeasible");

  const int T = problem.horizon;
  const auto lin = linearize(problem, traj);

  // Recursion and transversality checked one step at a time against the
  // certificate's own p_{t+1}.
  {
    const auto& s = lin.stages[T];
    Vec expect = -cert.abnormal * s.dcx;
    if (s.Gx.rows() > 0) expect -= s.Gx.transpose() * cert.state_multipliers[T - 1];
    r.transversality = (s.P * cert.adjoints[T - 1] - s.P * expect).norm();
  }
  for (int t = T - 1; t >= 1; --t) {
    const auto& s = lin.stages[t];
    const Vec p_next = lin.stages[t + 1].P * cert.adjoints[t];
    Vec expect = s.Fx.transpose() * p_next - cert.abnormal * s.dcx;
    if (s.Gx.rows() > 0) expect -= s.Gx.transpose() * cert.state_multipliers[t - 1];
    r.adjoint_dynamics = std::max(r.adjoint_dynamics, (s.P * cert.adjoints[t - 1] - s.P * expect).norm());
  }

  r.stationarity_per_stage.resize(T);
  for (int t = 0; t < T; ++t) {
    std::string why;
    const auto dual = dual_of_tent(problem, traj, t, &why);
    if (!dual) {
      r.stationarity_checked = false;
      r.notes.push_back("stationarity not checked at t = " + std::to_string(t) + ": " + why);
      continue;
    }
    const double d = project_onto_cone(*dual, stationarity_covector(problem, lin, cert, t)).distance;
    r.stationarity_per_stage[t] = d;
    r.stationarity = std::max(r.stationarity, d);
  }

  r.complementarity = complementarity_residual(problem, traj, cert);
  double min_mu = 0.0;
  for (const auto& mu : cert.state_multipliers)
    if (mu.size() > 0) min_mu = std::min(min_mu, mu.minCoeff());
  r.nonnegativity_violation = std::max({0.0, -cert.abnormal, -min_mu});
  r.nontriviality_mass = cert.mass();
  return r;
}

namespace {

struct StageCone {
  int t;
  ConeV dual;
};

struct LpLayout {
  int n_active = 0;
  int ell = 0;
  int n_alpha = 0;
  int n_beta = 0;
  int n_slack = 0;  // per sign
  int nu() const { return 0; }
  int mu(int k) const { return 1 + k; }
  int lambda(int i) const { return 1 + n_active + i; }
  int alpha(int i) const { return 1 + n_active + ell + i; }
  int beta(int i) const { return 1 + n_active + ell + n_alpha + i; }
  int splus(int i) const { return 1 + n_active + ell + n_alpha + n_beta + i; }
  int sminus(int i) const { return splus(n_slack + i); }
  int total() const { return 1 + n_active + ell + n_alpha + n_beta + 2 * n_slack; }
};

struct ActiveIndex {
  int t;
  int j;
};

PMPCertificate certificate_from(const ControlProblem& problem, const TrajectoryLinearization& lin,
                                double nu, const std::vector<ActiveIndex>& active,
                                const Vec& mu_active, const Vec& lambda) {
  PMPCertificate c = zero_certificate(problem);
  c.abnormal = nu;
  for (size_t k = 0; k < active.size(); ++k)
    c.state_multipliers[active[k].t - 1](active[k].j) = mu_active(k);
  c.freq_multiplier = lambda;
  c.adjoints = backward_adjoint(lin, c.abnormal, c.state_multipliers);
  return c;
}

}  // namespace

RecoveryResult recover_multipliers(const ControlProblem& problem, const Trajectory& traj,
                                   const RecoveryOptions& opts) {
  const int T = problem.horizon;
  const int m = problem.control_dim;
  const int ell = problem.freq_mats.ell;
  const auto lin = linearize(problem, traj);

  // Complementarity fixes mu = 0 off the (near-)active set.
  std::vector<ActiveIndex> active;
  for (int t = 1; t <= T; ++t) {
    const auto& g = lin.stages[t].g;
    for (Eigen::Index j = 0; j < g.size(); ++j)
      if (g(j) >= -opts.activation_tolerance) active.push_back({t, static_cast<int>(j)});
  }

  std::vector<StageCone> cones;
  for (int t = 0; t < T; ++t)
    if (auto d = dual_of_tent(problem, traj, t)) cones.push_back({t, std::move(*d)});

  LpLayout L;
  L.n_active = static_cast<int>(active.size());
  L.ell = ell;
  for (const auto& c : cones) {
    L.n_alpha += static_cast<int>(c.dual.generators.size());
    L.n_beta += static_cast<int>(c.dual.lineality.size());
  }
  L.n_slack = static_cast<int>(cones.size()) * m;

  // Stationarity covector columns: w_t is linear in (nu, mu, lambda).
  auto w_column = [&](double nu, const std::vector<Vec>& mu, int t) {
    const auto p = backward_adjoint(lin, nu, mu);
    return Vec(lin.stages[t].Fu.transpose() * (lin.stages[t + 1].P * p[t]) - nu * lin.stages[t].dcu);
  };
  std::vector<Vec> zero_mu;
  for (int t = 1; t <= T; ++t) zero_mu.push_back(Vec::Zero(problem.constraint_rows(t)));
  std::vector<std::vector<Vec>> unit_mu(active.size(), zero_mu);
  for (size_t k = 0; k < active.size(); ++k) unit_mu[k][active[k].t - 1](active[k].j) = 1.0;

  const int rows = L.n_slack;
  Mat A_eq = Mat::Zero(rows, L.total());
  {
    int row = 0, ia = 0, ib = 0;
    for (const auto& c : cones) {
      const int t = c.t;
      A_eq.block(row, L.nu(), m, 1) = w_column(1.0, zero_mu, t);
      for (size_t k = 0; k < active.size(); ++k)
        A_eq.block(row, L.mu(static_cast<int>(k)), m, 1) = w_column(0.0, unit_mu[k], t);
      if (ell > 0) A_eq.block(row, L.lambda(0), m, ell) = problem.freq_mats.E[t].transpose();
      for (const auto& gen : c.dual.generators) A_eq.block(row, L.alpha(ia++), m, 1) = -gen;
      for (const auto& lv : c.dual.lineality) A_eq.block(row, L.beta(ib++), m, 1) = -lv;
      for (int i = 0; i < m; ++i) {
        A_eq(row + i, L.splus(row + i)) = -1.0;
        A_eq(row + i, L.sminus(row + i)) = 1.0;
      }
      row += m;
    }
  }

  Vec cost = Vec::Zero(L.total());
  for (int i = 0; i < L.n_slack; ++i) {
    cost(L.splus(i)) = 1.0;
    cost(L.sminus(i)) = 1.0;
  }
  Vec lower = Vec::Zero(L.total());
  Vec upper = Vec::Constant(L.total(), kInf);
  for (int i = 0; i < ell; ++i) lower(L.lambda(i)) = -kInf;
  for (int i = 0; i < L.n_beta; ++i) lower(L.beta(i)) = -kInf;

  struct Candidate {
    PMPCertificate cert;
    PMPReport report;
    double lp = 0.0;
  };
  std::vector<Candidate> candidates;

  auto run = [&](const LinearProgram& lp) {
    const LpResult res = solve_lp(lp);
    if (res.status != SolveStatus::Optimal) return;
    Vec mu_active(L.n_active);
    for (int k = 0; k < L.n_active; ++k) mu_active(k) = std::max(0.0, res.x(L.mu(k)));
    Vec lambda(ell);
    for (int i = 0; i < ell; ++i) lambda(i) = res.x(L.lambda(i));
    PMPCertificate cert = certificate_from(problem, lin, std::max(0.0, res.x(L.nu())), active,
                                           mu_active, lambda);
    const double mass = cert.mass();
    if (!(mass > 0.0)) return;
    cert.scale(1.0 / mass);
    PMPReport rep = verify(problem, traj, cert, opts.tolerance);
    candidates.push_back({std::move(cert), std::move(rep), res.objective});
  };

  // Normal-or-constraint mass: nu + sum(mu) = 1, lambda free.
  {
    LinearProgram lp;
    lp.c = cost;
    lp.A_eq = Mat::Zero(rows + 1, L.total());
    lp.A_eq.topRows(rows) = A_eq;
    lp.A_eq(rows, L.nu()) = 1.0;
    for (int k = 0; k < L.n_active; ++k) lp.A_eq(rows, L.mu(k)) = 1.0;
    lp.b_eq = Vec::Zero(rows + 1);
    lp.b_eq(rows) = 1.0;
    lp.lower = lower;
    lp.upper = upper;
    run(lp);
  }

  // Pure frequency multipliers (nu = 0, mu = 0): the largest |lambda_i| is
  // pinned to +-1, which covers every nonzero lambda up to scale.
  const bool first_ok = !candidates.empty() && candidates.front().report.stationarity <= opts.tolerance;
  if (!first_ok && ell > 0) {
    for (int i = 0; i < ell; ++i)
      for (double sgn : {1.0, -1.0}) {
        LinearProgram lp;
        lp.c = cost;
        lp.A_eq = A_eq;
        lp.b_eq = Vec::Zero(rows);
        lp.lower = lower;
        lp.upper = upper;
        lp.upper(L.nu()) = 0.0;
        for (int k = 0; k < L.n_active; ++k) lp.upper(L.mu(k)) = 0.0;
        for (int j = 0; j < ell; ++j) {
          lp.lower(L.lambda(j)) = -1.0;
          lp.upper(L.lambda(j)) = 1.0;
        }
        lp.lower(L.lambda(i)) = sgn;
        lp.upper(L.lambda(i)) = sgn;
        run(lp);
      }
  }

  if (candidates.empty()) {
    // Degenerate: nothing checkable produced a certificate. Fall back to the
    // normal multiplier alone so the caller still gets a report.
    PMPCertificate cert = certificate_from(problem, lin, 1.0, {}, Vec(0), Vec::Zero(ell));
    PMPReport rep = verify(problem, traj, cert, opts.tolerance);
    return {std::move(cert), std::move(rep), kInf};
  }

  auto score = [](const Candidate& c) {
    return std::max({c.report.stationarity, c.report.adjoint_dynamics, c.report.transversality,
                     c.report.complementarity});
  };
  auto best = std::min_element(candidates.begin(), candidates.end(),
                               [&](const Candidate& a, const Candidate& b) { return score(a) < score(b); });
  return {std::move(best->cert), std::move(best->report), best->lp};
}

}  // namespace geopmp
