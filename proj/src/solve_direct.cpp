#include "geopmp/solvers.hpp"

#include "control_nlp.hpp"
#include "geopmp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace geopmp {

std::string to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::DirectGrid: return "direct-grid";
    case SolveMethod::ProjectedDescent: return "projected-descent";
    case SolveMethod::IndirectShooting: return "shooting";
  }
  return "?";
}

SolveMethod parse_solve_method(const std::string& name) {
  if (name == "direct-grid" || name == "grid" || name == "DirectGrid") return SolveMethod::DirectGrid;
  if (name == "projected-descent" || name == "descent" || name == "ProjectedDescent")
    return SolveMethod::ProjectedDescent;
  if (name == "shooting" || name == "IndirectShooting") return SolveMethod::IndirectShooting;
  throw Error("unknown solve method '" + name + "'");
}

void SolveOptions::validate() const {
  if (max_iters <= 0) throw Error("max_iters must be positive");
  if (!(grid_resolution > 0.0)) throw Error("grid resolution must be positive");
  if (max_grid_points <= 0) throw Error("max_grid_points must be positive");
  if (polish_candidates <= 0) throw Error("polish_candidates must be positive");
  if (multistarts <= 0) throw Error("multistarts must be positive");
  if (!(step_tol > 0.0) || !(residual_tol > 0.0)) throw Error("tolerances must be positive");
}

namespace detail {

SolveResult finish(const ControlProblem& problem, const Vec& U, SolveMethod method,
                   const SolveOptions& opts) {
  SolveResult r;
  r.method = method;
  r.trajectory = rollout(problem, unstack_controls(U, problem.horizon, problem.control_dim));
  r.objective = total_cost(problem, r.trajectory);
  RecoveryOptions ro;
  ro.tolerance = opts.verify_tol;
  auto rec = recover_multipliers(problem, r.trajectory, ro);
  r.certificate = std::move(rec.certificate);
  r.pmp_report = std::move(rec.report);
  return r;
}

}  // namespace detail

namespace {

constexpr double kGridFeasTol = 1e-9;

struct Scored {
  double objective;
  Vec U;
};

SolveResult solve_grid(const ControlProblem& problem, const SolveOptions& opts) {
  const int T = problem.horizon;
  const int m = problem.control_dim;
  if (T * m > 8) throw Error("DirectGrid needs T*m <= 8 (got " + std::to_string(T * m) + ")");
  const detail::ControlNlp nlp(problem);
  const int n = nlp.size();

  Vec lo(n), hi(n);
  for (int t = 0; t < T; ++t) {
    const auto b = problem.control_sets[t].bounds();
    if (!b) throw Error("DirectGrid needs bounded control sets (stage " + std::to_string(t) + " is " +
                        to_string(problem.control_sets[t].kind()) + ")");
    lo.segment(t * m, m) = b->first;
    hi.segment(t * m, m) = b->second;
  }

  // Grid on {U : A_eq U = b_eq} in orthonormal null-space coordinates.
  Vec U0 = Vec::Zero(n);
  Mat Z = Mat::Identity(n, n);
  if (nlp.A_eq().rows() > 0) {
    U0 = nlp.A_eq().completeOrthogonalDecomposition().solve(nlp.b_eq());
    if ((nlp.A_eq() * U0 - nlp.b_eq()).lpNorm<Eigen::Infinity>() > kGridFeasTol)
      throw InfeasibleError("DirectGrid: linear equality constraints are inconsistent");
    Z = null_space(nlp.A_eq());
  }
  const int k = static_cast<int>(Z.cols());
  Vec zlo = Vec::Zero(k), zhi = Vec::Zero(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < n; ++j) {
      const double a = Z(j, i) * (lo(j) - U0(j));
      const double b = Z(j, i) * (hi(j) - U0(j));
      zlo(i) += std::min(a, b);
      zhi(i) += std::max(a, b);
    }

  double res = opts.grid_resolution;
  std::vector<long> counts(k, 1);
  for (;;) {
    double total = 1.0;
    for (int i = 0; i < k; ++i) {
      counts[i] = static_cast<long>(std::floor((zhi(i) - zlo(i)) / res + 1e-9)) + 1;
      total *= static_cast<double>(counts[i]);
    }
    if (total <= static_cast<double>(opts.max_grid_points)) break;
    res *= 1.25;
  }

  std::vector<Scored> best;
  const size_t keep = static_cast<size_t>(opts.polish_candidates);
  std::vector<long> idx(k, 0);
  Vec z(k);
  for (;;) {
    for (int i = 0; i < k; ++i)
      z(i) = counts[i] == 1 ? 0.5 * (zlo(i) + zhi(i))
                            : zlo(i) + (zhi(i) - zlo(i)) * static_cast<double>(idx[i]) /
                                           static_cast<double>(counts[i] - 1);
    const Vec U = U0 + Z * z;
    bool ok = nlp.A_ub().rows() == 0 || (nlp.A_ub() * U - nlp.b_ub()).maxCoeff() <= kGridFeasTol;
    if (ok) {
      const auto pt = nlp.evaluate(U, false);
      ok = pt.ok && (pt.nonlinear.size() == 0 || pt.nonlinear.maxCoeff() <= kGridFeasTol);
      if (ok && (best.size() < keep || pt.objective < best.back().objective)) {
        best.push_back({pt.objective, U});
        std::sort(best.begin(), best.end(),
                  [](const Scored& a, const Scored& b) { return a.objective < b.objective; });
        if (best.size() > keep) best.pop_back();
      }
    }
    int i = 0;
    while (i < k && ++idx[i] == counts[i]) idx[i++] = 0;
    if (i == k) break;
  }
  if (best.empty()) throw InfeasibleError("DirectGrid: no grid point satisfies the constraints");

  Vec U_best = best.front().U;
  double J_best = best.front().objective;
  int iterations = 0;
  bool converged = k == 0;
  for (const auto& cand : best) {
    const auto sqp = detail::sqp_polish(nlp, cand.U, opts.max_iters, opts.step_tol);
    iterations += sqp.iterations;
    if (sqp.violation <= kGridFeasTol && sqp.objective <= J_best + 1e-14 * (1.0 + std::abs(J_best))) {
      J_best = sqp.objective;
      U_best = sqp.U;
      converged = sqp.converged;
    }
  }
  SolveResult r = detail::finish(problem, U_best, SolveMethod::DirectGrid, opts);
  r.iterations = iterations;
  r.converged = converged;
  r.status = converged ? "converged" : "grid-only";
  r.history = {best.front().objective, r.objective};
  return r;
}

struct DescentRun {
  Vec U;
  double objective = kInf;
  bool converged = false;
  int iterations = 0;
  std::vector<double> history;
};

DescentRun descend(const detail::ControlNlp& nlp, Vec U, const SolveOptions& opts) {
  auto project = [&](const Vec& V) {
    auto p = nlp.project_linear(V);
    if (!p) throw InfeasibleError("ProjectedDescent: control constraints are empty");
    return *p;
  };
  DescentRun run;
  U = project(U);
  auto pt = nlp.evaluate(U);
  if (!pt.ok) return run;
  run.history.push_back(pt.objective);
  double alpha = 1.0;
  for (int it = 0; it < opts.max_iters; ++it) {
    run.iterations = it + 1;
    const Vec& g = pt.gradient;
    const double scale = 1.0 + U.lpNorm<Eigen::Infinity>();
    const double pg = (U - project(U - g)).lpNorm<Eigen::Infinity>();
    if (pg <= 10.0 * opts.step_tol * scale) {
      run.converged = true;
      break;
    }
    bool accepted = false;
    Vec U_new;
    detail::NlpPoint pt_new;
    for (double a = alpha; a >= 1e-16; a *= 0.5) {
      U_new = project(U - a * g);
      pt_new = nlp.evaluate(U_new);
      if (pt_new.ok && pt_new.objective <= pt.objective + 1e-4 * g.dot(U_new - U)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No representable decrease left; stationarity decides.
      run.converged = pg <= 1e-8 * scale;
      break;
    }
    const Vec s = U_new - U;
    const Vec y = pt_new.gradient - g;
    const double sy = s.dot(y);
    alpha = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-8, 1e8) : 1.0;
    U = U_new;
    pt = std::move(pt_new);
    run.history.push_back(pt.objective);
  }
  run.U = U;
  run.objective = pt.objective;
  return run;
}

SolveResult solve_descent(const ControlProblem& problem, const SolveOptions& opts) {
  if (problem.has_state_constraints())
    throw Error("ProjectedDescent does not handle state constraints");
  const detail::ControlNlp nlp(problem);
  if (nlp.has_smooth_sets()) throw Error("ProjectedDescent needs projectable (linear) control sets");
  DescentRun best;
  int iterations = 0;
  for (int s = 0; s < opts.multistarts; ++s) {
    Vec U0 = Vec::Zero(nlp.size());
    if (s > 0) {
      std::mt19937_64 rng(opts.seed * 7919u + static_cast<unsigned>(s));
      std::normal_distribution<double> nd(0.0, 1.0);
      for (int i = 0; i < nlp.size(); ++i) U0(i) = nd(rng);
    }
    DescentRun run = descend(nlp, U0, opts);
    iterations += run.iterations;
    const bool better = (run.converged && !best.converged) ||
                        (run.converged == best.converged && run.objective < best.objective);
    if (run.U.size() > 0 && better) best = std::move(run);
  }
  if (best.U.size() == 0) throw NonConvergence("ProjectedDescent: every start left the manifold", kInf);
  SolveResult r = detail::finish(problem, best.U, SolveMethod::ProjectedDescent, opts);
  r.iterations = iterations;
  r.converged = best.converged;
  r.status = best.converged ? "converged" : "max-iters";
  r.history = std::move(best.history);
  return r;
}

}  // namespace

SolveResult solve_direct(const ControlProblem& problem, const SolveOptions& opts) {
  opts.validate();
  switch (opts.method) {
    case SolveMethod::DirectGrid: return solve_grid(problem, opts);
    case SolveMethod::ProjectedDescent: return solve_descent(problem, opts);
    case SolveMethod::IndirectShooting: break;
  }
  throw Error("solve_direct: method must be DirectGrid or ProjectedDescent");
}

SolveResult solve(const ControlProblem& problem, const SolveOptions& opts,
                  const std::vector<Vec>& init_guess) {
  if (opts.method == SolveMethod::IndirectShooting) return solve_shooting(problem, opts, init_guess);
  return solve_direct(problem, opts);
}

}  // namespace geopmp
