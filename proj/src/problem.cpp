#include "geopmp/problem.hpp"

#include "geopmp/errors.hpp"

#include <random>
#include <sstream>

namespace geopmp {

int ControlProblem::constraint_rows(int t) const {
  const auto& g = state_constraints[t - 1];
  return g ? g->out_dim() : 0;
}

bool ControlProblem::has_state_constraints() const {
  for (const auto& g : state_constraints)
    if (g && g->out_dim() > 0) return true;
  return false;
}

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw DimensionError("problem: " + what);
}

Vec sample_control(const ControlSet& set, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vec u(set.dim());
  for (int i = 0; i < set.dim(); ++i) u(i) = nd(rng);
  if (auto b = set.bounds()) {
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (int i = 0; i < set.dim(); ++i)
      u(i) = b->first(i) + ud(rng) * (b->second(i) - b->first(i));
  }
  return u;
}

}  // namespace

void finalize_problem(ControlProblem& p, bool probe_dynamics, unsigned seed) {
  require(p.horizon >= 1, "horizon must be >= 1");
  require(p.manifold != nullptr, "manifold missing");
  require(p.control_dim >= 1, "control_dim must be >= 1");
  const int T = p.horizon;
  const int N = p.manifold->ambient_dim();
  const int m = p.control_dim;
  require(p.x_init.size() == N, "x_init size differs from ambient dimension");
  if (p.manifold->defect(p.x_init) > p.manifold->tolerance())
    throw MembershipError("problem: x_init is not on the manifold");
  require(static_cast<int>(p.dynamics.size()) == T, "need one dynamics map per stage");
  require(static_cast<int>(p.stage_costs.size()) == T, "need one stage cost per stage");
  require(static_cast<int>(p.control_sets.size()) == T, "need one control set per stage");
  if (p.state_constraints.empty()) p.state_constraints.resize(T);
  require(static_cast<int>(p.state_constraints.size()) == T,
          "state constraints are indexed t = 1..T");
  for (int t = 0; t < T; ++t) {
    const auto& f = p.dynamics[t];
    require(f.state_dim() == N && f.control_dim() == m && f.out_dim() == N,
            "dynamics dimensions at stage " + std::to_string(t));
    const auto& c = p.stage_costs[t];
    require(c.state_dim() == N && c.control_dim() == m && c.out_dim() == 1,
            "stage cost dimensions at stage " + std::to_string(t));
    require(p.control_sets[t].dim() == m, "control set dimension at stage " + std::to_string(t));
    if (const auto& g = p.state_constraints[t])
      require(g->state_dim() == N && g->control_dim() == m,
              "state constraint dimensions at t = " + std::to_string(t + 1));
  }
  require(p.terminal_cost.state_dim() == N && p.terminal_cost.out_dim() == 1 &&
              p.terminal_cost.control_dim() == m,
          "terminal cost dimensions");
  if (p.freq.horizon == 0) p.freq = FrequencySpec::unconstrained(T, m);
  require(p.freq.horizon == T && p.freq.control_dim == m, "frequency spec dimensions");
  p.freq_mats = build_freq_matrices(p.freq);

  if (!probe_dynamics) return;
  std::mt19937_64 rng(seed);
  for (int t = 0; t < T; ++t)
    for (int k = 0; k < 5; ++k) {
      const Vec x = p.manifold->random_point(rng);
      const Vec u = sample_control(p.control_sets[t], rng);
      const double d = p.manifold->defect(p.dynamics[t](x, u));
      if (d > 1e-7) {
        std::ostringstream os;
        os << "dynamics f_" << t << " leaves the manifold (defect " << d << ")";
        throw DynamicsLeftManifold(os.str());
      }
    }
}

Vec Trajectory::stacked_controls() const {
  if (controls.empty()) return Vec(0);
  const Eigen::Index m = controls.front().size();
  Vec s(m * static_cast<Eigen::Index>(controls.size()));
  for (size_t t = 0; t < controls.size(); ++t) s.segment(t * m, m) = controls[t];
  return s;
}

std::vector<Vec> unstack_controls(const Vec& stacked, int horizon, int control_dim) {
  if (stacked.size() != horizon * control_dim)
    throw DimensionError("stacked control vector has wrong length");
  std::vector<Vec> u(horizon);
  for (int t = 0; t < horizon; ++t) u[t] = stacked.segment(t * control_dim, control_dim);
  return u;
}

Trajectory rollout(const ControlProblem& problem, const std::vector<Vec>& controls) {
  if (static_cast<int>(controls.size()) != problem.horizon)
    throw DimensionError("rollout: need exactly T controls");
  Trajectory traj;
  traj.controls = controls;
  traj.states.reserve(problem.horizon + 1);
  traj.states.emplace_back(problem.manifold, problem.x_init);
  for (int t = 0; t < problem.horizon; ++t) {
    const Vec next = problem.dynamics[t](traj.states.back().ambient(), controls[t]);
    const double d = problem.manifold->defect(next);
    if (!(d <= 1e-7)) {
      std::ostringstream os;
      os << "rollout: state x_" << t + 1 << " left the manifold (defect " << d << ")";
      throw DynamicsLeftManifold(os.str());
    }
    traj.states.emplace_back(problem.manifold, problem.manifold->nearest_point(next));
  }
  return traj;
}

Trajectory make_trajectory(const ControlProblem& problem, const std::vector<Vec>& states,
                           const std::vector<Vec>& controls) {
  if (static_cast<int>(states.size()) != problem.horizon + 1 ||
      static_cast<int>(controls.size()) != problem.horizon)
    throw DimensionError("trajectory needs T+1 states and T controls");
  Trajectory traj;
  for (const auto& x : states) traj.states.emplace_back(problem.manifold, x);
  traj.controls = controls;
  for (const auto& u : controls)
    if (u.size() != problem.control_dim) throw DimensionError("control dimension mismatch");
  return traj;
}

FeasibilityReport feasibility_report(const ControlProblem& problem, const Trajectory& traj) {
  if (traj.horizon() != problem.horizon || static_cast<int>(traj.states.size()) != problem.horizon + 1)
    throw DimensionError("feasibility_report: trajectory shape differs from problem");
  FeasibilityReport r;
  r.dynamics_defect = (traj.states[0].ambient() - problem.x_init).lpNorm<Eigen::Infinity>();
  for (int t = 0; t < problem.horizon; ++t) {
    const Vec next = problem.dynamics[t](traj.states[t].ambient(), traj.controls[t]);
    r.dynamics_defect = std::max(
        r.dynamics_defect, (next - traj.states[t + 1].ambient()).lpNorm<Eigen::Infinity>());
    r.control_set_violation =
        std::max(r.control_set_violation, problem.control_sets[t].violation(traj.controls[t]));
  }
  for (const auto& x : traj.states)
    r.dynamics_defect = std::max(r.dynamics_defect, problem.manifold->defect(x.ambient()));
  for (int t = 1; t <= problem.horizon; ++t) {
    const auto& g = problem.constraint_at(t);
    if (!g || g->out_dim() == 0) continue;
    r.state_constraint_violation =
        std::max(r.state_constraint_violation,
                 (*g)(traj.states[t].ambient(), Vec::Zero(problem.control_dim)).maxCoeff());
  }
  r.state_constraint_violation = std::max(0.0, r.state_constraint_violation);
  r.freq_residual_norm = freq_residual(problem.freq_mats, traj.controls).norm();
  return r;
}

double total_cost(const ControlProblem& problem, const Trajectory& traj) {
  double J = 0.0;
  for (int t = 0; t < problem.horizon; ++t)
    J += problem.stage_costs[t].scalar(traj.states[t].ambient(), traj.controls[t]);
  J += problem.terminal_cost.scalar(traj.states.back().ambient(),
                                    Vec::Zero(problem.control_dim));
  return J;
}

namespace {

SmoothMap extend_dynamics(const SmoothMap& f, const AffineEmbedding& e) {
  const int N = static_cast<int>(e.Q.rows());
  const Mat Q = e.Q;
  const Vec o = e.origin;
  return SmoothMap(
      N, f.control_dim(), N,
      [f, Q, o](const Vec& y, const Vec& u) -> Vec { return o + Q * f(Q.transpose() * (y - o), u); },
      [f, Q, o](const Vec& y, const Vec& u) -> Mat {
        return Q * f.jacobian_state(Q.transpose() * (y - o), u) * Q.transpose();
      },
      [f, Q, o](const Vec& y, const Vec& u) -> Mat {
        return Q * f.jacobian_control(Q.transpose() * (y - o), u);
      },
      f.name() + "@embedded");
}

SmoothMap extend_function(const SmoothMap& g, const AffineEmbedding& e) {
  const int N = static_cast<int>(e.Q.rows());
  const Mat Q = e.Q;
  const Vec o = e.origin;
  return SmoothMap(
      N, g.control_dim(), g.out_dim(),
      [g, Q, o](const Vec& y, const Vec& u) -> Vec { return g(Q.transpose() * (y - o), u); },
      [g, Q, o](const Vec& y, const Vec& u) -> Mat {
        return g.jacobian_state(Q.transpose() * (y - o), u) * Q.transpose();
      },
      [g, Q, o](const Vec& y, const Vec& u) -> Mat {
        return g.jacobian_control(Q.transpose() * (y - o), u);
      },
      g.name() + "@embedded");
}

}  // namespace

ControlProblem reembed(const ControlProblem& flat, const AffineEmbedding& e) {
  if (flat.manifold->kind() != ManifoldKind::Euclidean)
    throw Error("reembed: only flat problems can be re-embedded");
  if (e.Q.cols() != flat.manifold->ambient_dim())
    throw DimensionError("reembed: embedding source dimension differs from state dimension");
  ControlProblem out;
  out.horizon = flat.horizon;
  out.control_dim = flat.control_dim;
  out.manifold = e.image();
  out.x_init = e.embed(flat.x_init);
  for (const auto& f : flat.dynamics) out.dynamics.push_back(extend_dynamics(f, e));
  for (const auto& c : flat.stage_costs) out.stage_costs.push_back(extend_function(c, e));
  out.terminal_cost = extend_function(flat.terminal_cost, e);
  for (const auto& g : flat.state_constraints)
    out.state_constraints.push_back(g ? std::optional<SmoothMap>(extend_function(*g, e))
                                      : std::nullopt);
  out.control_sets = flat.control_sets;
  out.freq = flat.freq;
  finalize_problem(out, false);
  return out;
}

Trajectory reembed(const Trajectory& flat, const ControlProblem& embedded,
                   const AffineEmbedding& e) {
  Trajectory out;
  out.controls = flat.controls;
  for (const auto& x : flat.states) out.states.emplace_back(embedded.manifold, e.embed(x.ambient()));
  return out;
}

}  // namespace geopmp
