#include "geopmp/smooth_map.hpp"

#include "geopmp/errors.hpp"

#include <sstream>

namespace geopmp {

namespace {

template <class Eval>
Mat central_difference(const Vec& arg, int out_dim, double base_step, Eval&& eval) {
  const double h = base_step * (1.0 + arg.norm());
  Mat J(out_dim, arg.size());
  Vec a = arg;
  for (Eigen::Index j = 0; j < arg.size(); ++j) {
    a(j) = arg(j) + h;
    const Vec fp = eval(a);
    a(j) = arg(j) - h;
    const Vec fm = eval(a);
    a(j) = arg(j);
    J.col(j) = (fp - fm) / (2.0 * h);
  }
  return J;
}

}  // namespace

SmoothMap::SmoothMap(int state_dim, int control_dim, int out_dim, Eval f, Jac jac_x,
                     Jac jac_u, std::string name)
    : state_dim_(state_dim),
      control_dim_(control_dim),
      out_dim_(out_dim),
      f_(std::move(f)),
      jac_x_(std::move(jac_x)),
      jac_u_(std::move(jac_u)),
      name_(std::move(name)) {}

Vec SmoothMap::operator()(const Vec& x, const Vec& u) const {
  if (x.size() != state_dim_ || u.size() != control_dim_) {
    std::ostringstream os;
    os << "map '" << name_ << "' expects (x: " << state_dim_ << ", u: " << control_dim_
       << ") got (" << x.size() << ", " << u.size() << ")";
    throw DimensionError(os.str());
  }
  Vec y = f_(x, u);
  if (y.size() != out_dim_) throw DimensionError("map '" + name_ + "' returned wrong size");
  return y;
}

Mat SmoothMap::fd_jacobian_state(const Vec& x, const Vec& u) const {
  return central_difference(x, out_dim_, fd_step_, [&](const Vec& a) { return (*this)(a, u); });
}

Mat SmoothMap::fd_jacobian_control(const Vec& x, const Vec& u) const {
  return central_difference(u, out_dim_, fd_step_, [&](const Vec& a) { return (*this)(x, a); });
}

Mat SmoothMap::jacobian_state(const Vec& x, const Vec& u) const {
  if (jac_x_) return jac_x_(x, u);
  if (!allow_fd_) throw JacobianError("map '" + name_ + "': no state Jacobian available");
  return fd_jacobian_state(x, u);
}

Mat SmoothMap::jacobian_control(const Vec& x, const Vec& u) const {
  if (jac_u_) return jac_u_(x, u);
  if (!allow_fd_) throw JacobianError("map '" + name_ + "': no control Jacobian available");
  return fd_jacobian_control(x, u);
}

Covector cotangent_pullback(const SmoothMap& f, const ManifoldPoint& p, const Vec& u,
                            const Covector& w) {
  const Vec image = f(p.ambient(), u);
  const Manifold& target = w.base().manifold();
  if (target.defect(image) > 1e-7 || (image - w.base().ambient()).norm() > 1e-7 * (1.0 + image.norm()))
    throw MembershipError("cotangent_pullback: f(p, u) is not the base point of w");
  const Mat J = f.jacobian_state(p.ambient(), u);
  return Covector(p, p.projector() * (J.transpose() * w.canonical()));
}

Covector cotangent_pullback(const SmoothMap& g, const ManifoldPoint& p, const Vec& u,
                            const Vec& w) {
  if (w.size() != g.out_dim()) throw DimensionError("cotangent_pullback: multiplier size");
  const Mat J = g.jacobian_state(p.ambient(), u);
  return Covector(p, p.projector() * (J.transpose() * w));
}

Vec control_pullback(const SmoothMap& f, const ManifoldPoint& p, const Vec& u,
                     const Covector& w) {
  const Mat J = f.jacobian_control(p.ambient(), u);
  return J.transpose() * w.canonical();
}

Differential differential(const SmoothMap& cost, const ManifoldPoint& p, const Vec& u) {
  if (cost.out_dim() != 1) throw DimensionError("differential needs a scalar map");
  const Vec gx = cost.jacobian_state(p.ambient(), u).row(0).transpose();
  Vec gu = cost.control_dim() > 0 ? Vec(cost.jacobian_control(p.ambient(), u).row(0).transpose())
                                  : Vec(0);
  return {Covector(p, p.projector() * gx), std::move(gu)};
}

double jacobian_rel_error(const Mat& analytic, const Mat& fd) {
  return (analytic - fd).norm() / std::max(1.0, fd.norm());
}

JacobianCheck validate_jacobians(const SmoothMap& f,
                                 const std::vector<std::pair<Vec, Vec>>& probes, double tol,
                                 bool enforce) {
  JacobianCheck check;
  for (const auto& [x, u] : probes) {
    if (f.has_analytic_state_jacobian() && f.state_dim() > 0)
      check.max_rel_error_state =
          std::max(check.max_rel_error_state,
                   jacobian_rel_error(f.jacobian_state(x, u), f.fd_jacobian_state(x, u)));
    if (f.has_analytic_control_jacobian() && f.control_dim() > 0)
      check.max_rel_error_control =
          std::max(check.max_rel_error_control,
                   jacobian_rel_error(f.jacobian_control(x, u), f.fd_jacobian_control(x, u)));
    ++check.probes;
  }
  if (enforce && !check.ok(tol)) {
    std::ostringstream os;
    os << "map '" << f.name() << "': analytic Jacobian disagrees with finite differences (state "
       << check.max_rel_error_state << ", control " << check.max_rel_error_control << ")";
    throw JacobianError(os.str());
  }
  return check;
}

}  // namespace geopmp
