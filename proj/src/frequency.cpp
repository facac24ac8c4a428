#include "geopmp/frequency.hpp"

#include "geopmp/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace geopmp {

CVec dft(const Vec& sequence) {
  const Eigen::Index T = sequence.size();
  CVec out = CVec::Zero(T);
  for (Eigen::Index xi = 0; xi < T; ++xi) {
    std::complex<double> acc = 0.0;
    for (Eigen::Index t = 0; t < T; ++t) {
      // Reduce xi*t mod T first so the angle stays small and exact bins
      // (e.g. the Nyquist bin) give clean cancellations.
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((xi * t) % T) /
                           static_cast<double>(T);
      acc += sequence(t) * std::polar(1.0, angle);
    }
    out(xi) = acc;
  }
  return out;
}

std::set<int> support(const CVec& v, double tol) {
  std::set<int> s;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > tol) s.insert(static_cast<int>(i));
  return s;
}

FrequencySpec FrequencySpec::unconstrained(int horizon, int control_dim) {
  FrequencySpec spec;
  spec.horizon = horizon;
  spec.control_dim = control_dim;
  std::set<int> all;
  for (int i = 0; i < horizon; ++i) all.insert(i);
  spec.allowed_support.assign(control_dim, all);
  return spec;
}

void FrequencySpec::validate() const {
  if (horizon < 1) throw DimensionError("frequency spec: horizon must be >= 1");
  if (static_cast<int>(allowed_support.size()) != control_dim)
    throw DimensionError("frequency spec: one support set per control component required");
  for (const auto& W : allowed_support)
    for (int bin : W)
      if (bin < 0 || bin >= horizon) {
        std::ostringstream os;
        os << "frequency spec: bin " << bin << " outside 0.." << horizon - 1;
        throw DimensionError(os.str());
      }
}

Mat FrequencyConstraintMatrices::stacked() const {
  Mat S(ell, horizon * control_dim);
  for (int t = 0; t < horizon; ++t) S.middleCols(t * control_dim, control_dim) = E[t];
  return S;
}

FrequencyConstraintMatrices build_freq_matrices(const FrequencySpec& spec) {
  spec.validate();
  const int T = spec.horizon;
  const int m = spec.control_dim;

  struct Row {
    int component;
    Vec coeff;
  };
  std::vector<Row> rows;
  for (int k = 0; k < m; ++k) {
    const auto& W = spec.allowed_support[k];
    for (int xi = 0; 2 * xi <= T; ++xi) {
      const int partner = (T - xi) % T;
      // Real sequences have conjugate-symmetric spectra, so forbidding either
      // member of the pair forbids both.
      if (W.count(xi) && W.count(partner)) continue;
      Vec c(T), s(T);
      for (int t = 0; t < T; ++t) {
        const double angle =
            2.0 * std::numbers::pi * static_cast<double>((xi * t) % T) / static_cast<double>(T);
        c(t) = std::cos(angle);
        s(t) = -std::sin(angle);
      }
      rows.push_back({k, c});
      const bool self_conjugate = (xi == 0) || (2 * xi == T);
      if (!self_conjugate) rows.push_back({k, s});
    }
  }

  FrequencyConstraintMatrices mats;
  mats.ell = static_cast<int>(rows.size());
  mats.horizon = T;
  mats.control_dim = m;
  mats.E.assign(T, Mat::Zero(mats.ell, m));
  for (int r = 0; r < mats.ell; ++r)
    for (int t = 0; t < T; ++t) mats.E[t](r, rows[r].component) = rows[r].coeff(t);
  // Clean sin/cos values that are zero up to rounding.
  for (auto& E : mats.E) E = E.unaryExpr([](double v) { return std::abs(v) < 1e-15 ? 0.0 : v; });
  return mats;
}

Vec freq_residual(const FrequencyConstraintMatrices& mats, const std::vector<Vec>& controls) {
  if (static_cast<int>(controls.size()) != mats.horizon)
    throw DimensionError("freq_residual: control sequence length differs from horizon");
  Vec r = Vec::Zero(mats.ell);
  for (int t = 0; t < mats.horizon; ++t) {
    if (controls[t].size() != mats.control_dim)
      throw DimensionError("freq_residual: control dimension mismatch");
    if (mats.ell > 0) r += mats.E[t] * controls[t];
  }
  return r;
}

Vec component_sequence(const std::vector<Vec>& controls, int k) {
  Vec s(static_cast<Eigen::Index>(controls.size()));
  for (size_t t = 0; t < controls.size(); ++t) s(t) = controls[t](k);
  return s;
}

}  // namespace geopmp
