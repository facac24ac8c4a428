#pragma once

// DFT of control sequences and the real linearization of spectral support
// constraints as sum_t E_t u_t = 0.
//
// Bins are 0-based: bin xi pairs with exp(-i 2 pi xi t / T).

#include "geopmp/linalg.hpp"

#include <complex>
#include <set>
#include <vector>

namespace geopmp {

using CVec = Eigen::VectorXcd;

/// Unnormalized DFT: v_xi = sum_t u_t exp(-i 2 pi xi t / T).
CVec dft(const Vec& sequence);

/// Indices with |v_i| > tol.
std::set<int> support(const CVec& v, double tol = 1e-9);

struct FrequencySpec {
  int horizon = 0;
  int control_dim = 0;
  /// allowed_support[k] holds the admissible bins of control component k.
  std::vector<std::set<int>> allowed_support;

  /// Every bin allowed for every component.
  static FrequencySpec unconstrained(int horizon, int control_dim);
  void validate() const;
};

struct FrequencyConstraintMatrices {
  int ell = 0;
  int horizon = 0;
  int control_dim = 0;
  std::vector<Mat> E;  // E[t] is ell x m

  /// Stacked ell x (T m) map acting on (u_0; ...; u_{T-1}).
  Mat stacked() const;
};

/// One cosine row per forbidden conjugate pair {xi, T - xi} and one sine row
/// unless xi is 0 or T/2, each targeting the constrained component.
FrequencyConstraintMatrices build_freq_matrices(const FrequencySpec& spec);

/// sum_t E_t u_t.
Vec freq_residual(const FrequencyConstraintMatrices& mats, const std::vector<Vec>& controls);

/// The k-th component of a control sequence as a length-T vector.
Vec component_sequence(const std::vector<Vec>& controls, int k);

}  // namespace geopmp
