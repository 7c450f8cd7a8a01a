#pragma once

#include <vector>

#include "sbl/sphere.hpp"

namespace sbl {

// Degree/order pair addressing one real orthonormal harmonic Y_{l,p},
// 1 <= p <= N(d, l).
//
// Order convention (fixed across the project, no Condon-Shortley phase):
//   d = 2:  p = 1 -> sin(l*theta)/sqrt(pi),  p = 2 -> cos(l*theta)/sqrt(pi),
//           and Y_{0,1} = 1/sqrt(2*pi).
//   d = 3:  p = 1 -> zonal (m = 0); for azimuthal order m >= 1,
//           p = 2m -> sin(m*phi) type, p = 2m+1 -> cos(m*phi) type.
// All harmonics satisfy the orthonormal convention
// integral_{S^{d-1}} Y_{l,p} Y_{l',p'} dS = delta.
struct HarmonicIndex {
  int degree = 0;
  int order = 1;
};

// Y_{l,p}(x). Throws std::invalid_argument for p outside [1, N(d,l)] or
// unsupported dimension (concrete evaluation exists for d in {2,3}).
double eval_harmonic(int d, HarmonicIndex idx, const SpherePoint& x);

// Y_{l,p} at every node of X, as a length-n vector.
Vector eval_harmonic_batch(int d, HarmonicIndex idx, const SpherePointSet& X);

// All harmonics of degree <= L at every node: a dim(Pi^d_L) x n matrix whose
// rows follow the flat (l, p) order used by HarmonicExpansion.
Matrix harmonic_basis(int d, int L, const SpherePointSet& X);

// Ultraspherical (Gegenbauer) polynomial P_{l,d}(t) normalized so that
// P_{l,d}(1) = 1, evaluated by the three-term recurrence
//   (l + d - 2) P_{l+1,d} = (2l + d - 2) t P_{l,d} - l P_{l-1,d}.
// d = 3 gives Legendre, d = 2 gives Chebyshev. Requires |t| <= 1.
double gegenbauer(int ell, int d, double t);

// A degree-truncated real harmonic expansion sum_{l<=L} sum_p c_{l,p} Y_{l,p}.
class HarmonicExpansion {
 public:
  HarmonicExpansion(int d, int L);

  int dim() const { return d_; }
  int max_degree() const { return L_; }
  int coef_count() const { return static_cast<int>(coef_.size()); }

  double coef(int ell, int p) const { return coef_(flat_index(ell, p)); }
  double& coef(int ell, int p) { return coef_(flat_index(ell, p)); }
  const Vector& coefs() const { return coef_; }
  Vector& coefs() { return coef_; }

  int flat_index(int ell, int p) const;

  double eval(const SpherePoint& x) const;
  Vector eval_batch(const SpherePointSet& X) const;

  // Squared L2 norm = sum of squared coefficients (Parseval under the
  // orthonormal convention).
  double l2_norm_sq() const { return coef_.squaredNorm(); }

  // Samples of the single degree-l component g_l at the given nodes.
  Vector component_batch(int ell, const SpherePointSet& X) const;

 private:
  int d_;
  int L_;
  Vector coef_;
  std::vector<int> offsets_;  // offsets_[l] = flat index of (l, 1)
};

}  // namespace sbl
