#pragma once

#include <string>

#include "sbl/sphere.hpp"

namespace sbl {

class LossOperator;
struct TwoLayerReluNet;

// The infinite-width NTK profile K(t) = (t + 1)(pi - arccos t)/(4*pi).
// Inputs within 1e-12 of [-1, 1] are clamped; anything further is rejected.
double k_infinity(double t);

// Symmetric kernel matrix sampled from a zonal kernel at a node set.
class KernelMatrix {
 public:
  KernelMatrix(Matrix entries, std::uint64_t node_fingerprint);

  const Matrix& matrix() const { return h_; }
  int size() const { return static_cast<int>(h_.rows()); }
  std::uint64_t node_fingerprint() const { return fingerprint_; }

 private:
  Matrix h_;
  std::uint64_t fingerprint_;
};

// H^inf_{ij} = K^inf(x_i . x_j); diagonal set to 1/2 exactly.
KernelMatrix build_h_infinity(const SpherePointSet& nodes);

// Width-m instantiation H_{ij} = (1/m) xt_i.xt_j sum_r 1{xt_i.wt_r >= 0, xt_j.wt_r >= 0}
// with lifted points xt = (x,1)/sqrt(2) and lifted weights wt = (w, b).
KernelMatrix build_h_empirical(const TwoLayerReluNet& net, const SpherePointSet& nodes);

// Funk-Hecke eigenvalue of K^inf on degree-l harmonics, closed form for odd
// d >= 3. Evaluated with log-gamma binomials in extended precision; reliable
// through l ~ 40 (the alternating sum loses digits beyond that).
double mu_closed(int d, int ell);

// Funk-Hecke eigenvalue by 1-D quadrature: after t = cos(u) the weight
// (1-t^2)^((d-3)/2) becomes sin^(d-2)(u) (the d = 2 Chebyshev-Gauss
// singularity is absorbed by the substitution) and the integrand is analytic,
// so Gauss-Legendre in u converges spectrally. Node count doubles until the
// relative change is below 1e-12.
double mu_numeric(int d, int ell);

// Direct dense integration oracle (d in {2,3}): trapezoid on the circle /
// composite Simpson in the polar angle. `points` controls the resolution.
double mu_dense(int d, int ell, long points = 1 << 20);

enum class SpectrumMethod { ClosedForm, FunkHecke1d, DenseSphere };

// mu_0..mu_Lmax for dimension d. The closed form is used through degree 40
// and silently completed by the 1-D quadrature beyond that.
class KernelSpectrum {
 public:
  KernelSpectrum(int d, Vector mu, std::string method);

  int dim() const { return d_; }
  int max_degree() const { return static_cast<int>(mu_.size()) - 1; }
  double mu(int ell) const { return mu_(ell); }
  const Vector& values() const { return mu_; }
  const std::string& method() const { return method_; }

 private:
  int d_;
  Vector mu_;
  std::string method_;
};

KernelSpectrum kernel_spectrum(int d, int ell_max, SpectrumMethod method);

// Eigenvalues of H P (equivalently of the symmetric P^{1/2} H P^{1/2}),
// ascending; all positive for SPD inputs.
class GeneralizedSpectrum {
 public:
  GeneralizedSpectrum(Vector eigenvalues, std::string operator_tag);

  double lambda_min() const { return lambda_(0); }
  double lambda_max() const { return lambda_(lambda_.size() - 1); }
  const Vector& values() const { return lambda_; }
  const std::string& operator_tag() const { return tag_; }

 private:
  Vector lambda_;
  std::string tag_;
};

GeneralizedSpectrum spectrum_hp(const KernelMatrix& h, const LossOperator& p);

// Largest eigenvalue of H P by power iteration on the factored operator;
// cheaper than the full spectrum when only a step-size bound is needed.
double lambda_max_hp(const KernelMatrix& h, const LossOperator& p);

}  // namespace sbl
