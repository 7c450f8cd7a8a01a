#pragma once

#include <complex>

#include "sbl/kernel.hpp"
#include "sbl/quadrature.hpp"
#include "sbl/trainer.hpp"

namespace sbl {

// One-sided Fourier coefficients (complex-exponential convention with
// forward 1/N normalization) of an S^1 expansion, indices 0..cap.
// |coef(l)| of sin(l theta) or cos(l theta) is 1/2 under this convention.
Eigen::VectorXcd fourier_of_expansion(const HarmonicExpansion& e, int cap);

// S^1 frequency loss |N_hat(l) - g_hat(l)| for l = 0..cap: the net is
// sampled on grid_n equispaced angles and DFT'd. Requires grid_n > 2*cap.
Vector frequency_loss_s1(const TwoLayerReluNet& net, const Eigen::VectorXcd& target_fourier,
                         int grid_n);

// Same from raw samples on the equispaced grid (shared by observers).
Vector frequency_loss_s1_from_samples(const Vector& samples, const Eigen::VectorXcd& target_fourier);

// Sphere frequency loss |N_hat_{l,p} - g_hat_{l,p}|: net samples are
// projected with the rule, coefficient-wise absolute differences returned as
// an expansion-shaped container.
HarmonicExpansion frequency_loss_sphere(const TwoLayerReluNet& net, const HarmonicExpansion& target,
                                        const QuadratureRule& rule, int ell_max);

// Residuals (I - 2 eta H P)^k y at the requested iteration counts.
struct ResidualPrediction {
  std::vector<int> ks;
  std::vector<Vector> z;
  double eta = 0.0;

  const Vector& at(int k) const;
};

ResidualPrediction predict_residual(const KernelMatrix& h, const LossOperator& p, const Vector& y,
                                    double eta, const std::vector<int>& ks);

// ||z_obs(k) - z_pred(k)||_P per predicted k; the trace must have recorded
// residuals at those epochs.
Vector compare_trace(const TrainingTrace& trace, const ResidualPrediction& pred,
                     const LossOperator& p);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of log-log fit residuals
};

// Least-squares slope of log(iterations) against log(ell); needs >= 3 points.
SlopeFit fit_iteration_scaling(const std::vector<std::pair<double, double>>& ell_iters);

// Measured bounds on the quadrature-induced error terms of the per-frequency
// residual formula: eps1(k) from the e^c cross terms, eps2 from the e^d
// kernel terms (sum_l sqrt(A_d)/mu_l max_i |e^d_{i,l}|).
struct EpsilonBounds {
  std::vector<int> ks;
  Vector eps1_bound;  // per recorded k
  double eps2_bound = 0.0;
};

EpsilonBounds epsilon_decomposition(const TrainingTrace& trace, const QuadratureRule& rule,
                                    const HarmonicExpansion& target, const KernelSpectrum& spec);

// Per-degree quadrature errors e^d_{i,l} = E_c(K(x_i, .) g_l): an n-vector
// for each degree l <= target degree. Shared by the epsilon bounds and the
// discrete eigenvector checks.
Vector e_d_errors(const QuadratureRule& rule, const HarmonicExpansion& target, int ell, double mu_ell);

}  // namespace sbl
