#pragma once

#include "sbl/kernel.hpp"
#include "sbl/loss_operator.hpp"
#include "sbl/quadrature.hpp"

namespace sbl {

// Discretized Sobolev loss operator
//   P_s = sum_{l<=ell_max} sum_p (1+l)^{2s} a_{l,p} a_{l,p}^T,
//   (a_{l,p})_i = c_i Y_{l,p}(x_i),
// held in factored form. Certifies positive definiteness (smallest
// eigenvalue of the dense assembly > 1e-12 * trace / n) and throws
// DegenerateOperatorError otherwise. Warns when the rank bound
// dim Pi^d_{ell_max} < n already rules SPD out.
//
// require_spd = false skips the certification and accepts the positive
// SEMIdefinite form: on S^2 the rank bound (ell_max+1)^2 >= n and the
// resolvability of the amplified top degrees cannot hold at once, so the
// sphere experiments run the singular operator the discretization actually
// produces. Gradient descent only needs the quadratic form.
LossOperator build_p_sobolev(const QuadratureRule& rule, double s, int ell_max,
                             bool require_spd = true);

// P v through the factors; alias for LossOperator::apply.
Vector apply_p(const LossOperator& op, const Vector& v);

// Per-mode contraction factor 1 - 2 eta mu_l (1+l)^{2s}. Warns when
// nonpositive (the convergence hypothesis fails there).
double theoretical_rate(int ell, double eta, double s, const KernelSpectrum& spec);

// Frequency mask (S_s)_{jk} = (1 + f_j^2 + f_k^2)^{s/2} over symmetric
// (centered) integer frequencies f in -floor(N/2) .. ceil(N/2)-1, paired with
// the unitary DFT convention.
struct ImageSobolevMask {
  int height = 0;
  int width = 0;
  double s = 0.0;
  Matrix mask;
};

ImageSobolevMask build_image_mask(int h, int w, double s);

// J_s = 1/2 || S_s o DFT2(pred - target) ||_F^2 with unitary 2-D DFT.
double image_sobolev_loss(const Matrix& pred, const Matrix& target, const ImageSobolevMask& mask);

// dJ_s/dpred = Re IDFT2( S_s^2 o DFT2(pred - target) ).
Matrix image_sobolev_loss_grad(const Matrix& pred, const Matrix& target,
                               const ImageSobolevMask& mask);

// Unitary 2-D DFT of a real matrix (helper shared by the loss and tests).
Eigen::MatrixXcd dft2_unitary(const Matrix& img);

}  // namespace sbl
