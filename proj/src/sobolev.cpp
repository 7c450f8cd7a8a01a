#include "sbl/sobolev.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <iostream>

namespace sbl {
namespace {

Eigen::MatrixXcd dft_matrix(int n) {
  Eigen::MatrixXcd f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      f(j, k) = scale * std::polar(1.0, -2.0 * M_PI * j * k / n);
  return f;
}

int centered_frequency(int j, int n) { return (j < (n + 1) / 2) ? j : j - n; }

}  // namespace

LossOperator build_p_sobolev(const QuadratureRule& rule, double s, int ell_max, bool require_spd) {
  if (ell_max < 0) throw std::invalid_argument("build_p_sobolev: ell_max >= 0 required");
  const int d = rule.dim();
  const int n = rule.size();
  const int k = harmonic_space_dim(d, ell_max);
  if (require_spd && k < n)
    std::cerr << "build_p_sobolev: dim Pi^" << d << "_" << ell_max << " = " << k << " < n = " << n
              << "; the assembled operator cannot be positive definite\n";

  const Matrix Y = harmonic_basis(d, ell_max, rule.nodes());  // k x n
  Matrix factors = (Y * rule.weights().asDiagonal()).transpose();  // n x k, col = a_{l,p}
  Vector omega(k);
  int r = 0;
  for (int l = 0; l <= ell_max; ++l) {
    const double w = std::pow(1.0 + l, 2.0 * s);
    for (int p = 1; p <= harmonic_count(d, l); ++p, ++r) omega(r) = w;
  }

  LossOperator op = LossOperator::sobolev(std::move(factors), std::move(omega), s, ell_max);
  if (!require_spd) return op;

  // SPD certification on the dense assembly.
  const Matrix dense = op.dense();
  Eigen::SelfAdjointEigenSolver<Matrix> es(dense, Eigen::EigenvaluesOnly);
  const double smallest = es.eigenvalues().minCoeff();
  const double threshold = 1e-12 * dense.trace() / n;
  if (smallest <= threshold)
    throw DegenerateOperatorError(
        "build_p_sobolev: assembled operator is not positive definite (smallest eigenvalue " +
            std::to_string(smallest) + ")",
        smallest);
  return op;
}

Vector apply_p(const LossOperator& op, const Vector& v) { return op.apply(v); }

double theoretical_rate(int ell, double eta, double s, const KernelSpectrum& spec) {
  if (ell < 0 || ell > spec.max_degree())
    throw std::invalid_argument("theoretical_rate: ell outside spectrum range");
  const double rate = 1.0 - 2.0 * eta * spec.mu(ell) * std::pow(1.0 + ell, 2.0 * s);
  if (rate <= 0.0)
    std::cerr << "theoretical_rate: rate " << rate << " <= 0 at ell = " << ell
              << "; the contraction hypothesis fails\n";
  return rate;
}

ImageSobolevMask build_image_mask(int h, int w, double s) {
  if (h < 1 || w < 1) throw std::invalid_argument("build_image_mask: h, w >= 1 required");
  ImageSobolevMask out;
  out.height = h;
  out.width = w;
  out.s = s;
  out.mask.resize(h, w);
  for (int j = 0; j < h; ++j)
    for (int k = 0; k < w; ++k) {
      const double fj = centered_frequency(j, h);
      const double fk = centered_frequency(k, w);
      out.mask(j, k) = std::pow(1.0 + fj * fj + fk * fk, 0.5 * s);
    }
  return out;
}

Eigen::MatrixXcd dft2_unitary(const Matrix& img) {
  const Eigen::MatrixXcd fl = dft_matrix(static_cast<int>(img.rows()));
  const Eigen::MatrixXcd fr = dft_matrix(static_cast<int>(img.cols()));
  return fl * img.cast<std::complex<double>>() * fr.transpose();
}

double image_sobolev_loss(const Matrix& pred, const Matrix& target, const ImageSobolevMask& mask) {
  if (pred.rows() != mask.height || pred.cols() != mask.width || pred.rows() != target.rows() ||
      pred.cols() != target.cols())
    throw std::invalid_argument("image_sobolev_loss: shape mismatch");
  const Eigen::MatrixXcd spec = dft2_unitary(pred - target);
  return 0.5 * (mask.mask.array() * spec.array().abs()).matrix().squaredNorm();
}

Matrix image_sobolev_loss_grad(const Matrix& pred, const Matrix& target,
                               const ImageSobolevMask& mask) {
  if (pred.rows() != mask.height || pred.cols() != mask.width || pred.rows() != target.rows() ||
      pred.cols() != target.cols())
    throw std::invalid_argument("image_sobolev_loss_grad: shape mismatch");
  const Eigen::MatrixXcd spec = dft2_unitary(pred - target);
  const Eigen::MatrixXcd weighted =
      (mask.mask.array().square() * spec.array()).matrix();
  const Eigen::MatrixXcd fl = dft_matrix(mask.height);
  const Eigen::MatrixXcd fr = dft_matrix(mask.width);
  // Unitary inverse: F^H on the left, conj(F) transposed on the right.
  const Eigen::MatrixXcd back = fl.adjoint() * weighted * fr.conjugate();
  return back.real();
}

}  // namespace sbl
