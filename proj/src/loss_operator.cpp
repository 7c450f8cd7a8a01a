#include "sbl/loss_operator.hpp"

#include <Eigen/Eigenvalues>

namespace sbl {

LossOperator LossOperator::scaled_identity(int n, double alpha) {
  if (n < 1) throw std::invalid_argument("LossOperator: n >= 1 required");
  if (alpha <= 0.0) throw std::invalid_argument("LossOperator: alpha > 0 required");
  LossOperator p;
  p.kind_ = Kind::ScaledIdentity;
  p.n_ = n;
  p.alpha_ = alpha;
  return p;
}

LossOperator LossOperator::diagonal(Vector c) {
  if (c.size() < 1) throw std::invalid_argument("LossOperator: empty diagonal");
  if (c.minCoeff() <= 0.0) throw std::invalid_argument("LossOperator: diagonal entries must be > 0");
  LossOperator p;
  p.kind_ = Kind::Diagonal;
  p.n_ = static_cast<int>(c.size());
  p.diag_ = std::move(c);
  return p;
}

LossOperator LossOperator::sobolev(Matrix factors, Vector omega, double s, int ell_max) {
  if (factors.cols() != omega.size())
    throw std::invalid_argument("LossOperator: factor/weight count mismatch");
  if (omega.minCoeff() <= 0.0) throw std::invalid_argument("LossOperator: omega must be > 0");
  LossOperator p;
  p.kind_ = Kind::SobolevLowRank;
  p.n_ = static_cast<int>(factors.rows());
  p.factors_ = std::move(factors);
  p.omega_ = std::move(omega);
  p.s_ = s;
  p.ell_max_ = ell_max;
  return p;
}

Vector LossOperator::apply(const Vector& v) const {
  if (v.size() != n_) throw std::invalid_argument("LossOperator::apply: length mismatch");
  switch (kind_) {
    case Kind::ScaledIdentity:
      return alpha_ * v;
    case Kind::Diagonal:
      return diag_.cwiseProduct(v);
    case Kind::SobolevLowRank: {
      const Vector t = factors_.transpose() * v;  // K
      return factors_ * omega_.cwiseProduct(t);
    }
  }
  return v;
}

double LossOperator::quadratic(const Vector& v) const {
  if (v.size() != n_) throw std::invalid_argument("LossOperator::quadratic: length mismatch");
  switch (kind_) {
    case Kind::ScaledIdentity:
      return alpha_ * v.squaredNorm();
    case Kind::Diagonal:
      return v.dot(diag_.cwiseProduct(v));
    case Kind::SobolevLowRank: {
      const Vector t = factors_.transpose() * v;
      return t.dot(omega_.cwiseProduct(t));
    }
  }
  return 0.0;
}

Matrix LossOperator::dense() const {
  switch (kind_) {
    case Kind::ScaledIdentity:
      return alpha_ * Matrix::Identity(n_, n_);
    case Kind::Diagonal:
      return diag_.asDiagonal();
    case Kind::SobolevLowRank:
      return factors_ * omega_.asDiagonal() * factors_.transpose();
  }
  return Matrix();
}

double LossOperator::lambda_max() const {
  switch (kind_) {
    case Kind::ScaledIdentity:
      return alpha_;
    case Kind::Diagonal:
      return diag_.maxCoeff();
    case Kind::SobolevLowRank: {
      // lambda_max(A W A^T) = lambda_max(W^{1/2} A^T A W^{1/2}): K x K.
      const Vector sq = omega_.cwiseSqrt();
      const Matrix gram = sq.asDiagonal() * (factors_.transpose() * factors_) * sq.asDiagonal();
      Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
      return es.eigenvalues().maxCoeff();
    }
  }
  return 0.0;
}

std::string LossOperator::tag() const {
  switch (kind_) {
    case Kind::ScaledIdentity:
      return "scaled-identity(alpha=" + std::to_string(alpha_) + ")";
    case Kind::Diagonal:
      return "diagonal(c_max=" + std::to_string(diag_.maxCoeff()) + ")";
    case Kind::SobolevLowRank:
      return "sobolev(s=" + std::to_string(s_) + ",ell_max=" + std::to_string(ell_max_) + ")";
  }
  return "";
}

std::pair<double, double> m_constants(const LossOperator& p) {
  const double m = std::sqrt(p.lambda_max());
  return {m, m};
}

double max_step_size(const LossOperator& p, int n) {
  const auto [mi, mp] = m_constants(p);
  return 1.0 / (2.0 * mi * mp * n);
}

}  // namespace sbl
