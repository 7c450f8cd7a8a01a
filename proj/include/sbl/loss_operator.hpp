#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "sbl/sphere.hpp"

namespace sbl {

struct DegenerateOperatorError : std::runtime_error {
  DegenerateOperatorError(const std::string& what, double smallest)
      : std::runtime_error(what), smallest_eigenvalue(smallest) {}
  double smallest_eigenvalue;
};

// SPD matrix P defining the loss 1/2 (y-u)^T P (y-u), in one of three
// structured forms. The Sobolev form is kept factored, P = A diag(omega) A^T
// with A the n x K matrix of a_{l,p} columns; it is never densified on the
// apply path.
class LossOperator {
 public:
  enum class Kind { ScaledIdentity, Diagonal, SobolevLowRank };

  static LossOperator scaled_identity(int n, double alpha);
  static LossOperator diagonal(Vector c);
  // `factors` is n x K, omega the K per-column weights (already including the
  // (1+l)^{2s} reweighting). SPD is certified by build_p_sobolev, which is
  // the only intended caller.
  static LossOperator sobolev(Matrix factors, Vector omega, double s, int ell_max);

  Kind kind() const { return kind_; }
  int size() const { return n_; }
  double sobolev_s() const { return s_; }
  int sobolev_ell_max() const { return ell_max_; }
  const Vector& diagonal_weights() const { return diag_; }

  // P v without densifying.
  Vector apply(const Vector& v) const;

  // v^T P v (the loss core), evaluated through the factors.
  double quadratic(const Vector& v) const;

  // ||v||_P = sqrt(v^T P v).
  double p_norm(const Vector& v) const { return std::sqrt(std::max(0.0, quadratic(v))); }

  // Dense n x n assembly; used for SPD certification, square roots, and
  // small-n oracles only.
  Matrix dense() const;

  // lambda_max(P): alpha / max c_i / top eigenvalue of the small Gram form.
  double lambda_max() const;

  std::string tag() const;

 private:
  LossOperator() = default;
  Kind kind_ = Kind::ScaledIdentity;
  int n_ = 0;
  double alpha_ = 1.0;   // ScaledIdentity
  Vector diag_;          // Diagonal
  Matrix factors_;       // Sobolev: n x K
  Vector omega_;         // Sobolev: K
  double s_ = 0.0;
  int ell_max_ = -1;
};

// M_I = M_P = sqrt(lambda_max(P)) for SPD P.
std::pair<double, double> m_constants(const LossOperator& p);

// Step-size bound 1/(2 M_I M_P n).
double max_step_size(const LossOperator& p, int n);

}  // namespace sbl
