#pragma once

#include <Eigen/Dense>

namespace sbl {

struct NnqpResult {
  Eigen::VectorXd x;
  int clamp_rounds = 0;
  int release_steps = 0;
  bool kkt_satisfied = true;
};

// Bound active-set solver for the equality-constrained nonnegative QP
//   min ||c||_2^2   s.t.   M c = b,   c_i >= lower.
// Starts from the unconstrained minimum-norm solution, clamps violated
// bounds, re-solves the reduced minimum-norm problem, and releases clamped
// indices whose KKT multipliers have the wrong sign. Every iterate satisfies
// the equality constraints to factorization precision.
// Throws std::runtime_error carrying the best residual if the reduced moment
// matrix loses row rank or no feasible support is found.
NnqpResult least_norm_nnqp(const Eigen::MatrixXd& M, const Eigen::VectorXd& b,
                           double lower);

}  // namespace sbl
