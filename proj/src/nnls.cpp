#include "sbl/nnls.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

namespace sbl {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Minimum-norm solution of M_F x_F = rhs on the free columns F.
// Returns false if M_F is row-rank-deficient.
bool min_norm_on(const MatrixXd& M, const VectorXd& rhs, const std::vector<int>& free_idx,
                 VectorXd* x_free, VectorXd* dual) {
  MatrixXd Mf(M.rows(), static_cast<Eigen::Index>(free_idx.size()));
  for (std::size_t j = 0; j < free_idx.size(); ++j) Mf.col(static_cast<Eigen::Index>(j)) = M.col(free_idx[j]);
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(Mf);
  if (cod.rank() < M.rows()) return false;
  *x_free = cod.solve(rhs);
  // Minimum-norm solutions lie in the row space: x_F = M_F^T nu. The dual nu
  // is what the KKT test on clamped indices needs.
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> codt(Mf.transpose());
  *dual = codt.solve(*x_free);
  return true;
}

}  // namespace

NnqpResult least_norm_nnqp(const MatrixXd& M, const VectorXd& b, double lower) {
  const int n = static_cast<int>(M.cols());
  const int k = static_cast<int>(M.rows());
  if (n < k) throw std::runtime_error("least_norm_nnqp: fewer unknowns than constraints");

  const double scale = std::max(1e-300, b.cwiseAbs().maxCoeff());
  const double feas_tol = 1e-12 * scale;

  NnqpResult res;
  std::vector<char> clamped(static_cast<std::size_t>(n), 0);
  std::set<std::vector<char>> visited;

  const int max_clamp_rounds = 2000;
  const int max_release_steps = 2000;

  VectorXd x_free, dual;
  std::vector<int> free_idx;

  auto solve_current = [&]() -> bool {
    free_idx.clear();
    for (int i = 0; i < n; ++i)
      if (!clamped[static_cast<std::size_t>(i)]) free_idx.push_back(i);
    if (static_cast<int>(free_idx.size()) < k) return false;
    VectorXd rhs = b;
    if (lower != 0.0) {
      for (int i = 0; i < n; ++i)
        if (clamped[static_cast<std::size_t>(i)]) rhs -= lower * M.col(i);
    }
    return min_norm_on(M, rhs, free_idx, &x_free, &dual);
  };

  if (!solve_current())
    throw std::runtime_error("least_norm_nnqp: moment matrix is row-rank-deficient");

  double best_violation = 0.0;
  while (true) {
    // Clamp the single worst bound violation; clamping in bulk over-corrects
    // and can cascade the support below row rank.
    int worst_j = -1;
    double worst_val = lower - feas_tol;
    for (std::size_t j = 0; j < free_idx.size(); ++j) {
      const double v = x_free(static_cast<Eigen::Index>(j));
      if (v < worst_val) {
        worst_val = v;
        worst_j = free_idx[j];
      }
    }
    best_violation = std::max(best_violation, lower - worst_val);
    if (worst_j >= 0) {
      clamped[static_cast<std::size_t>(worst_j)] = 1;
      if (++res.clamp_rounds > max_clamp_rounds) {
        res.kkt_satisfied = false;
        break;
      }
      if (!visited.insert(clamped).second) {
        res.kkt_satisfied = false;  // cycle guard
        break;
      }
      if (!solve_current())
        throw std::runtime_error(
            "least_norm_nnqp: no positive rule on remaining support (best bound violation " +
            std::to_string(best_violation) + ")");
      continue;
    }

    // Feasible. KKT for clamped i: multiplier lower - (M^T dual)_i >= 0.
    int worst = -1;
    double worst_mult = -1e-11 * std::max(1.0, dual.cwiseAbs().maxCoeff());
    for (int i = 0; i < n; ++i) {
      if (!clamped[static_cast<std::size_t>(i)]) continue;
      const double mult = lower - M.col(i).dot(dual);
      if (mult < worst_mult) {
        worst_mult = mult;
        worst = i;
      }
    }
    if (worst < 0) break;  // optimal
    if (++res.release_steps > max_release_steps) {
      res.kkt_satisfied = false;
      break;
    }
    clamped[static_cast<std::size_t>(worst)] = 0;
    visited.insert(clamped);
    if (!solve_current())
      throw std::runtime_error("least_norm_nnqp: rank lost after releasing a bound");
  }

  VectorXd x = VectorXd::Constant(n, lower);
  for (std::size_t j = 0; j < free_idx.size(); ++j)
    x(free_idx[j]) = std::max(x_free(static_cast<Eigen::Index>(j)), lower);
  res.x = std::move(x);
  return res;
}

}  // namespace sbl
