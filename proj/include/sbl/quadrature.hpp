#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "sbl/harmonics.hpp"

namespace sbl {

// Positive-weight quadrature rule on S^{d-1}: nodes x_i, weights c_i > 0,
// sum c_i = A_d, certified exact on Pi^d_{certified_degree}.
class QuadratureRule {
 public:
  QuadratureRule(SpherePointSet nodes, Vector weights, int certified_degree);

  const SpherePointSet& nodes() const { return nodes_; }
  const Vector& weights() const { return weights_; }
  int size() const { return nodes_.size(); }
  int dim() const { return nodes_.dim(); }
  int certified_degree() const { return certified_; }
  double weight_max() const { return weights_.maxCoeff(); }

 private:
  SpherePointSet nodes_;
  Vector weights_;
  int certified_;
};

struct InfeasibleQuadratureError : std::runtime_error {
  InfeasibleQuadratureError(const std::string& what, double violation)
      : std::runtime_error(what), best_violation(violation) {}
  double best_violation;
};

struct DegenerateNodesError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-degree exactness measurements and randomized gamma estimates.
struct ExactnessReport {
  Vector max_moment_error;  // index l = 0..L, max over p of |E_c(Y_{l,p})|
  Vector gamma;             // gamma estimate per requested degree (may be empty)
};

// The three-arc S^1 node family: n_base equispaced angles in (0, 2*pi],
// n_arc1 equispaced in [0, 0.3*pi], n_arc2 equispaced in [1.4*pi, 1.8*pi].
// Colliding angles are perturbed by one representable offset; the number of
// collisions is reported through `collisions` when given.
SpherePointSet three_arc_nodes(int n_base, int n_arc1, int n_arc2, int* collisions = nullptr);

// Equispaced S^1 angles with seeded uniform jitter of +-jitter_fraction of
// the spacing. Mild nonuniformity that keeps every degree <= (n-1)/2
// resolvable, which square Sobolev factor matrices need.
SpherePointSet jittered_circle_nodes(int n, double jitter_fraction, std::uint64_t seed);

// Gauss-Legendre x equispaced-longitude product rule on S^2 with
// ceil((L+1)/2) polar times L+1 azimuthal points: positive weights, exact on
// Pi^3_L by construction. The equispaced longitudes integrate every
// azimuthal order below L+1 exactly, which keeps zonal-target experiments
// clean far beyond the generic gamma budget.
QuadratureRule gauss_product_rule_s2(int L);

// Designs weights minimizing sum c_i^2 subject to exactness on Pi^d_L and
// c_i >= eps_pos = 1e-12 * A_d / n. Minimum-norm solve first, bound
// active-set QP when any weight falls at or below eps_pos.
QuadratureRule design_weights(const SpherePointSet& nodes, int L);

double integrate(const QuadratureRule& rule, const Vector& samples);

// E_c(f) = exact_value - integrate(rule, samples).
double quadrature_error(const QuadratureRule& rule, const Vector& samples, double exact_value);

// Randomized lower estimate of gamma_{n,l}: max over trials of |E_c(h)| for
// random h in Pi^d_l scaled to unit sup-norm on a dense grid. Trial sets are
// nested across degrees, so the estimate is nondecreasing in l for a fixed
// (trials, seed).
double estimate_gamma(const QuadratureRule& rule, int ell, int trials, std::uint64_t seed);

// Max moment violation per degree up to L, plus gamma estimates at the
// requested degrees.
ExactnessReport exactness_report(const QuadratureRule& rule, int L,
                                 const std::vector<int>& gamma_degrees = {},
                                 int gamma_trials = 32, std::uint64_t seed = 7);

// Coefficients of the degree-<=L projection of sampled data under the rule:
// coef_{l,p} = sum_i c_i Y_{l,p}(x_i) samples_i. Warns to stderr when
// 2L exceeds the rule's certified degree.
HarmonicExpansion project(const Vector& samples, const QuadratureRule& rule, int L);

}  // namespace sbl
