#include "sbl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "sbl/nnls.hpp"
#include "sbl/rng.hpp"

namespace sbl {

QuadratureRule::QuadratureRule(SpherePointSet nodes, Vector weights, int certified_degree)
    : nodes_(std::move(nodes)), weights_(std::move(weights)), certified_(certified_degree) {
  if (weights_.size() != nodes_.size())
    throw std::invalid_argument("QuadratureRule: node/weight length mismatch");
  if (weights_.minCoeff() <= 0.0)
    throw std::invalid_argument("QuadratureRule: weights must be strictly positive");
  const double ad = surface_area(nodes_.dim());
  if (std::abs(weights_.sum() - ad) > 1e-8)
    throw std::invalid_argument("QuadratureRule: weights must sum to A_d within 1e-8");
  if (nodes_.size() > 1 && nodes_.min_pairwise_angle() <= 0.0)
    throw std::invalid_argument("QuadratureRule: nodes must be pairwise distinct");
}

SpherePointSet three_arc_nodes(int n_base, int n_arc1, int n_arc2, int* collisions) {
  if (n_base < 1) throw std::invalid_argument("three_arc_nodes: n_base >= 1 required");
  if (n_arc1 < 0 || n_arc2 < 0) throw std::invalid_argument("three_arc_nodes: counts >= 0 required");
  std::vector<double> thetas;
  thetas.reserve(static_cast<std::size_t>(n_base + n_arc1 + n_arc2));
  for (int k = 1; k <= n_base; ++k) thetas.push_back(2.0 * M_PI * k / n_base);
  auto arc = [&](double lo, double hi, int n) {
    if (n == 1) {
      thetas.push_back(lo);
      return;
    }
    for (int k = 0; k < n; ++k) thetas.push_back(lo + (hi - lo) * k / (n - 1.0));
  };
  if (n_arc1 > 0) arc(0.0, 0.3 * M_PI, n_arc1);
  if (n_arc2 > 0) arc(1.4 * M_PI, 1.8 * M_PI, n_arc2);

  // Duplicate angles (the base grid's 2*pi against arc endpoints, and arc
  // nodes landing on shared rational multiples of pi) are pushed off by a
  // fixed representable offset of 2^-7 rad, repeated if the new spot is
  // taken. The offset clears every arc spacing used here, so a resolved
  // collision does not become the global nearest-neighbor pair.
  constexpr double kOffset = 0x1.0p-7;
  int bumped = 0;
  auto wrap = [](double t) {
    t = std::fmod(t, 2.0 * M_PI);
    return t <= 0.0 ? t + 2.0 * M_PI : t;
  };
  for (auto& t : thetas) t = wrap(t);
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    double t = thetas[i];
    bool again = true;
    bool touched = false;
    while (again) {
      again = false;
      for (std::size_t j = 0; j < i; ++j) {
        const double gap = std::abs(thetas[j] - t);
        if (gap < 1e-12 || std::abs(gap - 2.0 * M_PI) < 1e-12) {
          t += kOffset;
          touched = true;
          again = true;
        }
      }
    }
    if (touched) ++bumped;
    thetas[i] = t;
  }
  if (collisions) *collisions = bumped;
  if (bumped > 0 && !collisions)
    std::cerr << "three_arc_nodes: perturbed " << bumped << " duplicate angle(s)\n";
  Vector th(static_cast<Eigen::Index>(thetas.size()));
  for (std::size_t i = 0; i < thetas.size(); ++i) th(static_cast<Eigen::Index>(i)) = thetas[i];
  return SpherePointSet::from_angles(th);
}

SpherePointSet jittered_circle_nodes(int n, double jitter_fraction, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("jittered_circle_nodes: n >= 1 required");
  if (jitter_fraction < 0.0 || jitter_fraction >= 0.5)
    throw std::invalid_argument("jittered_circle_nodes: jitter_fraction in [0, 0.5) required");
  Rng rng(seed);
  const double spacing = 2.0 * M_PI / n;
  Vector th(n);
  for (int i = 0; i < n; ++i)
    th(i) = spacing * (i + 1) + spacing * jitter_fraction * (2.0 * rng.uniform() - 1.0);
  return SpherePointSet::from_angles(th);
}

QuadratureRule gauss_product_rule_s2(int L) {
  if (L < 0) throw std::invalid_argument("gauss_product_rule_s2: L >= 0 required");
  const int nt = (L + 2) / 2;
  const int np = L + 1;
  // Newton iteration for the Legendre nodes of the polar direction.
  Vector x(nt), w(nt);
  for (int i = 0; i < (nt + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (nt + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < nt; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = nt * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x(i) = -z;
    x(nt - 1 - i) = z;
    w(i) = w(nt - 1 - i) = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  Matrix pts(nt * np, 3);
  Vector c(nt * np);
  int r = 0;
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < np; ++j, ++r) {
      const double phi = 2.0 * M_PI * j / np;
      const double sin_theta = std::sqrt(std::max(0.0, 1.0 - x(i) * x(i)));
      pts(r, 0) = sin_theta * std::cos(phi);
      pts(r, 1) = sin_theta * std::sin(phi);
      pts(r, 2) = x(i);
      c(r) = w(i) * 2.0 * M_PI / np;
    }
  return QuadratureRule(SpherePointSet(std::move(pts)), std::move(c), L);
}

QuadratureRule design_weights(const SpherePointSet& nodes, int L) {
  const int d = nodes.dim();
  const int n = nodes.size();
  const int k = harmonic_space_dim(d, L);
  if (n < k)
    throw std::invalid_argument("design_weights: n >= dim Pi^d_L required");
  if (nodes.size() > 1 && nodes.min_pairwise_angle() <= 0.0)
    throw DegenerateNodesError("design_weights: nodes must be pairwise distinct");

  const double ad = surface_area(d);
  const Matrix Y = harmonic_basis(d, L, nodes);
  Vector b = Vector::Zero(k);
  b(0) = std::sqrt(ad);  // integral of Y_{0,1} = A_d / sqrt(A_d); all others vanish

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(Y);
  if (cod.rank() < k)
    throw DegenerateNodesError("design_weights: moment matrix is rank-deficient");
  Vector c = cod.solve(b);

  const double eps_pos = 1e-12 * ad / n;
  if (c.minCoeff() <= eps_pos) {
    NnqpResult qp;
    try {
      qp = least_norm_nnqp(Y, b, eps_pos);
    } catch (const std::runtime_error& e) {
      const double viol = (Y * c.cwiseMax(eps_pos) - b).cwiseAbs().maxCoeff();
      throw InfeasibleQuadratureError(std::string("design_weights: ") + e.what(), viol);
    }
    c = qp.x;
  }

  const double viol = (Y * c - b).cwiseAbs().maxCoeff();
  if (viol > 1e-8 || c.minCoeff() < eps_pos)
    throw InfeasibleQuadratureError("design_weights: no positive rule met the moment equations",
                                    viol);
  return QuadratureRule(nodes, std::move(c), L);
}

double integrate(const QuadratureRule& rule, const Vector& samples) {
  if (samples.size() != rule.size())
    throw std::invalid_argument("integrate: sample length mismatch");
  return rule.weights().dot(samples);
}

double quadrature_error(const QuadratureRule& rule, const Vector& samples, double exact_value) {
  return exact_value - integrate(rule, samples);
}

double estimate_gamma(const QuadratureRule& rule, int ell, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("estimate_gamma: trials >= 1 required");
  const int d = rule.dim();
  const double ad = surface_area(d);

  // Dense evaluation grid for the sup-norm normalization.
  SpherePointSet grid = [&]() {
    if (d == 2) {
      const int g = std::max(1024, 8 * (ell + 1));
      Vector th(g);
      for (int i = 0; i < g; ++i) th(i) = 2.0 * M_PI * (i + 0.5) / g;
      return SpherePointSet::from_angles(th);
    }
    const int g = std::min(20000, std::max(2000, 8 * (ell + 1) * (ell + 1)));
    Matrix pts(g, 3);
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    for (int i = 0; i < g; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / g;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = 2.0 * M_PI * i / golden;
      pts(i, 0) = r * std::cos(phi);
      pts(i, 1) = r * std::sin(phi);
      pts(i, 2) = z;
    }
    return SpherePointSet(std::move(pts));
  }();

  const Matrix Yg = harmonic_basis(d, ell, grid);
  const Matrix Yn = harmonic_basis(d, ell, rule.nodes());

  // Nested trial sets: the degree-l estimate includes every lower-degree
  // candidate, which makes the estimate monotone in l by construction.
  double best = 0.0;
  for (int lcur = 0; lcur <= ell; ++lcur) {
    const int kcur = harmonic_space_dim(d, lcur);
    Rng rng(fnv1a(&lcur, sizeof lcur, seed));
    for (int t = 0; t < trials; ++t) {
      Vector coef(kcur);
      for (int j = 0; j < kcur; ++j) coef(j) = rng.normal();
      const double sup = (Yg.topRows(kcur).transpose() * coef).cwiseAbs().maxCoeff();
      if (sup <= 0.0) continue;
      coef /= sup;
      const double integral = std::sqrt(ad) * coef(0);
      const double quad = rule.weights().dot(Yn.topRows(kcur).transpose() * coef);
      best = std::max(best, std::abs(integral - quad));
    }
  }
  return best;
}

ExactnessReport exactness_report(const QuadratureRule& rule, int L,
                                 const std::vector<int>& gamma_degrees, int gamma_trials,
                                 std::uint64_t seed) {
  ExactnessReport rep;
  const int d = rule.dim();
  const Matrix Y = harmonic_basis(d, L, rule.nodes());
  const Vector moments = Y * rule.weights();
  rep.max_moment_error = Vector::Zero(L + 1);
  int r = 0;
  for (int l = 0; l <= L; ++l) {
    double worst = 0.0;
    for (int p = 1; p <= harmonic_count(d, l); ++p, ++r) {
      const double exact = (l == 0) ? std::sqrt(surface_area(d)) : 0.0;
      worst = std::max(worst, std::abs(moments(r) - exact));
    }
    rep.max_moment_error(l) = worst;
  }
  rep.gamma = Vector::Zero(static_cast<Eigen::Index>(gamma_degrees.size()));
  for (std::size_t i = 0; i < gamma_degrees.size(); ++i)
    rep.gamma(static_cast<Eigen::Index>(i)) =
        estimate_gamma(rule, gamma_degrees[i], gamma_trials, seed);
  return rep;
}

HarmonicExpansion project(const Vector& samples, const QuadratureRule& rule, int L) {
  if (samples.size() != rule.size())
    throw std::invalid_argument("project: sample length mismatch");
  if (2 * L > rule.certified_degree())
    std::cerr << "project: degree " << L << " exceeds the certified budget of rule (degree "
              << rule.certified_degree() << "); coefficients carry quadrature error\n";
  const int d = rule.dim();
  const Matrix Y = harmonic_basis(d, L, rule.nodes());
  HarmonicExpansion e(d, L);
  e.coefs() = Y * (rule.weights().asDiagonal() * samples);
  return e;
}

}  // namespace sbl
