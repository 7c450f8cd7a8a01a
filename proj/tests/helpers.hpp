#pragma once

#include <sbl/quadrature.hpp>
#include <sbl/rng.hpp>

namespace sbl::testing {

inline SpherePointSet random_sphere_points(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  Matrix pts(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) pts(i, j) = rng.normal();
  return SpherePointSet(std::move(pts));
}

// Equispaced trapezoid rule on S^1: exact on Pi^2_{n-1} with uniform weights.
inline QuadratureRule trapezoid_rule_s1(int n) {
  Vector th(n);
  for (int i = 0; i < n; ++i) th(i) = 2.0 * M_PI * (i + 1) / n;
  return QuadratureRule(SpherePointSet::from_angles(th), Vector::Constant(n, 2.0 * M_PI / n),
                        n - 1);
}

// Gauss-Legendre x equispaced-longitude product rule on S^2, exact on Pi^3_L.
// Independent of design_weights: the weights are the known product weights.
inline QuadratureRule product_rule_s2(int L) {
  const int nt = L / 2 + 1;  // polar Gauss-Legendre points
  const int np = L + 1;      // azimuthal points
  // Newton iteration for Legendre nodes.
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
      const double s = std::sqrt(std::max(0.0, 1.0 - x(i) * x(i)));
      pts(r, 0) = s * std::cos(phi);
      pts(r, 1) = s * std::sin(phi);
      pts(r, 2) = x(i);
      c(r) = w(i) * 2.0 * M_PI / np;
    }
  return QuadratureRule(SpherePointSet(std::move(pts)), std::move(c), L);
}

// Deterministic Fibonacci-spiral node set on S^2.
inline SpherePointSet fibonacci_sphere(int n) {
  Matrix pts(n, 3);
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = 2.0 * M_PI * i / golden;
    pts(i, 0) = r * std::cos(phi);
    pts(i, 1) = r * std::sin(phi);
    pts(i, 2) = z;
  }
  return SpherePointSet(std::move(pts));
}

}  // namespace sbl::testing
