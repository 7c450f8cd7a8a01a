#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace sbl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A point on S^{d-1}, normalized on construction (||x|| = 1 within 1e-12).
class SpherePoint {
 public:
  explicit SpherePoint(Vector coords);

  int dim() const { return static_cast<int>(coords_.size()); }
  const Vector& coords() const { return coords_; }

  // Lifted point (x, 1)/sqrt(2) on S^d, used by the bias-absorbing form of
  // the network and the empirical kernel.
  Vector lifted() const;

  // S^1 convenience: (cos theta, sin theta).
  static SpherePoint from_angle(double theta);

 private:
  Vector coords_;
};

// n unit vectors on S^{d-1}, stored as the rows of an n x d matrix.
class SpherePointSet {
 public:
  explicit SpherePointSet(Matrix pts);

  int size() const { return static_cast<int>(pts_.rows()); }
  int dim() const { return static_cast<int>(pts_.cols()); }
  const Matrix& matrix() const { return pts_; }
  SpherePoint point(int i) const { return SpherePoint(pts_.row(i).transpose()); }

  // n x (d+1) matrix of lifted rows (x_i, 1)/sqrt(2).
  Matrix lifted() const;

  // Minimum pairwise angular distance; > 0 iff nodes are pairwise distinct.
  double min_pairwise_angle() const;

  // FNV-1a hash of the coordinate bytes; identifies the generating set.
  std::uint64_t fingerprint() const;

  static SpherePointSet from_angles(const Vector& thetas);

 private:
  Matrix pts_;
};

// N(d, l): dimension of the space of degree-l spherical harmonics on S^{d-1}.
int harmonic_count(int d, int ell);

// Dimension of Pi^d_L = sum_{l<=L} N(d, l).
int harmonic_space_dim(int d, int L);

// Surface area A_d of S^{d-1} (Lebesgue measure), 2*pi^(d/2)/Gamma(d/2).
double surface_area(int d);

std::uint64_t fnv1a(const void* data, std::size_t nbytes, std::uint64_t seed = 1469598103934665603ULL);

}  // namespace sbl
