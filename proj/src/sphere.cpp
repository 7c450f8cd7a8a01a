#include "sbl/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbl {

SpherePoint::SpherePoint(Vector coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2) throw std::invalid_argument("SpherePoint: need d >= 2");
  const double nrm = coords_.norm();
  if (!std::isfinite(nrm) || nrm == 0.0)
    throw std::invalid_argument("SpherePoint: cannot normalize zero or non-finite vector");
  coords_ /= nrm;
}

Vector SpherePoint::lifted() const {
  Vector out(coords_.size() + 1);
  out.head(coords_.size()) = coords_;
  out(coords_.size()) = 1.0;
  return out / std::sqrt(2.0);
}

SpherePoint SpherePoint::from_angle(double theta) {
  Vector c(2);
  c << std::cos(theta), std::sin(theta);
  return SpherePoint(std::move(c));
}

SpherePointSet::SpherePointSet(Matrix pts) : pts_(std::move(pts)) {
  if (pts_.cols() < 2) throw std::invalid_argument("SpherePointSet: need d >= 2");
  if (pts_.rows() < 1) throw std::invalid_argument("SpherePointSet: need n >= 1");
  for (Eigen::Index i = 0; i < pts_.rows(); ++i) {
    const double nrm = pts_.row(i).norm();
    if (!std::isfinite(nrm) || nrm == 0.0)
      throw std::invalid_argument("SpherePointSet: row cannot be normalized");
    pts_.row(i) /= nrm;
  }
}

Matrix SpherePointSet::lifted() const {
  Matrix out(pts_.rows(), pts_.cols() + 1);
  out.leftCols(pts_.cols()) = pts_;
  out.col(pts_.cols()).setOnes();
  return out / std::sqrt(2.0);
}

double SpherePointSet::min_pairwise_angle() const {
  // Chordal formula: exact for tiny separations where acos(x.y) rounds to 0.
  double best = M_PI;
  for (Eigen::Index i = 0; i < pts_.rows(); ++i)
    for (Eigen::Index j = i + 1; j < pts_.rows(); ++j) {
      const double chord = (pts_.row(i) - pts_.row(j)).norm();
      best = std::min(best, 2.0 * std::asin(std::min(1.0, 0.5 * chord)));
    }
  return best;
}

std::uint64_t SpherePointSet::fingerprint() const {
  // Hash row by row so the value does not depend on Eigen's storage order.
  std::uint64_t h = fnv1a(nullptr, 0);
  for (Eigen::Index i = 0; i < pts_.rows(); ++i) {
    Eigen::RowVectorXd r = pts_.row(i);
    h = fnv1a(r.data(), sizeof(double) * static_cast<std::size_t>(r.size()), h);
  }
  return h;
}

SpherePointSet SpherePointSet::from_angles(const Vector& thetas) {
  Matrix pts(thetas.size(), 2);
  for (Eigen::Index i = 0; i < thetas.size(); ++i) {
    pts(i, 0) = std::cos(thetas(i));
    pts(i, 1) = std::sin(thetas(i));
  }
  return SpherePointSet(std::move(pts));
}

int harmonic_count(int d, int ell) {
  if (d < 2) throw std::invalid_argument("harmonic_count: d >= 2 required");
  if (ell < 0) throw std::invalid_argument("harmonic_count: ell >= 0 required");
  if (ell == 0) return 1;
  if (d == 2) return 2;
  if (d == 3) return 2 * ell + 1;
  // (2l + d - 2) Gamma(l + d - 2) / (Gamma(l + 1) Gamma(d - 1))
  const double lg = std::lgamma(ell + d - 2.0) - std::lgamma(ell + 1.0) - std::lgamma(d - 1.0);
  return static_cast<int>(std::llround((2.0 * ell + d - 2.0) * std::exp(lg)));
}

int harmonic_space_dim(int d, int L) {
  int total = 0;
  for (int l = 0; l <= L; ++l) total += harmonic_count(d, l);
  return total;
}

double surface_area(int d) {
  if (d < 2) throw std::invalid_argument("surface_area: d >= 2 required");
  return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

std::uint64_t fnv1a(const void* data, std::size_t nbytes, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < nbytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace sbl
