#include "sbl/harmonics.hpp"

#include <cmath>
#include <stdexcept>

namespace sbl {
namespace {

void check_index(int d, HarmonicIndex idx) {
  if (idx.degree < 0) throw std::invalid_argument("eval_harmonic: degree >= 0 required");
  const int count = harmonic_count(d, idx.degree);
  if (idx.order < 1 || idx.order > count)
    throw std::invalid_argument("eval_harmonic: order outside [1, N(d,l)]");
}

// Fully normalized associated Legendre N_l^m(x) for all l in [m, L], so that
// the real harmonics built from them are orthonormal with respect to the
// surface measure. Stable forward recurrence, no Condon-Shortley phase.
void normalized_alf(int L, int m, double x, double* out /* size L - m + 1 */) {
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  double pmm = 1.0 / std::sqrt(4.0 * M_PI);
  for (int k = 1; k <= m; ++k) pmm *= std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
  out[0] = pmm;
  if (L == m) return;
  double prev2 = pmm;
  double prev1 = x * std::sqrt(2.0 * m + 3.0) * pmm;
  out[1] = prev1;
  double a_prev = std::sqrt((4.0 * (m + 1.0) * (m + 1.0) - 1.0) / ((m + 1.0) * (m + 1.0) - m * m));
  for (int l = m + 2; l <= L; ++l) {
    const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
    const double val = a * (x * prev1 - prev2 / a_prev);
    out[l - m] = val;
    prev2 = prev1;
    prev1 = val;
    a_prev = a;
  }
}

}  // namespace

double gegenbauer(int ell, int d, double t) {
  if (d < 2) throw std::invalid_argument("gegenbauer: d >= 2 required");
  if (ell < 0) throw std::invalid_argument("gegenbauer: ell >= 0 required");
  if (std::abs(t) > 1.0 + 1e-12) throw std::domain_error("gegenbauer: |t| <= 1 required");
  t = std::clamp(t, -1.0, 1.0);
  if (ell == 0) return 1.0;
  double prev = 1.0;
  double cur = t;
  for (int l = 1; l < ell; ++l) {
    const double next = ((2.0 * l + d - 2.0) * t * cur - l * prev) / (l + d - 2.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double eval_harmonic(int d, HarmonicIndex idx, const SpherePoint& x) {
  if (x.dim() != d) throw std::invalid_argument("eval_harmonic: dimension mismatch");
  check_index(d, idx);
  const int l = idx.degree;
  const int p = idx.order;
  if (d == 2) {
    if (l == 0) return 1.0 / std::sqrt(2.0 * M_PI);
    const double theta = std::atan2(x.coords()(1), x.coords()(0));
    return (p == 1 ? std::sin(l * theta) : std::cos(l * theta)) / std::sqrt(M_PI);
  }
  if (d == 3) {
    const double z = x.coords()(2);
    if (l == 0) return 1.0 / std::sqrt(4.0 * M_PI);
    const int m = (p == 1) ? 0 : (p / 2);
    std::vector<double> alf(static_cast<std::size_t>(l - m + 1));
    normalized_alf(l, m, z, alf.data());
    const double n_lm = alf[static_cast<std::size_t>(l - m)];
    if (m == 0) return n_lm;
    const double phi = std::atan2(x.coords()(1), x.coords()(0));
    const double trig = (p % 2 == 0) ? std::sin(m * phi) : std::cos(m * phi);
    return std::sqrt(2.0) * n_lm * trig;
  }
  throw std::invalid_argument("eval_harmonic: only d in {2,3} supported");
}

Vector eval_harmonic_batch(int d, HarmonicIndex idx, const SpherePointSet& X) {
  Vector out(X.size());
  for (int i = 0; i < X.size(); ++i) out(i) = eval_harmonic(d, idx, X.point(i));
  return out;
}

Matrix harmonic_basis(int d, int L, const SpherePointSet& X) {
  if (X.dim() != d) throw std::invalid_argument("harmonic_basis: dimension mismatch");
  const int rows = harmonic_space_dim(d, L);
  const int n = X.size();
  Matrix Y(rows, n);
  if (d == 2) {
    for (int i = 0; i < n; ++i) {
      const double theta = std::atan2(X.matrix()(i, 1), X.matrix()(i, 0));
      Y(0, i) = 1.0 / std::sqrt(2.0 * M_PI);
      int r = 1;
      for (int l = 1; l <= L; ++l) {
        Y(r++, i) = std::sin(l * theta) / std::sqrt(M_PI);
        Y(r++, i) = std::cos(l * theta) / std::sqrt(M_PI);
      }
    }
    return Y;
  }
  if (d == 3) {
    std::vector<double> alf(static_cast<std::size_t>(L + 1));
    // Row layout per degree l: p = 1 (m=0), then (sin, cos) pairs for m = 1..l.
    std::vector<int> offset(static_cast<std::size_t>(L + 1));
    for (int l = 0, acc = 0; l <= L; ++l) {
      offset[static_cast<std::size_t>(l)] = acc;
      acc += harmonic_count(3, l);
    }
    for (int i = 0; i < n; ++i) {
      const double z = X.matrix()(i, 2);
      const double phi = std::atan2(X.matrix()(i, 1), X.matrix()(i, 0));
      for (int m = 0; m <= L; ++m) {
        normalized_alf(L, m, z, alf.data());
        const double c = std::cos(m * phi);
        const double s = std::sin(m * phi);
        for (int l = m; l <= L; ++l) {
          const double n_lm = alf[static_cast<std::size_t>(l - m)];
          if (m == 0) {
            Y(offset[static_cast<std::size_t>(l)], i) = n_lm;
          } else {
            const double v = std::sqrt(2.0) * n_lm;
            Y(offset[static_cast<std::size_t>(l)] + 2 * m - 1, i) = v * s;
            Y(offset[static_cast<std::size_t>(l)] + 2 * m, i) = v * c;
          }
        }
      }
    }
    return Y;
  }
  throw std::invalid_argument("harmonic_basis: only d in {2,3} supported");
}

HarmonicExpansion::HarmonicExpansion(int d, int L) : d_(d), L_(L) {
  if (L < 0) throw std::invalid_argument("HarmonicExpansion: L >= 0 required");
  offsets_.resize(static_cast<std::size_t>(L + 1));
  int acc = 0;
  for (int l = 0; l <= L; ++l) {
    offsets_[static_cast<std::size_t>(l)] = acc;
    acc += harmonic_count(d, l);
  }
  coef_ = Vector::Zero(acc);
}

int HarmonicExpansion::flat_index(int ell, int p) const {
  if (ell < 0 || ell > L_) throw std::invalid_argument("HarmonicExpansion: degree out of range");
  const int count = harmonic_count(d_, ell);
  if (p < 1 || p > count) throw std::invalid_argument("HarmonicExpansion: order out of range");
  return offsets_[static_cast<std::size_t>(ell)] + (p - 1);
}

double HarmonicExpansion::eval(const SpherePoint& x) const {
  double acc = 0.0;
  for (int l = 0; l <= L_; ++l)
    for (int p = 1; p <= harmonic_count(d_, l); ++p) {
      const double c = coef(l, p);
      if (c != 0.0) acc += c * eval_harmonic(d_, {l, p}, x);
    }
  return acc;
}

Vector HarmonicExpansion::eval_batch(const SpherePointSet& X) const {
  const Matrix Y = harmonic_basis(d_, L_, X);
  return Y.transpose() * coef_;
}

Vector HarmonicExpansion::component_batch(int ell, const SpherePointSet& X) const {
  Vector out = Vector::Zero(X.size());
  for (int p = 1; p <= harmonic_count(d_, ell); ++p) {
    const double c = coef(ell, p);
    if (c != 0.0) out += c * eval_harmonic_batch(d_, {ell, p}, X);
  }
  return out;
}

}  // namespace sbl
