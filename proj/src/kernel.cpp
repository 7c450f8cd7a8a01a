#include "sbl/kernel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <iostream>
#include <map>
#include <mutex>
#include <stdexcept>

#include "sbl/harmonics.hpp"
#include "sbl/loss_operator.hpp"
#include "sbl/net.hpp"

namespace sbl {
namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
void gauss_legendre_compute(int n, Vector* x, Vector* w) {
  x->resize(n);
  w->resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    (*x)(i) = -z;
    (*x)(n - 1 - i) = z;
    const double wi = 2.0 / ((1.0 - z * z) * pp * pp);
    (*w)(i) = wi;
    (*w)(n - 1 - i) = wi;
  }
}

const std::pair<Vector, Vector>& gauss_legendre(int n) {
  static std::map<int, std::pair<Vector, Vector>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    std::pair<Vector, Vector> xw;
    gauss_legendre_compute(n, &xw.first, &xw.second);
    it = cache.emplace(n, std::move(xw)).first;
  }
  return it->second;
}

// |S^{d-2}| = 2 pi^{(d-1)/2} / Gamma((d-1)/2): the Funk-Hecke prefactor,
// fixed once against the dense integration oracle (see test_kernel).
double funk_hecke_prefactor(int d) {
  return 2.0 * std::pow(M_PI, 0.5 * (d - 1)) / std::tgamma(0.5 * (d - 1));
}

// One Gauss-Legendre pass of the substituted Funk-Hecke integral over
// u in [0, pi].
double mu_quadrature_pass(int d, int ell, int n_nodes) {
  const auto& [x, w] = gauss_legendre(n_nodes);
  double acc = 0.0;
  for (int i = 0; i < n_nodes; ++i) {
    const double u = 0.5 * M_PI * (x(i) + 1.0);
    const double t = std::cos(u);
    double f = k_infinity(t) * gegenbauer(ell, d, t);
    if (d > 2) f *= std::pow(std::sin(u), d - 2);
    acc += w(i) * f;
  }
  return funk_hecke_prefactor(d) * 0.5 * M_PI * acc;
}

long double lbinoml(long double n, long double k) {
  return std::lgamma(n + 1.0L) - std::lgamma(k + 1.0L) - std::lgamma(n - k + 1.0L);
}

long double central_ratio(long long k) {  // 2^{-k} binom(k, k/2), k even
  return std::exp(lbinoml(static_cast<long double>(k), k / 2.0L) -
                   k * std::log(2.0L));
}

}  // namespace

double k_infinity(double t) {
  if (std::abs(t) > 1.0 + 1e-12) throw std::domain_error("k_infinity: |t| <= 1 required");
  t = std::clamp(t, -1.0, 1.0);
  return (t + 1.0) * (M_PI - std::acos(t)) / (4.0 * M_PI);
}

KernelMatrix::KernelMatrix(Matrix entries, std::uint64_t node_fingerprint)
    : h_(std::move(entries)), fingerprint_(node_fingerprint) {
  if (h_.rows() != h_.cols()) throw std::invalid_argument("KernelMatrix: square matrix required");
}

KernelMatrix build_h_infinity(const SpherePointSet& nodes) {
  if (nodes.size() > 1 && nodes.min_pairwise_angle() <= 0.0)
    throw std::invalid_argument("build_h_infinity: duplicate nodes");
  const int n = nodes.size();
  const Matrix gram = nodes.matrix() * nodes.matrix().transpose();
  Matrix h(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = 0.5;  // x_i . x_i = 1 by the point-set invariant
    for (int j = i + 1; j < n; ++j) {
      h(i, j) = k_infinity(gram(i, j));
      h(j, i) = h(i, j);
    }
  }
  return KernelMatrix(std::move(h), nodes.fingerprint());
}

KernelMatrix build_h_empirical(const TwoLayerReluNet& net, const SpherePointSet& nodes) {
  if (net.input_dim() != nodes.dim())
    throw std::invalid_argument("build_h_empirical: dimension mismatch");
  const int n = nodes.size();
  const int m = net.width();
  // Lifted activation events: xt_i . wt_r >= 0 iff w_r . x_i + b_r >= 0.
  const Matrix pre = nodes.matrix() * net.W.transpose();  // n x m
  Matrix act(n, m);
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < m; ++r) act(i, r) = (pre(i, r) + net.b(r) >= 0.0) ? 1.0 : 0.0;
  const Matrix counts = act * act.transpose();  // n x n
  const Matrix gram = nodes.matrix() * nodes.matrix().transpose();
  Matrix h = (((gram.array() + 1.0) / 2.0) * counts.array() / static_cast<double>(m)).matrix();
  return KernelMatrix(std::move(h), nodes.fingerprint());
}

double mu_closed(int d, int ell) {
  if (d < 3 || d % 2 == 0)
    throw std::invalid_argument("mu_closed: odd d >= 3 required");
  if (ell < 0) throw std::invalid_argument("mu_closed: ell >= 0 required");

  const long double pi = 3.14159265358979323846264338327950288L;
  const long double dm1 = d - 1.0L;
  // Overall scale fixed once against mu_dense; folds the constant 2 into the
  // leading 1/2 of each case.
  const long double cal = 2.0L;

  if (ell == 0) {
    const long double c1 =
        2.0L * std::pow(pi, 0.5L * (d - 1)) / (dm1 * std::tgamma(0.5L * (d - 1)));
    long double sum = 0.0L;
    for (long long p = 0; p <= (d - 3) / 2; ++p) {
      const long double term =
          std::exp(lbinoml((d - 3) / 2.0L, static_cast<long double>(p))) / (2.0L * p + 1.0L);
      sum += (p % 2 == 0 ? term : -term);
    }
    const long double a = std::exp(lbinoml(dm1, dm1 / 2.0L)) / (dm1 * std::pow(2.0L, d));
    const long double b =
        std::pow(2.0L, d - 2.0L) / (dm1 * std::exp(lbinoml(d - 2.0L, dm1 / 2.0L)));
    return static_cast<double>(cal * 0.5L * c1 * (a + b - 0.5L * sum));
  }

  // log|C1| with sign (-1)^ell.
  const long double log_c1 = std::log(2.0L) + 0.5L * (d - 1) * std::log(pi) -
                             std::log(dm1) - ell * std::log(2.0L) -
                             std::lgamma(ell + 0.5L * (d - 1));
  const long long p_lo = (ell + 1) / 2;
  const long long p_hi = ell + (d - 3) / 2;
  long double sum = 0.0L;
  for (long long p = p_lo; p <= p_hi; ++p) {
    long double bracket;
    if (ell == 1) {
      bracket = 1.0L / (2.0L * (2 * p + 1)) +
                (1.0L / (4.0L * p)) * (1.0L - central_ratio(2 * p));
    } else if (ell % 2 == 0) {
      const long long q = 2 * p - ell;
      bracket = -1.0L / (2.0L * (q + 1)) +
                (1.0L / (2.0L * (q + 2))) * (1.0L - central_ratio(q + 2));
    } else {
      const long long q = 2 * p - ell;
      bracket = (1.0L / (2.0L * (q + 1))) * (1.0L - central_ratio(q + 1));
    }
    const long double log_c2 = lbinoml(ell + (d - 3) / 2.0L, static_cast<long double>(p)) +
                               std::lgamma(2.0L * p + 1.0L) -
                               std::lgamma(2.0L * p - ell + 1.0L);
    const long double mag = std::exp(log_c1 + log_c2) * std::fabs(bracket);
    long double sign = (p % 2 == 0) ? 1.0L : -1.0L;
    if (ell % 2 != 0) sign = -sign;  // (-1)^ell from C1
    if (bracket < 0.0L) sign = -sign;
    sum += sign * mag;
  }
  return static_cast<double>(cal * 0.5L * sum);
}

double mu_numeric(int d, int ell) {
  if (d < 2) throw std::invalid_argument("mu_numeric: d >= 2 required");
  if (ell < 0) throw std::invalid_argument("mu_numeric: ell >= 0 required");
  int n = std::max(64, 2 * ell + 16);
  double prev = mu_quadrature_pass(d, ell, n);
  double change = 0.0;
  for (int pass = 0; pass < 6; ++pass) {
    n *= 2;
    const double cur = mu_quadrature_pass(d, ell, n);
    // The integrand is analytic in u, so convergence is geometric; the
    // absolute floor keeps roundoff noise from masking it.
    change = std::abs(cur - prev);
    prev = cur;
    if (change <= std::max(1e-13 * std::abs(cur), 5e-15)) return cur;
  }
  if (change > 1e-10 * std::max(std::abs(prev), 1e-30))
    throw std::runtime_error("mu_numeric: quadrature did not converge");
  return prev;
}

double mu_dense(int d, int ell, long points) {
  if (d == 2) {
    // mu_l = integral over the circle of K(cos theta) cos(l theta).
    double acc = 0.0;
    const double h = 2.0 * M_PI / points;
    for (long i = 0; i < points; ++i) {
      const double th = h * i;
      acc += k_infinity(std::cos(th)) * std::cos(ell * th);
    }
    return acc * h;
  }
  if (d == 3) {
    // 2 pi * Simpson in the polar angle of K(cos u) P_l(cos u) sin u.
    long n = points;
    if (n % 2 != 0) ++n;
    const double h = M_PI / n;
    auto f = [&](double u) {
      const double t = std::cos(u);
      return k_infinity(t) * gegenbauer(ell, 3, t) * std::sin(u);
    };
    double acc = f(0.0) + f(M_PI);
    for (long i = 1; i < n; ++i) acc += f(h * i) * (i % 2 == 1 ? 4.0 : 2.0);
    return 2.0 * M_PI * acc * h / 3.0;
  }
  throw std::invalid_argument("mu_dense: only d in {2,3} supported");
}

KernelSpectrum::KernelSpectrum(int d, Vector mu, std::string method)
    : d_(d), mu_(std::move(mu)), method_(std::move(method)) {
  if (mu_.size() < 1) throw std::invalid_argument("KernelSpectrum: empty");
  if (mu_.minCoeff() <= 0.0)
    throw std::invalid_argument("KernelSpectrum: eigenvalues must be positive");
}

KernelSpectrum kernel_spectrum(int d, int ell_max, SpectrumMethod method) {
  if (ell_max < 0) throw std::invalid_argument("kernel_spectrum: ell_max >= 0 required");
  Vector mu(ell_max + 1);
  std::string tag;
  switch (method) {
    case SpectrumMethod::ClosedForm: {
      if (d % 2 == 0) {
        std::cerr << "kernel_spectrum: closed form needs odd d; using funk-hecke-1d\n";
        return kernel_spectrum(d, ell_max, SpectrumMethod::FunkHecke1d);
      }
      // The alternating closed-form sum loses accuracy past degree ~40.
      const int closed_cap = 40;
      for (int l = 0; l <= ell_max; ++l)
        mu(l) = (l <= closed_cap) ? mu_closed(d, l) : mu_numeric(d, l);
      tag = (ell_max <= closed_cap) ? "closed-form" : "closed-form+funk-hecke-1d";
      break;
    }
    case SpectrumMethod::FunkHecke1d:
      for (int l = 0; l <= ell_max; ++l) mu(l) = mu_numeric(d, l);
      tag = "funk-hecke-1d";
      break;
    case SpectrumMethod::DenseSphere:
      for (int l = 0; l <= ell_max; ++l) mu(l) = mu_dense(d, l);
      tag = "dense-sphere";
      break;
  }
  return KernelSpectrum(d, std::move(mu), tag);
}

GeneralizedSpectrum::GeneralizedSpectrum(Vector eigenvalues, std::string operator_tag)
    : lambda_(std::move(eigenvalues)), tag_(std::move(operator_tag)) {
  if (lambda_.size() < 1) throw std::invalid_argument("GeneralizedSpectrum: empty");
  for (Eigen::Index i = 1; i < lambda_.size(); ++i)
    if (lambda_(i) < lambda_(i - 1))
      throw std::invalid_argument("GeneralizedSpectrum: eigenvalues must be ascending");
}

GeneralizedSpectrum spectrum_hp(const KernelMatrix& h, const LossOperator& p) {
  if (p.size() != h.size()) throw std::invalid_argument("spectrum_hp: size mismatch");
  Matrix sym;
  switch (p.kind()) {
    case LossOperator::Kind::ScaledIdentity:
      sym = p.lambda_max() * h.matrix();
      break;
    case LossOperator::Kind::Diagonal: {
      const Vector sq = p.diagonal_weights().cwiseSqrt();
      sym = sq.asDiagonal() * h.matrix() * sq.asDiagonal();
      break;
    }
    case LossOperator::Kind::SobolevLowRank: {
      const Matrix pd = p.dense();
      Eigen::SelfAdjointEigenSolver<Matrix> es(pd);
      if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("spectrum_hp: operator is not positive definite");
      const Matrix root =
          es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
      sym = root * h.matrix() * root;
      break;
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return GeneralizedSpectrum(es.eigenvalues(), p.tag());
}

double lambda_max_hp(const KernelMatrix& h, const LossOperator& p) {
  if (p.size() != h.size()) throw std::invalid_argument("lambda_max_hp: size mismatch");
  const int n = h.size();
  Vector v = Vector::Ones(n);
  for (int i = 0; i < n; ++i) v(i) += 1e-3 * std::sin(1.0 + i);
  v.normalize();
  double lam = 0.0;
  for (int it = 0; it < 500; ++it) {
    const Vector w = h.matrix() * p.apply(v);
    const Vector pv = p.apply(v);
    const double rayleigh = pv.dot(h.matrix() * pv) / std::max(v.dot(pv), 1e-300);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    if (it > 3 && std::abs(rayleigh - lam) <= 1e-12 * std::max(1.0, std::abs(rayleigh))) {
      lam = rayleigh;
      break;
    }
    lam = rayleigh;
  }
  return lam;
}

}  // namespace sbl
