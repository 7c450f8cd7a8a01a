#include "sbl/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace sbl {

Eigen::VectorXcd fourier_of_expansion(const HarmonicExpansion& e, int cap) {
  if (e.dim() != 2) throw std::invalid_argument("fourier_of_expansion: S^1 expansions only");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(cap + 1);
  out(0) = e.max_degree() >= 0 ? e.coef(0, 1) / std::sqrt(2.0 * M_PI) : 0.0;
  const int top = std::min(cap, e.max_degree());
  for (int l = 1; l <= top; ++l) {
    // sin(l t) = (e^{ilt} - e^{-ilt}) / 2i, cos(l t) = (e^{ilt} + e^{-ilt}) / 2.
    const double cs = e.coef(l, 2) / std::sqrt(M_PI);
    const double sn = e.coef(l, 1) / std::sqrt(M_PI);
    out(l) = std::complex<double>(0.5 * cs, -0.5 * sn);
  }
  return out;
}

Vector frequency_loss_s1_from_samples(const Vector& samples,
                                      const Eigen::VectorXcd& target_fourier) {
  const int n = static_cast<int>(samples.size());
  const int cap = static_cast<int>(target_fourier.size()) - 1;
  if (n <= 2 * cap) throw std::invalid_argument("frequency_loss_s1: grid_n > 2*cap required");
  Vector out(cap + 1);
  for (int l = 0; l <= cap; ++l) {
    std::complex<double> acc(0.0, 0.0);
    for (int j = 0; j < n; ++j) {
      const double th = 2.0 * M_PI * j / n;
      acc += samples(j) * std::polar(1.0, -l * th);
    }
    acc /= static_cast<double>(n);
    out(l) = std::abs(acc - target_fourier(l));
  }
  return out;
}

Vector frequency_loss_s1(const TwoLayerReluNet& net, const Eigen::VectorXcd& target_fourier,
                         int grid_n) {
  Vector th(grid_n);
  for (int j = 0; j < grid_n; ++j) th(j) = 2.0 * M_PI * j / grid_n;
  const SpherePointSet grid = SpherePointSet::from_angles(th);
  return frequency_loss_s1_from_samples(forward_batch(net, grid), target_fourier);
}

HarmonicExpansion frequency_loss_sphere(const TwoLayerReluNet& net, const HarmonicExpansion& target,
                                        const QuadratureRule& rule, int ell_max) {
  const Vector u = forward_batch(net, rule.nodes());
  const HarmonicExpansion n_hat = project(u, rule, ell_max);
  HarmonicExpansion out(rule.dim(), ell_max);
  for (int l = 0; l <= ell_max; ++l)
    for (int p = 1; p <= harmonic_count(rule.dim(), l); ++p) {
      const double g = (l <= target.max_degree()) ? target.coef(l, p) : 0.0;
      out.coef(l, p) = std::abs(n_hat.coef(l, p) - g);
    }
  return out;
}

const Vector& ResidualPrediction::at(int k) const {
  for (std::size_t i = 0; i < ks.size(); ++i)
    if (ks[i] == k) return z[i];
  throw std::out_of_range("ResidualPrediction: k not stored");
}

ResidualPrediction predict_residual(const KernelMatrix& h, const LossOperator& p, const Vector& y,
                                    double eta, const std::vector<int>& ks) {
  if (eta <= 0.0) throw std::invalid_argument("predict_residual: eta > 0 required");
  if (y.size() != h.size()) throw std::invalid_argument("predict_residual: size mismatch");
  std::vector<int> sorted = ks;
  std::sort(sorted.begin(), sorted.end());
  ResidualPrediction out;
  out.eta = eta;
  Vector z = y;
  int k = 0;
  for (int target : sorted) {
    for (; k < target; ++k) z -= 2.0 * eta * (h.matrix() * p.apply(z));
    out.ks.push_back(target);
    out.z.push_back(z);
  }
  return out;
}

Vector compare_trace(const TrainingTrace& trace, const ResidualPrediction& pred,
                     const LossOperator& p) {
  Vector out(static_cast<Eigen::Index>(pred.ks.size()));
  for (std::size_t i = 0; i < pred.ks.size(); ++i) {
    const TraceRecord& rec = trace.at_epoch(pred.ks[i]);
    if (rec.residual.size() == 0)
      throw std::invalid_argument("compare_trace: trace has no recorded residuals");
    out(static_cast<Eigen::Index>(i)) = p.p_norm(rec.residual - pred.z[i]);
  }
  return out;
}

SlopeFit fit_iteration_scaling(const std::vector<std::pair<double, double>>& ell_iters) {
  if (ell_iters.size() < 3)
    throw std::invalid_argument("fit_iteration_scaling: at least 3 frequencies required");
  const int n = static_cast<int>(ell_iters.size());
  Vector lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    lx(i) = std::log(ell_iters[static_cast<std::size_t>(i)].first);
    ly(i) = std::log(std::max(1.0, ell_iters[static_cast<std::size_t>(i)].second));
  }
  const double mx = lx.mean();
  const double my = ly.mean();
  const double sxx = (lx.array() - mx).square().sum();
  const double sxy = ((lx.array() - mx) * (ly.array() - my)).sum();
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.residual = std::sqrt(
      (ly.array() - fit.intercept - fit.slope * lx.array()).square().mean());
  return fit;
}

Vector e_d_errors(const QuadratureRule& rule, const HarmonicExpansion& target, int ell,
                  double mu_ell) {
  const SpherePointSet& nodes = rule.nodes();
  const int n = nodes.size();
  const Vector gl = target.component_batch(ell, nodes);
  const Matrix gram = nodes.matrix() * nodes.matrix().transpose();
  Vector e(n);
  for (int i = 0; i < n; ++i) {
    Vector samples(n);
    for (int j = 0; j < n; ++j)
      samples(j) = k_infinity(std::clamp(gram(i, j), -1.0, 1.0)) * gl(j);
    e(i) = quadrature_error(rule, samples, mu_ell * gl(i));
  }
  return e;
}

EpsilonBounds epsilon_decomposition(const TrainingTrace& trace, const QuadratureRule& rule,
                                    const HarmonicExpansion& target, const KernelSpectrum& spec) {
  const int L = target.max_degree();
  if (spec.max_degree() < L)
    throw std::invalid_argument("epsilon_decomposition: spectrum shorter than target band");
  const SpherePointSet& nodes = rule.nodes();
  const double ad = surface_area(rule.dim());
  const double eta = trace.eta;

  // e^c_{j,l} = E_c(g_j g_l), exact value delta_{jl} ||g_l||^2.
  Matrix ec(L + 1, L + 1);
  std::vector<Vector> comp(static_cast<std::size_t>(L + 1));
  for (int l = 0; l <= L; ++l) comp[static_cast<std::size_t>(l)] = target.component_batch(l, nodes);
  for (int j = 0; j <= L; ++j)
    for (int l = j; l <= L; ++l) {
      double norm_sq = 0.0;
      if (j == l)
        for (int p = 1; p <= harmonic_count(rule.dim(), l); ++p)
          norm_sq += target.coef(l, p) * target.coef(l, p);
      const Vector prod =
          comp[static_cast<std::size_t>(j)].cwiseProduct(comp[static_cast<std::size_t>(l)]);
      ec(j, l) = quadrature_error(rule, prod, norm_sq);
      ec(l, j) = ec(j, l);
    }

  EpsilonBounds out;
  for (const auto& rec : trace.records) out.ks.push_back(rec.epoch);
  out.eps1_bound.resize(static_cast<Eigen::Index>(out.ks.size()));
  for (std::size_t i = 0; i < out.ks.size(); ++i) {
    const int k = out.ks[i];
    double acc = 0.0;
    for (int j = 0; j <= L; ++j)
      for (int l = 0; l <= L; ++l)
        acc += std::pow(1.0 - 2.0 * eta * spec.mu(j), k) *
               std::pow(1.0 - 2.0 * eta * spec.mu(l), k) * ec(j, l);
    out.eps1_bound(static_cast<Eigen::Index>(i)) = std::abs(acc);
  }

  double eps2 = 0.0;
  for (int l = 0; l <= L; ++l) {
    const Vector ed = e_d_errors(rule, target, l, spec.mu(l));
    eps2 += std::sqrt(ad) / spec.mu(l) * ed.cwiseAbs().maxCoeff();
  }
  out.eps2_bound = eps2;
  return out;
}

}  // namespace sbl
