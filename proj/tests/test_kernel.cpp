#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <sbl/diagnostics.hpp>
#include <sbl/kernel.hpp>
#include <sbl/loss_operator.hpp>
#include <sbl/net.hpp>

#include "helpers.hpp"

using namespace sbl;

TEST_CASE("k_infinity endpoint values are exact") {
  CHECK(k_infinity(1.0) == 0.5);
  CHECK(k_infinity(-1.0) == 0.0);
  CHECK(k_infinity(0.0) == 0.125);
  CHECK(k_infinity(1.0 + 5e-13) == 0.5);  // clamp
  CHECK_THROWS_AS(k_infinity(1.1), std::domain_error);
}

TEST_CASE("build_h_infinity structure") {
  const SpherePointSet pts = testing::random_sphere_points(24, 3, 77);
  const KernelMatrix h = build_h_infinity(pts);
  CHECK(h.size() == 24);
  for (int i = 0; i < 24; ++i) CHECK(h.matrix()(i, i) == 0.5);
  CHECK((h.matrix() - h.matrix().transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(h.node_fingerprint() == pts.fingerprint());

  // Antipodal pair: off-diagonal entry is exactly zero.
  Matrix two(2, 2);
  two << 1.0, 0.0, -1.0, 0.0;
  const KernelMatrix h2 = build_h_infinity(SpherePointSet(two));
  CHECK(h2.matrix()(0, 1) == 0.0);

  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix(), Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("build_h_empirical") {
  SUBCASE("single always-active neuron gives the lifted gram matrix") {
    const SpherePointSet pts = testing::random_sphere_points(6, 2, 3);
    TwoLayerReluNet net;
    net.W = Matrix::Zero(1, 2);
    net.b = Vector::Constant(1, 10.0);  // w.x + b > 0 everywhere
    net.a = Vector::Constant(1, 1.0);
    const KernelMatrix h = build_h_empirical(net, pts);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        const double lifted = (pts.matrix().row(i).dot(pts.matrix().row(j)) + 1.0) / 2.0;
        CHECK(h.matrix()(i, j) == doctest::Approx(lifted).epsilon(1e-14));
      }
  }
  SUBCASE("diagonal entries count active neurons") {
    const SpherePointSet pts = testing::random_sphere_points(10, 3, 4);
    const TwoLayerReluNet net = init_net(64, 3, 1e-2, 9, InitScheme::Gaussian);
    const KernelMatrix h = build_h_empirical(net, pts);
    for (int i = 0; i < 10; ++i) {
      CHECK(h.matrix()(i, i) <= 1.0);
      CHECK(h.matrix()(i, i) >= 0.0);
    }
  }
  SUBCASE("width-m concentration toward H_infinity") {
    const SpherePointSet pts = testing::random_sphere_points(16, 2, 5);
    const Matrix hinf = build_h_infinity(pts).matrix();
    double err_small = 0.0, err_big = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      err_small += (build_h_empirical(init_net(1024, 2, 1e-2, seed, InitScheme::Gaussian), pts)
                        .matrix() -
                    hinf)
                       .norm();
      err_big += (build_h_empirical(init_net(4096, 2, 1e-2, seed, InitScheme::Gaussian), pts)
                      .matrix() -
                  hinf)
                     .norm();
    }
    CHECK(err_small / err_big > 1.2);  // ~2 in expectation
    CHECK(err_small / err_big < 3.2);
  }
}

TEST_CASE("mu_closed agrees with mu_numeric and the dense oracle") {
  for (int l = 0; l <= 20; ++l) {
    const double c = mu_closed(3, l);
    const double n = mu_numeric(3, l);
    CHECK(std::abs(c - n) < 1e-10);
    CHECK(c > 0.0);
  }
  CHECK(std::abs(mu_closed(3, 0) - mu_dense(3, 0)) < 1e-10);
  // Frozen hand-derived values for the first four eigenvalues at d = 3.
  CHECK(mu_closed(3, 0) == doctest::Approx(5.0 * M_PI / 8.0).epsilon(1e-13));
  CHECK(mu_closed(3, 1) == doctest::Approx(7.0 * M_PI / 24.0).epsilon(1e-13));
  CHECK(mu_closed(3, 2) == doctest::Approx(7.0 * M_PI / 128.0).epsilon(1e-13));
  CHECK(mu_closed(3, 3) == doctest::Approx(M_PI / 128.0).epsilon(1e-13));
  CHECK_THROWS_AS(mu_closed(4, 2), std::invalid_argument);
}

TEST_CASE("mu_numeric positivity and dense-circle agreement") {
  for (int l = 0; l <= 10; ++l) {
    const double n = mu_numeric(2, l);
    CHECK(n > 0.0);
    CHECK(std::abs(n - mu_dense(2, l, 1000000)) < 1e-8);
  }
  for (int l : {0, 5, 12}) CHECK(mu_numeric(5, l) > 0.0);
}

TEST_CASE("mu decay rate ~ ell^-d") {
  SUBCASE("d=3 ratio check") {
    const double r = mu_closed(3, 10) / mu_closed(3, 20);
    const double predicted = std::pow(20.0 / 10.0, 3.0);
    CHECK(r > predicted / 2.0);
    CHECK(r < predicted * 2.0);
  }
  SUBCASE("bounded mu * ell^d across [5, 30]") {
    for (int d : {2, 3}) {
      double lo = 1e300, hi = 0.0;
      for (int l = 5; l <= 30; ++l) {
        const double v = mu_numeric(d, l) * std::pow(l, d);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      CHECK(hi / lo < 10.0);
    }
  }
}

TEST_CASE("kernel_spectrum methods") {
  const KernelSpectrum closed = kernel_spectrum(3, 20, SpectrumMethod::ClosedForm);
  const KernelSpectrum numeric = kernel_spectrum(3, 20, SpectrumMethod::FunkHecke1d);
  CHECK(closed.method() == "closed-form");
  CHECK(numeric.method() == "funk-hecke-1d");
  for (int l = 0; l <= 20; ++l) CHECK(std::abs(closed.mu(l) - numeric.mu(l)) < 1e-10);
  CHECK(closed.values().minCoeff() > 0.0);
}

TEST_CASE("spectrum_hp") {
  const SpherePointSet pts = testing::random_sphere_points(20, 2, 13);
  const KernelMatrix h = build_h_infinity(pts);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix(), Eigen::EigenvaluesOnly);

  SUBCASE("P = I reproduces H's spectrum") {
    const GeneralizedSpectrum s = spectrum_hp(h, LossOperator::scaled_identity(20, 1.0));
    CHECK((s.values() - es.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("P = I/n scales the spectrum") {
    const GeneralizedSpectrum s = spectrum_hp(h, LossOperator::scaled_identity(20, 1.0 / 20));
    CHECK((s.values() - es.eigenvalues() / 20.0).cwiseAbs().maxCoeff() < 1e-13);
  }
  SUBCASE("lambda_max_hp matches the full solve") {
    const GeneralizedSpectrum s = spectrum_hp(h, LossOperator::scaled_identity(20, 0.05));
    CHECK(lambda_max_hp(h, LossOperator::scaled_identity(20, 0.05)) ==
          doctest::Approx(s.lambda_max()).epsilon(1e-9));
  }
}

TEST_CASE("H_infinity D_c eigenvalues cluster near the continuous spectrum") {
  const SpherePointSet pts = three_arc_nodes(60, 16, 80);
  const QuadratureRule rule = design_weights(pts, 40);
  const KernelMatrix h = build_h_infinity(rule.nodes());
  const LossOperator dc = LossOperator::diagonal(rule.weights());
  const GeneralizedSpectrum s = spectrum_hp(h, dc);

  // Quadrature error of K(x_i, .) g_l bounds the eigenvalue displacement.
  HarmonicExpansion probe(2, 1);
  probe.coef(1, 1) = std::sqrt(M_PI);
  const double e1 = e_d_errors(rule, probe, 1, mu_numeric(2, 1)).cwiseAbs().maxCoeff();

  const Vector lam = s.values().reverse();
  CHECK(std::abs(lam(0) - mu_numeric(2, 0)) < 100.0 * std::max(e1, 1e-8));
  // mu_1 appears twice (sin and cos directions).
  CHECK(std::abs(lam(1) - mu_numeric(2, 1)) < 100.0 * std::max(e1, 1e-8));
  CHECK(std::abs(lam(2) - mu_numeric(2, 1)) < 100.0 * std::max(e1, 1e-8));
  CHECK(s.lambda_min() > 0.0);
}

TEST_CASE("positive definiteness across random node sets") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const int n = 8 + static_cast<int>(seed % 5) * 8;
    const int d = (seed % 2) ? 2 : 3;
    const KernelMatrix h = build_h_infinity(testing::random_sphere_points(n, d, 1000 + seed));
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix(), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}
