#include <doctest.h>

#include <cstdio>
#include <sbl/kernel.hpp>
#include <sbl/sobolev.hpp>
#include <sbl/trainer.hpp>
#include <Eigen/Eigenvalues>

#include "helpers.hpp"

using namespace sbl;

namespace {

Vector target_samples(const SpherePointSet& pts) {
  HarmonicExpansion g(2, 9);
  for (int l = 1; l <= 9; ++l) g.coef(l, 1) = std::sqrt(M_PI);
  return g.eval_batch(pts);
}

}  // namespace

TEST_CASE("init_net schemes") {
  SUBCASE("antithetic forward is identically zero") {
    const TwoLayerReluNet net = init_net(64, 3, 1e-2, 7, InitScheme::Antithetic);
    const SpherePointSet pts = testing::random_sphere_points(100, 3, 8);
    CHECK(forward_batch(net, pts).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(init_net(63, 3, 1e-2, 7, InitScheme::Antithetic), std::invalid_argument);
  }
  SUBCASE("gaussian row norms concentrate around kappa^2 d") {
    const double kappa = 3e-2;
    const int m = 100000, d = 3;
    const TwoLayerReluNet net = init_net(m, d, kappa, 11, InitScheme::Gaussian);
    const double mean_sq = net.W.squaredNorm() / (m * d);
    // chi-square concentration: sd of the mean is kappa^2 sqrt(2/(m d)).
    const double sd = kappa * kappa * std::sqrt(2.0 / (m * d));
    CHECK(std::abs(mean_sq - kappa * kappa) < 3.0 * sd);
    CHECK(net.b.cwiseAbs().maxCoeff() == 0.0);
    const int plus = static_cast<int>((net.a.array() > 0).count());
    CHECK(plus > m / 2 - 4 * std::sqrt(m));
    CHECK(plus < m / 2 + 4 * std::sqrt(m));
  }
  SUBCASE("fixed seed reproduces bit-identical nets") {
    const TwoLayerReluNet a = init_net(128, 2, 1e-2, 99, InitScheme::Gaussian);
    const TwoLayerReluNet b = init_net(128, 2, 1e-2, 99, InitScheme::Gaussian);
    CHECK((a.W - b.W).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.a - b.a).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("forward") {
  SUBCASE("single aligned neuron") {
    TwoLayerReluNet net;
    net.W = Matrix::Zero(1, 2);
    net.W << 0.6, 0.8;
    net.b = Vector::Zero(1);
    net.a = Vector::Ones(1);
    Vector x(2);
    x << 0.6, 0.8;
    CHECK(forward(net, SpherePoint(x)) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("positive homogeneity of the hidden layer") {
    TwoLayerReluNet net = init_net(32, 2, 1e-1, 5, InitScheme::Gaussian);
    const SpherePoint x = SpherePoint::from_angle(0.3);
    const double base = forward(net, x);
    net.W *= 2.5;
    net.b *= 2.5;
    CHECK(forward(net, x) == doctest::Approx(2.5 * base).epsilon(1e-12));
  }
  SUBCASE("batch matches pointwise") {
    const TwoLayerReluNet net = init_net(512, 3, 1e-2, 31, InitScheme::Gaussian);
    const SpherePointSet pts = testing::random_sphere_points(40, 3, 17);
    const Vector u = forward_batch(net, pts);
    for (int i = 0; i < 6; ++i)
      CHECK(u(i) == doctest::Approx(forward(net, pts.point(i))).epsilon(1e-13));
  }
}

TEST_CASE("gradient against central finite differences") {
  // Keep all pre-activations away from the kink so the finite difference is
  // valid; retry seeds until the margin holds.
  const double h = 1e-6;
  for (int d : {2, 3}) {
    int done = 0;
    for (std::uint64_t seed = 0; done < 3 && seed < 60; ++seed) {
      const int m = 8, n = 10;
      TwoLayerReluNet net = init_net(m, d, 0.9, 1000 + seed, InitScheme::Gaussian);
      const SpherePointSet pts = testing::random_sphere_points(n, d, 2000 + seed);
      const Matrix pre = (net.W * pts.matrix().transpose()).colwise() + net.b;
      if (pre.cwiseAbs().minCoeff() < 1e-3) continue;
      ++done;

      Rng rng(3000 + seed);
      Vector y(n);
      for (int i = 0; i < n; ++i) y(i) = rng.normal();

      std::vector<LossOperator> ops;
      ops.push_back(LossOperator::scaled_identity(n, 1.0 / n));
      Vector c(n);
      for (int i = 0; i < n; ++i) c(i) = 0.5 + 0.1 * (i % 3);
      ops.push_back(LossOperator::diagonal(c * (surface_area(d) / c.sum())));
      if (d == 2) {
        // The Sobolev operator lives on the net's own nodes (n = 10 needs
        // ell_max >= 5 for full rank; products are inexact, SPD still holds).
        const QuadratureRule rn(pts, Vector::Constant(n, surface_area(2) / n), 0);
        ops.push_back(build_p_sobolev(rn, 1.0, 8));
      }

      for (const auto& p : ops) {
        const NetGradient g = gradient(net, y, pts, p);
        auto loss_at = [&](const TwoLayerReluNet& nn) {
          const Vector z = y - forward_batch(nn, pts);
          return 0.5 * p.quadratic(z);
        };
        for (int r = 0; r < m; ++r) {
          for (int j = 0; j < d; ++j) {
            TwoLayerReluNet plus = net, minus = net;
            plus.W(r, j) += h;
            minus.W(r, j) -= h;
            const double fd = (loss_at(plus) - loss_at(minus)) / (2.0 * h);
            CHECK(g.dW(r, j) == doctest::Approx(fd).epsilon(1e-5));
          }
          TwoLayerReluNet plus = net, minus = net;
          plus.b(r) += h;
          minus.b(r) -= h;
          const double fd = (loss_at(plus) - loss_at(minus)) / (2.0 * h);
          CHECK(g.db(r) == doctest::Approx(fd).epsilon(1e-5));
        }
      }
    }
    CHECK(done == 3);
  }
}

TEST_CASE("gradient edge cases") {
  const SpherePointSet pts = testing::random_sphere_points(12, 2, 3);
  SUBCASE("zero residual gives zero gradient") {
    TwoLayerReluNet net = init_net(16, 2, 1e-2, 5, InitScheme::Gaussian);
    const Vector y = forward_batch(net, pts);
    const NetGradient g = gradient(net, y, pts, LossOperator::scaled_identity(12, 1.0));
    CHECK(g.dW.cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.db.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("a neuron inactive everywhere has a zero gradient row") {
    TwoLayerReluNet net = init_net(4, 2, 1e-2, 6, InitScheme::Gaussian);
    net.W.row(2) << 0.0, 0.0;
    net.b(2) = -1.0;  // pre-activation -1 at every input
    Rng rng(8);
    Vector y(12);
    for (int i = 0; i < 12; ++i) y(i) = rng.normal();
    const NetGradient g = gradient(net, y, pts, LossOperator::scaled_identity(12, 1.0));
    CHECK(g.dW.row(2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.db(2) == 0.0);
  }
}

TEST_CASE("gd_step") {
  TwoLayerReluNet net = init_net(8, 2, 1e-2, 9, InitScheme::Gaussian);
  const TwoLayerReluNet before = net;
  NetGradient zero{Matrix::Zero(8, 2), Vector::Zero(8)};
  const TwoLayerReluNet after = gd_step(net, zero, 0.5);
  CHECK((after.W - before.W).cwiseAbs().maxCoeff() == 0.0);

  NetGradient g{Matrix::Constant(8, 2, 1.0), Vector::Constant(8, 2.0)};
  const TwoLayerReluNet stepped = gd_step(net, g, 0.25);
  CHECK((stepped.W - (before.W.array() - 0.25).matrix()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((stepped.b - (before.b.array() - 0.5).matrix()).cwiseAbs().maxCoeff() < 1e-15);
  const TwoLayerReluNet frozen = gd_step(net, g, 0.0);
  CHECK((frozen.W - before.W).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("one step from antithetic init matches 2 eta H(0) P y") {
  const int n = 12, m = 256;
  const SpherePointSet pts = testing::random_sphere_points(n, 2, 21);
  const Vector y = target_samples(pts);
  const LossOperator p = LossOperator::scaled_identity(n, 1.0 / n);
  TwoLayerReluNet net = init_net(m, 2, 1e-2, 22, InitScheme::Antithetic);
  const Matrix h0 = build_h_empirical(net, pts).matrix();

  const double eta = 1e-4;  // small enough that no activation flips
  const NetGradient g = gradient(net, y, pts, p);
  const TwoLayerReluNet stepped = gd_step(net, g, eta);
  const Vector u1 = forward_batch(stepped, pts);
  const Vector predicted = 2.0 * eta * (h0 * p.apply(y));
  CHECK((u1 - predicted).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("residual recursion on epochs without sign flips") {
  const int n = 10, m = 128;
  const SpherePointSet pts = testing::random_sphere_points(n, 2, 31);
  const Vector y = target_samples(pts);
  const LossOperator p = LossOperator::scaled_identity(n, 1.0 / n);
  TwoLayerReluNet net = init_net(m, 2, 1e-1, 32, InitScheme::Gaussian);

  const double eta = 1e-4;
  for (int k = 0; k < 5; ++k) {
    const Matrix pre_before = (net.W * pts.matrix().transpose()).colwise() + net.b;
    const Vector z_before = y - forward_batch(net, pts);
    const Matrix hk = build_h_empirical(net, pts).matrix();
    const NetGradient g = gradient(net, y, pts, p);
    net = gd_step(std::move(net), g, eta);
    const Matrix pre_after = (net.W * pts.matrix().transpose()).colwise() + net.b;

    const bool flipped = ((pre_before.array() >= 0.0) != (pre_after.array() >= 0.0)).any();
    if (flipped) continue;
    const Vector z_after = y - forward_batch(net, pts);
    const Vector predicted = z_before - 2.0 * eta * (hk * p.apply(z_before));
    CHECK((z_after - predicted).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("train") {
  const int n = 24;
  const SpherePointSet pts = testing::random_sphere_points(n, 2, 41);
  const Vector y = target_samples(pts);
  const LossOperator p = LossOperator::scaled_identity(n, 1.0 / n);

  SUBCASE("zero epochs records only the initial state") {
    TwoLayerReluNet net = init_net(32, 2, 1e-2, 42, InitScheme::Antithetic);
    TrainConfig cfg;
    cfg.eta = 0.1;
    cfg.epochs = 0;
    const TrainingTrace tr = train(net, y, pts, p, cfg);
    CHECK(tr.records.size() == 1);
    CHECK(tr.records[0].epoch == 0);
    CHECK(tr.records[0].loss == doctest::Approx(0.5 * p.quadratic(y)));
  }
  SUBCASE("loss decreases under the step-size bound and signs never move") {
    TwoLayerReluNet net = init_net(1024, 2, 1e-2, 43, InitScheme::Antithetic);
    const Vector a_before = net.a;
    TrainConfig cfg;
    cfg.eta = 0.9 * max_step_size(p, n);
    cfg.epochs = 200;
    cfg.record_stride = 50;
    const TrainingTrace tr = train(net, y, pts, p, cfg);
    CHECK(tr.records.back().loss < tr.records.front().loss);
    CHECK(tr.monotonicity_violations == 0);
    CHECK((net.a - a_before).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("deterministic traces") {
    TrainConfig cfg;
    cfg.eta = 0.2;
    cfg.epochs = 40;
    TwoLayerReluNet n1 = init_net(256, 2, 1e-2, 44, InitScheme::Antithetic);
    TwoLayerReluNet n2 = init_net(256, 2, 1e-2, 44, InitScheme::Antithetic);
    const TrainingTrace t1 = train(n1, y, pts, p, cfg);
    const TrainingTrace t2 = train(n2, y, pts, p, cfg);
    REQUIRE(t1.records.size() == t2.records.size());
    for (std::size_t i = 0; i < t1.records.size(); ++i) {
      CHECK(t1.records[i].loss == t2.records[i].loss);
      CHECK((t1.records[i].residual - t2.records[i].residual).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK((n1.W - n2.W).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("divergence carries the last finite state") {
    // GD on this architecture is hard to blow up dynamically (dead neurons
    // absorb oscillation), so drive the quadratic loss into overflow: the
    // epoch-0 loss is finite, the first step is not.
    TwoLayerReluNet net = init_net(64, 2, 1e-2, 45, InitScheme::Antithetic);
    TrainConfig cfg;
    cfg.eta = 1e20;
    cfg.epochs = 10;
    bool threw = false;
    try {
      train(net, (y * 1e150).eval(), pts, p, cfg);
    } catch (const DivergenceError& e) {
      threw = true;
      CHECK(e.trace.diverged);
      for (const auto& rec : e.trace.records) CHECK(std::isfinite(rec.loss));
    }
    CHECK(threw);
  }
  SUBCASE("observers are recorded") {
    TwoLayerReluNet net = init_net(64, 2, 1e-2, 46, InitScheme::Antithetic);
    TrainConfig cfg;
    cfg.eta = 0.1;
    cfg.epochs = 4;
    std::vector<TrainObserver> obs;
    obs.push_back([](int, const TwoLayerReluNet&, const Vector& z) {
      Vector v(1);
      v(0) = z.norm();
      return v;
    });
    const TrainingTrace tr = train(net, y, pts, p, cfg, obs);
    for (const auto& rec : tr.records)
      CHECK(rec.observed(0) == doctest::Approx(rec.residual.norm()));
  }
}

TEST_CASE("m_constants and max_step_size") {
  const int n = 20;
  SUBCASE("scaled identity") {
    const auto [mi, mp] = m_constants(LossOperator::scaled_identity(n, 1.0 / n));
    CHECK(mi == doctest::Approx(1.0 / std::sqrt(n)).epsilon(1e-14));
    CHECK(mp == mi);
    CHECK(max_step_size(LossOperator::scaled_identity(n, 1.0 / n), n) ==
          doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("diagonal") {
    Vector c = Vector::Constant(n, 2.0 * M_PI / n);
    c(3) = 2.0 * c(3);
    c *= 2.0 * M_PI / c.sum();
    const auto [mi, mp] = m_constants(LossOperator::diagonal(c));
    CHECK(mi == doctest::Approx(std::sqrt(c.maxCoeff())).epsilon(1e-14));
    // Uniform weights c_max = A_d / n give the bound n / (2 A_d).
    const LossOperator unif = LossOperator::diagonal(Vector::Constant(n, 2.0 * M_PI / n));
    CHECK(max_step_size(unif, n) == doctest::Approx(1.0 / (4.0 * M_PI)).epsilon(1e-12));
  }
  SUBCASE("scaling P by 4 scales both constants by 2 and quarters the bound") {
    const LossOperator p1 = LossOperator::scaled_identity(n, 0.3);
    const LossOperator p4 = LossOperator::scaled_identity(n, 1.2);
    const auto [mi1, mp1] = m_constants(p1);
    const auto [mi4, mp4] = m_constants(p4);
    CHECK(mi4 == doctest::Approx(2.0 * mi1).epsilon(1e-14));
    CHECK(mp4 == doctest::Approx(2.0 * mp1).epsilon(1e-14));
    CHECK(max_step_size(p4, n) == doctest::Approx(0.25 * max_step_size(p1, n)).epsilon(1e-14));
  }
  SUBCASE("sobolev lambda_max matches the dense eigensolve") {
    const QuadratureRule rule = testing::trapezoid_rule_s1(31);
    const LossOperator ps = build_p_sobolev(rule, 1.5, 15);
    Eigen::SelfAdjointEigenSolver<Matrix> es(ps.dense(), Eigen::EigenvaluesOnly);
    CHECK(ps.lambda_max() == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-10));
  }
}

TEST_CASE("net checkpoint round-trip") {
  const TwoLayerReluNet net = init_net(32, 3, 1e-2, 77, InitScheme::Gaussian);
  const std::string path = "/tmp/sbl_net_test.bin";
  save_net(net, path);
  const TwoLayerReluNet back = load_net(path);
  CHECK((back.W - net.W).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.b - net.b).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.a - net.a).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}
