#include "sbl/trainer.hpp"

#include <cmath>
#include <iostream>

namespace sbl {

const TraceRecord& TrainingTrace::at_epoch(int epoch) const {
  for (const auto& r : records)
    if (r.epoch == epoch) return r;
  throw std::out_of_range("TrainingTrace: epoch " + std::to_string(epoch) + " not recorded");
}

TrainingTrace train(TwoLayerReluNet& net, const Vector& y, const SpherePointSet& nodes,
                    const LossOperator& p, const TrainConfig& cfg,
                    const std::vector<TrainObserver>& observers) {
  if (y.size() != nodes.size()) throw std::invalid_argument("train: target length mismatch");
  if (cfg.eta <= 0.0 && cfg.epochs > 0) throw std::invalid_argument("train: eta > 0 required");
  const int n = nodes.size();
  const int m = net.width();
  const double eta_bound = max_step_size(p, n);
  if (cfg.eta > eta_bound)
    std::cerr << "train: eta " << cfg.eta << " exceeds the step-size bound " << eta_bound << "\n";

  TrainingTrace trace;
  trace.eta = cfg.eta;

  const bool track_flips =
      cfg.track_sign_flips && static_cast<long long>(m) * n <= (1LL << 26);
  std::vector<std::uint64_t> pattern, prev_pattern;

  auto activation_pattern = [&](std::vector<std::uint64_t>* bits) {
    bits->assign((static_cast<std::size_t>(m) * n + 63) / 64, 0);
    const Matrix pre = nodes.matrix() * net.W.transpose();  // n x m
    std::size_t k = 0;
    for (int r = 0; r < m; ++r)
      for (int i = 0; i < n; ++i, ++k)
        if (pre(i, r) + net.b(r) >= 0.0) (*bits)[k / 64] |= (1ULL << (k % 64));
  };

  double prev_loss = 0.0;
  const Vector a_init = net.a;

  auto record = [&](int epoch, const Vector& z, double loss, int flips) {
    TraceRecord rec;
    rec.epoch = epoch;
    rec.loss = loss;
    if (cfg.record_residuals) rec.residual = z;
    rec.sign_flips = flips;
    if (!observers.empty()) {
      std::vector<Vector> outs;
      Eigen::Index total = 0;
      for (const auto& obs : observers) {
        outs.push_back(obs(epoch, net, z));
        total += outs.back().size();
      }
      rec.observed.resize(total);
      Eigen::Index at = 0;
      for (const auto& o : outs) {
        rec.observed.segment(at, o.size()) = o;
        at += o.size();
      }
    }
    trace.records.push_back(std::move(rec));
  };

  Vector u = forward_batch(net, nodes);
  {
    const Vector z0 = y - u;
    prev_loss = 0.5 * p.quadratic(z0);
    record(0, z0, prev_loss, -1);
  }
  if (track_flips) activation_pattern(&prev_pattern);

  for (int k = 1; k <= cfg.epochs; ++k) {
    const NetGradient g = gradient_given_pz(net, nodes, p.apply(y - u));
    net.W.noalias() -= cfg.eta * g.dW;
    net.b.noalias() -= cfg.eta * g.db;

    u = forward_batch(net, nodes);
    const Vector z = y - u;
    const double loss = 0.5 * p.quadratic(z);

    if (!std::isfinite(loss)) {
      trace.diverged = true;
      trace.epochs_run = k - 1;
      throw DivergenceError("train: non-finite loss at epoch " + std::to_string(k),
                            std::move(trace));
    }
    if (cfg.eta <= eta_bound && loss > prev_loss * (1.0 + 1e-12))
      ++trace.monotonicity_violations;
    prev_loss = loss;

    int flips = -1;
    if (track_flips) {
      activation_pattern(&pattern);
      flips = 0;
      for (std::size_t w = 0; w < pattern.size(); ++w)
        flips += __builtin_popcountll(pattern[w] ^ prev_pattern[w]);
      std::swap(pattern, prev_pattern);
    }

    if (k % cfg.record_stride == 0 || k == cfg.epochs) record(k, z, loss, flips);
  }
  trace.epochs_run = cfg.epochs;

  if ((net.a.array() != a_init.array()).any())
    throw std::logic_error("train: output signs were mutated");
  return trace;
}

}  // namespace sbl
