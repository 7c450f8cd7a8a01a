#pragma once

#include <functional>
#include <vector>

#include "sbl/net.hpp"

namespace sbl {

struct TrainConfig {
  double eta = 0.1;
  int epochs = 1000;
  double kappa = 1e-2;
  std::uint64_t seed = 0;
  InitScheme scheme = InitScheme::Antithetic;
  int record_stride = 1;
  bool record_residuals = true;
  // Compare activation patterns between consecutive epochs when the m x n
  // bitset stays under 2^26 bits.
  bool track_sign_flips = false;
  // Stop (and record) once the loss falls below this; 0 disables.
  double stop_loss_below = 0.0;
};

struct TraceRecord {
  int epoch = 0;
  double loss = 0.0;
  Vector residual;      // z(k) = y - u(k), present when record_residuals
  Vector observed;      // concatenated observer outputs, may be empty
  int sign_flips = -1;  // -1 when not tracked
};

// Observer callback: epoch, current net, residual -> values appended to the
// record (e.g. per-frequency losses). Must not mutate shared state.
using TrainObserver = std::function<Vector(int epoch, const TwoLayerReluNet& net, const Vector& z)>;

struct DivergenceError;

struct TrainingTrace {
  std::vector<TraceRecord> records;
  double eta = 0.0;
  int epochs_run = 0;
  int monotonicity_violations = 0;  // loss increases under the step-size bound
  bool diverged = false;

  const TraceRecord& at_epoch(int epoch) const;
};

struct DivergenceError : std::runtime_error {
  DivergenceError(const std::string& what, TrainingTrace partial)
      : std::runtime_error(what), trace(std::move(partial)) {}
  TrainingTrace trace;  // last finite state
};

// Full-batch gradient descent on Phi_P. Records every `record_stride` epochs
// (always including epoch 0 and the final epoch). Warns once to stderr when
// eta exceeds the step-size bound of max_step_size(P, n).
TrainingTrace train(TwoLayerReluNet& net, const Vector& y, const SpherePointSet& nodes,
                    const LossOperator& p, const TrainConfig& cfg,
                    const std::vector<TrainObserver>& observers = {});

}  // namespace sbl
