#pragma once

#include <cstdint>

#include "sbl/loss_operator.hpp"
#include "sbl/sphere.hpp"

namespace sbl {

// 2-layer ReLU network N(x) = (1/sqrt(m)) sum_r a_r ReLU(w_r . x + b_r).
// The output signs a_r are fixed at initialization and never trained.
struct TwoLayerReluNet {
  Matrix W;  // m x d, row r = w_r
  Vector b;  // m
  Vector a;  // m, entries in {-1, +1}

  int width() const { return static_cast<int>(W.rows()); }
  int input_dim() const { return static_cast<int>(W.cols()); }
};

enum class InitScheme { Gaussian, Antithetic };

// Gaussian: w_r ~ N(0, kappa^2 I), b_r = 0, a_r = +-1 equiprobable.
// Antithetic: consecutive pairs share w with negated a, so the initial
// forward map is identically zero; requires even m.
TwoLayerReluNet init_net(int m, int d, double kappa, std::uint64_t seed, InitScheme scheme);

double forward(const TwoLayerReluNet& net, const SpherePoint& x);

// Network outputs at every node, evaluated in width blocks.
Vector forward_batch(const TwoLayerReluNet& net, const SpherePointSet& nodes);

struct NetGradient {
  Matrix dW;  // m x d
  Vector db;  // m
};

// Exact full-batch gradient of Phi_P = 1/2 (y-u)^T P (y-u) with the
// subgradient convention 1{t >= 0} at the ReLU kink, the same event the
// empirical kernel counts.
NetGradient gradient(const TwoLayerReluNet& net, const Vector& y, const SpherePointSet& nodes,
                     const LossOperator& p);

// Gradient with P(y - u) already computed; saves a forward pass inside the
// training loop.
NetGradient gradient_given_pz(const TwoLayerReluNet& net, const SpherePointSet& nodes,
                              const Vector& pz);

// w <- w - eta dw, b <- b - eta db; a unchanged.
TwoLayerReluNet gd_step(TwoLayerReluNet net, const NetGradient& g, double eta);

// Checkpoint format: 16-byte header (magic "SBLN", u32 m, u32 d, u32
// little-endian tag 1), then W row-major, b, a as doubles.
void save_net(const TwoLayerReluNet& net, const std::string& path);
TwoLayerReluNet load_net(const std::string& path);

}  // namespace sbl
