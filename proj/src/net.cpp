#include "sbl/net.hpp"

#include <cstring>
#include <fstream>

#include "sbl/rng.hpp"

namespace sbl {
namespace {

// Width-block size for batched passes; keeps the per-block slab cache-sized.
constexpr int kBlock = 256;

// Nodes augmented with the bias column: [X 1], n x (d+1).
Matrix augmented(const SpherePointSet& nodes) {
  Matrix xa(nodes.size(), nodes.dim() + 1);
  xa.leftCols(nodes.dim()) = nodes.matrix();
  xa.col(nodes.dim()).setOnes();
  return xa;
}

}  // namespace

TwoLayerReluNet init_net(int m, int d, double kappa, std::uint64_t seed, InitScheme scheme) {
  if (m < 1) throw std::invalid_argument("init_net: m >= 1 required");
  if (scheme == InitScheme::Antithetic && m % 2 != 0)
    throw std::invalid_argument("init_net: antithetic requires even m");
  if (scheme == InitScheme::Gaussian && kappa <= 0.0)
    throw std::invalid_argument("init_net: kappa > 0 required");
  Rng rng(seed);
  TwoLayerReluNet net;
  net.W.resize(m, d);
  net.b = Vector::Zero(m);
  net.a.resize(m);
  if (scheme == InitScheme::Gaussian) {
    for (int r = 0; r < m; ++r)
      for (int j = 0; j < d; ++j) net.W(r, j) = kappa * rng.normal();
    for (int r = 0; r < m; ++r) net.a(r) = rng.sign();
  } else {
    for (int r = 0; r < m; r += 2) {
      for (int j = 0; j < d; ++j) net.W(r, j) = kappa * rng.normal();
      net.W.row(r + 1) = net.W.row(r);
      net.a(r) = rng.sign();
      net.a(r + 1) = -net.a(r);
    }
  }
  return net;
}

double forward(const TwoLayerReluNet& net, const SpherePoint& x) {
  if (x.dim() != net.input_dim()) throw std::invalid_argument("forward: dimension mismatch");
  const Vector pre = net.W * x.coords() + net.b;
  return net.a.dot(pre.cwiseMax(0.0)) / std::sqrt(static_cast<double>(net.width()));
}

Vector forward_batch(const TwoLayerReluNet& net, const SpherePointSet& nodes) {
  if (nodes.dim() != net.input_dim())
    throw std::invalid_argument("forward_batch: dimension mismatch");
  const int m = net.width();
  const int d = net.input_dim();
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
  Vector u = Vector::Zero(nodes.size());
  const Matrix xat = augmented(nodes).transpose();  // (d+1) x n
  Matrix wb(kBlock, d + 1), pre;
  for (int r0 = 0; r0 < m; r0 += kBlock) {
    const int rows = std::min(kBlock, m - r0);
    wb.topRows(rows).leftCols(d) = net.W.middleRows(r0, rows);
    wb.topRows(rows).col(d) = net.b.segment(r0, rows);
    pre.noalias() = wb.topRows(rows) * xat;  // rows x n
    pre = pre.cwiseMax(0.0);
    u.noalias() += pre.transpose() * net.a.segment(r0, rows);
  }
  return u * inv_sqrt_m;
}

NetGradient gradient_given_pz(const TwoLayerReluNet& net, const SpherePointSet& nodes,
                              const Vector& pz) {
  if (pz.size() != nodes.size()) throw std::invalid_argument("gradient_given_pz: length mismatch");
  const int m = net.width();
  const int d = net.input_dim();
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));

  // dPhi/dw_r = -(a_r/sqrt(m)) sum_i (Pz)_i 1{w_r.x_i + b_r >= 0} x_i, and
  // the same sum without x_i for b_r.
  NetGradient g;
  g.dW.resize(m, d);
  g.db.resize(m);
  const Matrix xat = augmented(nodes).transpose();  // (d+1) x n
  Matrix xav(nodes.size(), d + 1);                  // rows (Pz)_i (x_i, 1)
  xav = xat.transpose().array().colwise() * pz.array();
  Matrix wb(kBlock, d + 1), pre, gblock;
  for (int r0 = 0; r0 < m; r0 += kBlock) {
    const int rows = std::min(kBlock, m - r0);
    wb.topRows(rows).leftCols(d) = net.W.middleRows(r0, rows);
    wb.topRows(rows).col(d) = net.b.segment(r0, rows);
    pre.noalias() = wb.topRows(rows) * xat;
    pre = (pre.array() >= 0.0).cast<double>();  // in place: activation mask
    gblock.noalias() = pre * xav;               // rows x (d+1)
    gblock.array().colwise() *= -inv_sqrt_m * net.a.segment(r0, rows).array();
    g.dW.middleRows(r0, rows) = gblock.leftCols(d);
    g.db.segment(r0, rows) = gblock.col(d);
  }
  return g;
}

NetGradient gradient(const TwoLayerReluNet& net, const Vector& y, const SpherePointSet& nodes,
                     const LossOperator& p) {
  if (y.size() != nodes.size()) throw std::invalid_argument("gradient: target length mismatch");
  const Vector u = forward_batch(net, nodes);
  return gradient_given_pz(net, nodes, p.apply(y - u));
}

TwoLayerReluNet gd_step(TwoLayerReluNet net, const NetGradient& g, double eta) {
  if (eta < 0.0) throw std::invalid_argument("gd_step: eta >= 0 required");
  net.W.noalias() -= eta * g.dW;
  net.b.noalias() -= eta * g.db;
  return net;
}

void save_net(const TwoLayerReluNet& net, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_net: cannot open " + path);
  const char magic[4] = {'S', 'B', 'L', 'N'};
  const std::uint32_t m = static_cast<std::uint32_t>(net.width());
  const std::uint32_t d = static_cast<std::uint32_t>(net.input_dim());
  const std::uint32_t endian = 1;
  f.write(magic, 4);
  f.write(reinterpret_cast<const char*>(&m), 4);
  f.write(reinterpret_cast<const char*>(&d), 4);
  f.write(reinterpret_cast<const char*>(&endian), 4);
  for (int r = 0; r < net.width(); ++r)
    for (int j = 0; j < net.input_dim(); ++j) {
      const double w = net.W(r, j);
      f.write(reinterpret_cast<const char*>(&w), 8);
    }
  f.write(reinterpret_cast<const char*>(net.b.data()), 8 * net.width());
  f.write(reinterpret_cast<const char*>(net.a.data()), 8 * net.width());
  if (!f) throw std::runtime_error("save_net: write failed for " + path);
}

TwoLayerReluNet load_net(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_net: cannot open " + path);
  char magic[4];
  std::uint32_t m = 0, d = 0, endian = 0;
  f.read(magic, 4);
  f.read(reinterpret_cast<char*>(&m), 4);
  f.read(reinterpret_cast<char*>(&d), 4);
  f.read(reinterpret_cast<char*>(&endian), 4);
  if (!f || std::memcmp(magic, "SBLN", 4) != 0 || endian != 1)
    throw std::runtime_error("load_net: bad header in " + path);
  TwoLayerReluNet net;
  net.W.resize(m, d);
  net.b.resize(m);
  net.a.resize(m);
  for (std::uint32_t r = 0; r < m; ++r)
    for (std::uint32_t j = 0; j < d; ++j) {
      double w;
      f.read(reinterpret_cast<char*>(&w), 8);
      net.W(r, j) = w;
    }
  f.read(reinterpret_cast<char*>(net.b.data()), 8 * m);
  f.read(reinterpret_cast<char*>(net.a.data()), 8 * m);
  if (!f) throw std::runtime_error("load_net: truncated file " + path);
  return net;
}

}  // namespace sbl
