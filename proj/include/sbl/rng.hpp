#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sbl {

// Seeded generator with an explicit Box-Muller normal, so streams are
// reproducible independent of the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() {  // (0, 1]
    return (static_cast<double>(gen_()) + 1.0) * 0x1.0p-64;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  // Rademacher sign.
  double sign() { return (gen_() & 1u) ? 1.0 : -1.0; }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sbl
