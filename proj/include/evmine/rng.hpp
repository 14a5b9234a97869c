#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace evmine {

// Deterministic random helpers on top of mt19937_64. The standard
// distributions are implementation-defined, so outputs are derived from raw
// engine bits directly; identical seeds give identical streams everywhere.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1) with 53 bits of precision.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; one value per call (the pair's second
  // half is discarded to keep the stream position independent of usage).
  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Uniform integer in [0, n). Modulo bias is irrelevant at these sizes.
  uint64_t index(uint64_t n) { return n == 0 ? 0 : engine_() % n; }

  uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace evmine
