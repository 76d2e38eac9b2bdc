#pragma once

#include <cstdint>
#include <random>

namespace relusat {

/// Deterministic 64-bit generator; distributions are derived by hand so
/// sequences are identical across standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  double uniform() { return static_cast<double>(engine_() >> 11U) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool coin() { return (engine_() >> 63U) != 0; }

private:
  std::mt19937_64 engine_;
};

} // namespace relusat
