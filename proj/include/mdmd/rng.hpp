#pragma once

#include <cstdint>
#include <random>

namespace mdmd {

// Portable uniform draws on top of std::mt19937_64. The engine output is
// fixed by the standard; the conversion to double is done here because
// std::uniform_real_distribution is implementation-defined.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}

  // 53 random mantissa bits, value in [0, 1).
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double next(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mdmd
