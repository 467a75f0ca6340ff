#ifndef DISP_RNG_HPP
#define DISP_RNG_HPP

#include <cstdint>

namespace disp {

// Counter-based generator: one independent, reproducible stream per (seed, key).
// Keying a stream per consumer makes common-random-number runs exact: the same
// consumer sees the same uniforms no matter what happened to other consumers.
class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::uint64_t key)
      : state_(mix(seed ^ mix(key + 0x9E3779B97F4A7C15ULL))) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // uniform in [0, 1)
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return next() % n; }

private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

} // namespace disp

#endif
