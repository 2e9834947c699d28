#pragma once

#include <cmath>
#include <cstdint>

namespace sgdlab {

/// pcg32 (PCG-XSH-RR 64/32), following O'Neill's minimal C reference
/// implementation. Every sampling decision in the library flows through
/// this generator so that index streams are reproducible across platforms
/// and bit-identical between reruns. Seeding matches pcg32_srandom(), the
/// bounded draw matches pcg32_boundedrand(); the reference test vectors
/// are asserted in tests/test_rng.cpp.
class Pcg32 {
 public:
  Pcg32(std::uint64_t initstate, std::uint64_t initseq) { seed(initstate, initseq); }

  void seed(std::uint64_t initstate, std::uint64_t initseq) {
    state_ = 0u;
    inc_ = (initseq << 1u) | 1u;
    next_u32();
    state_ += initstate;
    next_u32();
    have_spare_ = false;
  }

  std::uint32_t next_u32() {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  /// Unbiased draw from {0, ..., bound-1} via the reference rejection loop.
  std::uint32_t next_below(std::uint32_t bound) {
    const std::uint32_t threshold = (0u - bound) % bound;
    for (;;) {
      const std::uint32_t r = next_u32();
      if (r >= threshold) return r % bound;
    }
  }

  /// Uniform double in [0, 1), 32-bit resolution: next_u32() * 2^-32.
  double next_double() { return next_u32() * 0x1p-32; }

  /// Standard normal via Box-Muller; the paired variate is cached.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    constexpr double two_pi = 6.283185307179586476925286766559;
    const double u1 = (static_cast<double>(next_u32()) + 1.0) * 0x1p-32;  // (0,1]
    const double u2 = next_u32() * 0x1p-32;
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(two_pi * u2);
    have_spare_ = true;
    return r * std::cos(two_pi * u2);
  }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Stream ids decouple the three uses of a user-facing seed: the index
/// stream of a run, dataset synthesis, and property-test probes. A stream
/// is pcg32_srandom(seed, stream_id).
enum class StreamId : std::uint64_t { run = 1, dataset = 2, probe = 3 };

inline Pcg32 make_stream(std::uint64_t seed, StreamId id) {
  return Pcg32(seed, static_cast<std::uint64_t>(id));
}

}  // namespace sgdlab
