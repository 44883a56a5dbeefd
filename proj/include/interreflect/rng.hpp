#pragma once

#include <cstdint>

namespace interreflect {

// SplitMix64 stream keyed by (seed, illuminant index, trial index). Every
// trial owns an independent stream, so results do not depend on how trials
// are scheduled across threads. The generator choice is pinned in the README.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t illuminant, std::uint64_t trial)
      : state_(mix(mix(mix(seed) ^ illuminant) ^ trial)) {}

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix_final(state_);
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Unbiased uniform index in [0, n) by rejection.
  std::size_t next_index(std::size_t n) {
    const std::uint64_t span = static_cast<std::uint64_t>(n);
    const std::uint64_t bound = (~std::uint64_t{0} / span) * span;
    std::uint64_t r = next_u64();
    while (r >= bound) r = next_u64();
    return static_cast<std::size_t>(r % span);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix_final(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t mix(std::uint64_t z) { return mix_final(z + kGamma); }

  std::uint64_t state_;
};

}  // namespace interreflect
