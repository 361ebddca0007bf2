#pragma once

#include <cstdint>
#include <vector>

namespace chainbench {

// splitmix64. <random> engines would do, but the standard distributions are
// implementation-defined, and suite files must be byte-identical for a given
// seed on every toolchain. Everything here is fixed integer arithmetic.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Unbiased value in [0, bound) via rejection sampling.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  bool coin() { return below(2) == 1; }

 private:
  std::uint64_t state_;
};

// Order-sensitive combine used to derive independent per-chain streams from
// (suite seed, technique, length, index). Frozen by the determinism tests.
inline std::uint64_t mix_seed(std::uint64_t acc, std::uint64_t word) {
  std::uint64_t z = acc ^ (word + 0x9e3779b97f4a7c15ULL + (acc << 6) + (acc >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_stream_seed(std::uint64_t suite_seed,
                                        std::uint64_t technique_tag,
                                        std::uint64_t length,
                                        std::uint64_t index) {
  std::uint64_t s = mix_seed(suite_seed, technique_tag);
  s = mix_seed(s, length);
  s = mix_seed(s, index);
  return s;
}

}  // namespace chainbench
