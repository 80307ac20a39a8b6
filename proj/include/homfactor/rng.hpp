#pragma once

#include <cstdint>
#include <random>

namespace homfactor {

// Deterministic RNG used by every generator in the toolkit. mt19937_64 output
// is specified bit-for-bit by the standard, and we sample bounded values with
// our own rejection loop (std distributions are implementation-defined), so a
// fixed seed yields bit-identical instances on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, bound); bound >= 1. Rejection sampling keeps it unbiased.
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t limit = bound * (UINT64_MAX / bound);
    for (;;) {
      std::uint64_t v = engine_();
      if (v < limit || limit == 0) return v % bound;
    }
  }

  int below_int(int bound) { return static_cast<int>(below(static_cast<std::uint64_t>(bound))); }

  bool coin() { return (engine_() & 1) != 0; }

  // Stable per-task child seed so independent cells never share a stream.
  static std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finalizer over seed ^ golden-ratio-scaled index
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace homfactor
