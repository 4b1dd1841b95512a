#pragma once

#include <cstdint>
#include <random>

namespace olts {

// SplitMix64 finalizer; scrambles seeds and derives sub-stream keys.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derives the seed of sub-stream `stream_id` of a stream seeded with `base`.
// Distinct ids give statistically independent streams; the same (base, id)
// always gives the same stream. Every reproducibility contract in this
// library is built on this function.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream_id) {
  return mix64(base ^ mix64(stream_id));
}

// Seedable random stream with cheap keyed sub-streams.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : base_(seed), gen_(mix64(seed)) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), n > 0. Modulo bias is negligible for the
  // small n used here (action counts, support sizes).
  int next_below(int n) {
    return static_cast<int>(gen_() % static_cast<std::uint64_t>(n));
  }

  // Independent child stream keyed by id (see derive_seed).
  SplitRng split(std::uint64_t stream_id) const {
    return SplitRng(derive_seed(base_, stream_id));
  }

  std::uint64_t base_seed() const { return base_; }

 private:
  std::uint64_t base_;
  std::mt19937_64 gen_;
};

}  // namespace olts
