#pragma once

#include <array>
#include <cstdint>

namespace accessim {

// Deterministic xoshiro256** generator, state expanded from the seed with
// splitmix64. The same seed yields the same stream on every platform.
// fork(k) derives an independent substream, so adding a consumer never
// perturbs the draws seen by existing ones.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform variate in [0, 1).
  double uniform();

  // Substream k: seeded with splitmix64(seed + GOLDEN * (k + 1)).
  Rng fork(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_;
};

}  // namespace accessim
