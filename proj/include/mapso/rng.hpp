#pragma once

#include <cstdint>
#include <random>

namespace mapso {

/// SplitMix64 finalizer. Used to decorrelate seeds and to derive child streams.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Combines a parent seed with a stream key into an independent child seed.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t key) noexcept;

/// Seedable 64-bit generator used everywhere randomness is needed.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard, seeded with mix64(seed). Uniform doubles take the top 53 bits of
/// one engine output, so a given seed yields bit-identical streams on every
/// conforming platform (std::uniform_real_distribution is not used because its
/// algorithm is implementation-defined).
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(mix64(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Independent generator for the given stream key; does not advance *this.
  Rng split(std::uint64_t key) const { return Rng(derive_stream_seed(seed_, key)); }

  // UniformRandomBitGenerator interface.
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace mapso
