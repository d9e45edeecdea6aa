#pragma once

#include <cstdint>
#include <limits>

namespace coinstream {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// Derives an independent stream key from a seed and a (tag, id) pair.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t tag,
                                   std::uint64_t id) noexcept {
  return mix64(mix64(seed + kGolden) ^ mix64(tag * kGolden + id + 1));
}

// Counter-based generator: the i-th output is mix64(key + (i+1)*golden), so a
// stream is fully determined by its key and how many values were consumed.
// Satisfies UniformRandomBitGenerator for use with <random> distributions.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  constexpr CounterRng() noexcept = default;
  constexpr explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
  }

  // Uniform double in [0, 1).
  constexpr double uniform01() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  constexpr std::uint64_t key() const noexcept { return key_; }
  constexpr std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

// Stream tags. Each consumer of session randomness gets its own tag.
namespace rng_tag {
inline constexpr std::uint64_t coin = 1;
inline constexpr std::uint64_t algorithm = 2;
inline constexpr std::uint64_t instance = 3;
inline constexpr std::uint64_t walk = 4;
inline constexpr std::uint64_t harness = 5;
}  // namespace rng_tag

}  // namespace coinstream
