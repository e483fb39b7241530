#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sarah {

/// Counter-based generator. Word k of a stream with key K is
///
///   mix64(K + (k + 1) * 0x9E3779B97F4A7C15)
///
/// where mix64 is the SplitMix64 finalizer (xor-shift 30, multiply
/// 0xBF58476D1CE4E5B9, xor-shift 27, multiply 0x94D049BB133111EB, xor-shift 31).
/// With K = seed this is exactly the SplitMix64 sequence, so seed 0 yields
/// 0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F, ...
///
/// Derived quantities, each consuming whole words in order:
///   uniform01()     (word >> 11) * 2^-53
///   uniform_index() Lemire multiply-shift with rejection, unbiased on [0, n)
///   normal()        Box-Muller cosine branch on u1 = 1 - uniform01(), u2 = uniform01()
///   split(tag)      new key mix64(K ^ mix64(tag + 0x9E3779B97F4A7C15)), counter 0
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : key_(seed) {}

  static std::uint64_t mix64(std::uint64_t z) noexcept;
  // Random access to the word stream; does not advance.
  std::uint64_t word_at(std::uint64_t counter) const noexcept;

  std::uint64_t next_u64() noexcept { return word_at(counter_++); }
  double uniform01() noexcept;
  std::size_t uniform_index(std::size_t n);
  double normal();

  CounterRng split(std::uint64_t tag) const noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Streams derived from one user seed; every consumer gets its own split.
namespace stream {
inline constexpr std::uint64_t kSampling = 1;
inline constexpr std::uint64_t kInit = 2;
inline constexpr std::uint64_t kSynthetic = 3;
inline constexpr std::uint64_t kOutputPick = 4;
}  // namespace stream

// b distinct indices from [0, n), uniformly, returned sorted ascending.
// Floyd's algorithm: exactly b calls to uniform_index.
std::vector<std::size_t> sample_without_replacement(CounterRng& rng, std::size_t n,
                                                    std::size_t b);

}  // namespace sarah
