#include "sarah/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sarah/errors.hpp"

namespace sarah {
namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t CounterRng::mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t CounterRng::word_at(std::uint64_t counter) const noexcept {
  return mix64(key_ + (counter + 1) * kGolden);
}

double CounterRng::uniform01() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::size_t CounterRng::uniform_index(std::size_t n) {
  if (n == 0) throw ConfigError("uniform_index: empty range");
  const auto range = static_cast<std::uint64_t>(n);
  for (;;) {
    const unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * range;
    const auto low = static_cast<std::uint64_t>(m);
    if (low < range) {
      const std::uint64_t threshold = (0 - range) % range;
      if (low < threshold) continue;
    }
    return static_cast<std::size_t>(m >> 64);
  }
}

double CounterRng::normal() {
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

CounterRng CounterRng::split(std::uint64_t tag) const noexcept {
  return CounterRng(mix64(key_ ^ mix64(tag + kGolden)));
}

std::vector<std::size_t> sample_without_replacement(CounterRng& rng, std::size_t n,
                                                    std::size_t b) {
  if (b == 0 || b > n) throw ConfigError("batch size must be in [1, n]");
  std::vector<std::size_t> chosen;
  chosen.reserve(b);
  // Membership by linear scan for small batches, bitmap otherwise.
  std::vector<bool> taken(b > 64 ? n : 0, false);
  auto contains = [&](std::size_t i) {
    return b > 64 ? static_cast<bool>(taken[i])
                  : std::find(chosen.begin(), chosen.end(), i) != chosen.end();
  };
  for (std::size_t j = n - b; j < n; ++j) {
    const std::size_t t = rng.uniform_index(j + 1);
    const std::size_t pick = contains(t) ? j : t;
    chosen.push_back(pick);
    if (b > 64) taken[pick] = true;
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace sarah
