#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace signet::rng {

// Named sub-stream tags. Every random decision in the toolkit draws from a
// stream derived from (master seed, tag, indices...), so runs are reproducible
// and independent of execution order.
enum Stream : std::uint64_t {
  kSynthetic = 1,
  kWalks = 2,
  kTrainerInit = 3,
  kTrainerShuffle = 4,
  kTrainerPairs = 5,
  kFolds = 6,
  kDownsample = 7,
  kLogistic = 8,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive(std::uint64_t seed,
                               std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t p : path) h = splitmix64(h ^ p);
  return h;
}

inline std::mt19937_64 stream(std::uint64_t seed,
                              std::initializer_list<std::uint64_t> path) {
  return std::mt19937_64(derive(seed, path));
}

// Uniform double in [0, 1). Used instead of std::uniform_real_distribution in
// hot paths so the draw count per decision is always exactly one.
inline double unit(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

}  // namespace signet::rng
