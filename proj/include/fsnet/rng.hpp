#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fsnet {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent sub-seed from an ordered tuple of integers, e.g.
/// (seed, stream, episode, class, view). Order matters.
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

/// Stream tags keep sampling and jitter draws for the same episode independent.
namespace stream {
inline constexpr std::uint64_t kEpisodeSampling = 1;
inline constexpr std::uint64_t kSubspaceJitter = 2;
inline constexpr std::uint64_t kTrainSampling = 3;
inline constexpr std::uint64_t kTrainJitter = 4;
inline constexpr std::uint64_t kParamInit = 5;
inline constexpr std::uint64_t kLabelShuffle = 6;
}  // namespace stream

}  // namespace fsnet
