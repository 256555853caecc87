#pragma once

#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace fracsync {

/// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of realization `index` under `master`.
///
/// For a fixed master the map index -> seed is injective: the master is
/// mixed once, the index is added, and the sum is mixed again (both steps
/// are bijections).
constexpr std::uint64_t seed_stream(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) + index);
}

/// Tagged sub-stream, e.g. to keep the past and future halves of a driver
/// independent while sharing the realization index.
constexpr std::uint64_t seed_stream(std::uint64_t master, std::uint64_t index,
                                    std::uint64_t tag) noexcept {
  return seed_stream(seed_stream(master, index), tag);
}

/// Standard normal variates from a 64-bit Mersenne Twister. The boost
/// distribution is used because its algorithm is fixed across standard
/// library vendors, which keeps outputs reproducible between platforms.
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

  double operator()() { return dist_(engine_); }
  double uniform() { return std::generate_canonical<double, 53>(engine_); }
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace fracsync
