#pragma once

#include <cstdint>

namespace qsn {

// Counter-based generator: SplitMix64's output function applied to
// key + (counter + 1) * golden. Every draw is a pure function of
// (key, counter), so trajectories can be regenerated or split freely.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) : key_(mix(seed)) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t at(std::uint64_t counter) const {
    return mix(key_ + (counter + 1) * kGolden);
  }

  // Uniform in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t counter) const {
    return static_cast<double>(at(counter) >> 11) * 0x1.0p-53;
  }

  // Independent child stream identified by `id`.
  constexpr CounterRng substream(std::uint64_t id) const {
    return CounterRng(key_ ^ mix(id + 0x632be59bd9b4e019ULL), 0);
  }

  constexpr std::uint64_t key() const { return key_; }

 private:
  constexpr CounterRng(std::uint64_t key, int) : key_(key) {}
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
};

}  // namespace qsn
