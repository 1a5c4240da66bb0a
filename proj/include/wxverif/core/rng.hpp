#pragma once

#include <cstdint>
#include <random>

namespace wxverif {

/// splitmix64 finaliser; a bijection on 64-bit words.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of stream `index` under `master`. Streams depend only on the pair,
/// never on how work is scheduled.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t index) {
  return std::mt19937_64(stream_seed(master, index));
}

/// splitmix64 as an engine: one word of state, so a fresh stream per case
/// costs nothing. Satisfies UniformRandomBitGenerator.
class SplitMixEngine {
 public:
  using result_type = std::uint64_t;
  explicit SplitMixEngine(std::uint64_t seed) : state_(seed) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() {
    const std::uint64_t out = splitmix64(state_);
    state_ += 0x9e3779b97f4a7c15ULL;
    return out;
  }

 private:
  std::uint64_t state_;
};

inline SplitMixEngine case_stream(std::uint64_t master, std::uint64_t index) {
  return SplitMixEngine(stream_seed(master, index));
}

/// Uniform draw on [0, 1) from the top 53 bits; identical on every platform.
template <class URBG>
double uniform01(URBG& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Uniform draw on (0, 1): the midpoint of a 2^-53 cell, never 0 or 1.
template <class URBG>
double uniform_open01(URBG& gen) {
  return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace wxverif
