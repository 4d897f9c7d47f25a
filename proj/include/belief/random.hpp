#pragma once

#include <cstdint>
#include <random>

namespace belief {

/// Independent, reproducible stream per (seed, purpose) pair.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

namespace rng_stream {
inline constexpr std::uint32_t partition = 1;
inline constexpr std::uint32_t sample = 2;
inline constexpr std::uint32_t generator = 3;
inline constexpr std::uint32_t folds = 4;
}  // namespace rng_stream

}  // namespace belief
