#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mdt {

/// Derives an independent stream seed from (seed, purpose, index).
///
/// All randomness in the library flows through this function so that a
/// computation split across threads draws exactly the numbers it would draw
/// serially: each task names its stream instead of sharing a generator.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose,
                          std::uint64_t index = 0);

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::string_view purpose,
                    std::uint64_t index = 0) {
  return Rng(derive_seed(seed, purpose, index));
}

}  // namespace mdt
