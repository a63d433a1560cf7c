#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace grcv {

// Deterministic bounded draw: avoids uniform_int_distribution, whose output
// is implementation-defined, so shuffles stay identical across toolchains.
inline std::uint32_t bounded_u32(std::mt19937& rng, std::uint32_t bound) {
  return static_cast<std::uint32_t>((static_cast<std::uint64_t>(rng()) * bound) >> 32);
}

template <typename T>
void deterministic_shuffle(std::vector<T>& items, std::mt19937& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = bounded_u32(rng, static_cast<std::uint32_t>(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace grcv
