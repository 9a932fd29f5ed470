#pragma once

#include <cstdint>

namespace eet {

// Stateless counter-based generator. Every (seed, stream, counter) triple maps
// to one uniform double, so per-trajectory substreams can be evaluated in any
// order and on any number of workers with identical results.
namespace detail {

inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

inline double uniform_draw(uint64_t seed, uint64_t stream, uint64_t counter) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = detail::mix64(z);
  z += 0x9e3779b97f4a7c15ull * (counter + 1);
  z = detail::mix64(z);
  return double(z >> 11) * 0x1.0p-53;  // [0, 1)
}

}  // namespace eet
