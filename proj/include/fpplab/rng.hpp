#pragma once

#include <cstdint>

namespace fpplab {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based stream: a pure function of (seed, replicate, index, stream),
/// so any subset of edges can be drawn in any order with identical results.
inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t replicate, std::uint64_t index,
                                  std::uint64_t stream) {
  std::uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
  h = splitmix64(h ^ replicate);
  h = splitmix64(h ^ (index * 0x9e3779b97f4a7c15ULL));
  return splitmix64(h ^ (stream + 0x3c6ef372fe94f82bULL));
}

/// Uniform in the open interval (0, 1).
inline double counter_uniform(std::uint64_t seed, std::uint64_t replicate, std::uint64_t index,
                              std::uint64_t stream) {
  return (static_cast<double>(counter_hash(seed, replicate, index, stream) >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace fpplab
