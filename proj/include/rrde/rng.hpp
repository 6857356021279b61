#pragma once

#include <cmath>
#include <cstdint>

namespace rrde {

/// Counter-based generator: draw k of stream (seed, coordinate) is a pure
/// function of the triple, so samples can be produced in any order.
/// SplitMix64 finaliser; uniforms on (0, 1] from the top 53 bits; normals by
/// Box-Muller with the cosine branch for even k and the sine branch for odd k
/// of the same uniform pair.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t coordinate) {
  return splitmix64(seed ^ splitmix64(coordinate * 0xd1b54a32d192ed03ULL + 1));
}

inline double counter_uniform(std::uint64_t key, std::uint64_t counter) {
  const std::uint64_t h = splitmix64(key + counter * 0x9e3779b97f4a7c15ULL);
  return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
}

inline double counter_normal(std::uint64_t key, std::uint64_t k) {
  const std::uint64_t pair = k >> 1;
  const double u1 = counter_uniform(key, 2 * pair);
  const double u2 = counter_uniform(key, 2 * pair + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 6.283185307179586 * u2;
  return (k & 1) ? r * std::sin(a) : r * std::cos(a);
}

}  // namespace rrde
