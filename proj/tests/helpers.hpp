#pragma once

#include <cstdint>
#include <vector>

#include "rrde/grid_path.hpp"
#include "rrde/rng.hpp"

namespace testutil {

using rrde::GridPathd;
using rrde::Index;
using rrde::Matd;
using rrde::Vecd;

inline std::vector<double> uniform_times(Index N, double T = 1) {
  std::vector<double> t(static_cast<std::size_t>(N));
  for (Index k = 0; k < N; ++k) t[k] = T * static_cast<double>(k) / static_cast<double>(N - 1);
  return t;
}

/// Gaussian random walk with increment scale `scale`, starting at 0.
inline GridPathd random_walk(std::uint64_t seed, Index d, Index N, double scale = 1, double T = 1) {
  Matd v = Matd::Zero(d, N);
  for (Index i = 0; i < d; ++i) {
    const std::uint64_t key = rrde::stream_key(seed, static_cast<std::uint64_t>(i));
    for (Index k = 1; k < N; ++k) v(i, k) = v(i, k - 1) + scale * rrde::counter_normal(key, static_cast<std::uint64_t>(k));
  }
  return GridPathd(uniform_times(N, T), std::move(v));
}

/// Path from a function of time on a uniform grid.
template <typename F>
GridPathd from_function(Index d, Index N, F f, double T = 1) {
  const std::vector<double> t = uniform_times(N, T);
  Matd v(d, N);
  for (Index k = 0; k < N; ++k) v.col(k) = f(t[k]);
  return GridPathd(t, std::move(v));
}

inline double uniform(std::uint64_t seed, std::uint64_t k) { return rrde::counter_uniform(rrde::stream_key(seed, 99), k); }

}  // namespace testutil
