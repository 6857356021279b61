#pragma once

#include <cstdint>
#include <vector>

#include "rrde/rough_path.hpp"

namespace rrde {

/// Brownian path on the dyadic grid t_k = k T / 2^Nmax. Increment k of
/// coordinate i is sqrt(dt) * counter_normal(stream_key(seed, i), k).
struct BrownianSample {
  std::uint64_t seed = 0;
  Index n = 0;
  int Nmax = 0;
  double T = 1;
  GridPathd path;
};

constexpr int kMaxDyadicLevel = 24;

/// Times k T / 2^L, k = 0..2^L. Nested levels share bitwise equal times.
std::vector<double> dyadic_times(int L, double T);

BrownianSample sample_brownian(std::uint64_t seed, Index n, int Nmax, double T = 1);

/// B at the 2^N + 1 level-N nodes.
GridPathd dyadic_nodes(const BrownianSample& B, int N);

/// Piecewise-linear interpolation of B at the level-N nodes, on the fine grid.
GridPathd dyadic_refine(const BrownianSample& B, int N);

/// Same interpolant realised on the level-L grid, N <= L <= Nmax.
GridPathd dyadic_refine_on(const BrownianSample& B, int N, int L);

/// Lift of B^N on its own nodes with certificate omega = C(X)(t - s).
RoughPathd brownian_lift(const BrownianSample& B, int N, double p);

/// Lift of B^N realised on the level-L grid; the certificate is optional
/// because d_p costs O(4^L).
RoughPathd brownian_lift_on(const BrownianSample& B, int N, double p, int L, bool certify = true);

/// Fractional Brownian motion with Hurst index H on 2^N + 1 nodes of [0, T],
/// independent coordinates, by Cholesky factorisation of the covariance.
GridPathd sample_fbm(std::uint64_t seed, Index n, double H, int N, double T = 1);

struct RoughStatsRow {
  int N = 0;
  double dp_gap = 0;         // median over samples of d_p(lift_N, lift_{N+1})
  double C_mean = 0;         // mean of C(B^N)
  double C_q_mean = 0;       // mean of C(B^N)^q
  double holder_low = 0;     // mean level-1 quotient for p' = 1.9
};

struct RoughStats {
  std::vector<RoughStatsRow> rows;
  double p = 0, q = 0;
  bool dp_gap_decreasing = false;
  bool C_uniform = false;          // max/min C_mean < 1.2
  bool holder_low_grows = false;
};

/// Moment and Cauchy-trend statistics over `samples` Brownian paths
/// (sample i from derive_seed(seed, i)).
RoughStats rough_convergence_stats(std::uint64_t seed, Index samples, Index n, const std::vector<int>& Nrange, double p,
                                   double q, double T = 1);

}  // namespace rrde
