#pragma once

#include <optional>

#include "rrde/skorohod.hpp"
#include "rrde/solution.hpp"
#include "rrde/vector_field.hpp"

namespace rrde {

/// Greedy left-to-right partition (grid node indices, first 0, last N-1) with
/// omega(t_k, t_{l+1}) - omega(t_k, t_l) <= eps/2 for every k <= l, each new
/// node taken as far right as the condition allows.
std::vector<Index> adaptive_partition(const Controld& ctrl, double epsilon);
std::vector<double> partition_times(const Controld& ctrl, const std::vector<Index>& nodes);

/// 1/4 min(1, (2 C_2 ||Dsigma||)^{-p}) with C_2 = 1 + 4 ||sigma||.
double default_epsilon_young(const VectorField& sigma, double p);

/// Euler scheme: on each partition interval, Skorohod problem for the
/// frozen-coefficient path y_{t_k} + sigma(y_{t_k})(x_t - x_{t_k}) on the
/// driver's sub-grid nodes. The control defaults to the p-variation of x;
/// epsilon <= 0 selects the default.
ReflectedSolution solve_reflected_young(const GridPathd& x, const VectorField& sigma, const Domain& domain, const Vecd& y0,
                                        double p, double epsilon = 0, const std::optional<Controld>& ctrl = std::nullopt);

/// Same scheme on a given partition.
ReflectedSolution solve_reflected_young_on(const GridPathd& x, const VectorField& sigma, const Domain& domain,
                                           const Vecd& y0, double p, const std::vector<Index>& partition,
                                           const Controld& ctrl);

/// I_s(t) = Y_t - Y_s - sigma(Y_s)(x_t - x_s) - (Phi_t - Phi_s).
Vecd remainder_I(const ReflectedSolution& sol, const GridPathd& x, const VectorField& sigma, Index s, Index t);

/// I at (partition node, later grid node) pairs: maxima per omega bucket, the
/// log-log slope, the within-step maximum, and the residual of
/// I_s(u) - I_s(t) - I_t(u) = (sigma(Y_t) - sigma(Y_s))(x_u - x_t) on sampled triples.
/// Cross-step pairs with omega above omega_cap are left out of the fit (the
/// bound M omega^{gamma/p} is local, for omega <= epsilon <= 1).
DefectReport defect_profile_I(const ReflectedSolution& sol, const GridPathd& x, const VectorField& sigma,
                              const Controld& ctrl, double p, double gamma = 2, double omega_cap = kUnbounded);

struct RefinementResult {
  ReflectedSolution solution;
  std::vector<double> gaps;
  std::vector<std::size_t> partition_sizes;
};

/// Dyadic ladder: start from the adaptive partition, insert the middle grid
/// node of every interval at each level, stop when consecutive solutions are
/// within tol in sup norm.
RefinementResult refine_until_converged(const GridPathd& x, const VectorField& sigma, const Domain& domain,
                                        const Vecd& y0, double p, double tol, int max_levels = 14);

struct LipschitzGap {
  double sup_diff = 0;
  double bv_diff = 0;
  double bv_x = 0;
  double bv_xprime = 0;
  /// C e^{C'(||x|| + ||x'||)} ||x - x'||.
  double bound(double C, double Cp) const { return C * std::exp(Cp * (bv_x + bv_xprime)) * bv_diff; }
};

/// Solve with two bounded-variation drivers and compare.
LipschitzGap lipschitz_gap(const GridPathd& x, const GridPathd& xprime, const VectorField& sigma, const Domain& domain,
                           const Vecd& y0);

}  // namespace rrde
