#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rrde/brownian.hpp"
#include "rrde/rough_reflect.hpp"

namespace rrde {

struct ReferenceSolution {
  ReflectedSolution sol;
  RoughPathd X;       // lift of B^Nref on its own nodes
  double self_gap;    // sup over level-(Nref-1) nodes of |Y^S(Nref) - Y^S(Nref-1)|
};

/// Y^S proxy: the reflected equation driven by the lift of B^Nref, one
/// implicit step per grid cell.
ReferenceSolution reference_solution(const BrownianSample& B, const VectorField& sigma, const Domain& domain,
                                     const Vecd& y0, double p, int Nref, const ImplicitOptions& opt = {});

/// Projected Euler scheme for the Stratonovich equation on the level-L grid:
/// Y_{k+1} = Pi(Y_k + sigma dB + 1/2 sum_j (Dsigma_j sigma_j) dt).
GridPathd stratonovich_projection_euler(const BrownianSample& B, const VectorField& sigma, const Domain& domain,
                                        const Vecd& y0, int L);

struct ConvergenceReport {
  std::vector<int> N;
  std::vector<double> mean_sq_err;
  std::vector<double> stderr_;
  std::vector<double> median;
  std::vector<Index> samples_failed;
  LineFit fit;                  // log2(mean) against N
  double theory_slope = 0;
  double self_gap_mean = 0;     // reference self-consistency
  Index samples = 0;
  std::uint64_t seed = 0;
  int Nref = 0;
  std::string config;           // echo of sigma, domain, p, samples, seed
  bool strictly_decreasing = false;
  bool gate = false;            // error at max N below error at min N
  bool within_budget = false;   // failures <= 1% of samples at every N
};

struct WZOptions {
  int Nref = 0;          // 0 selects max(Nrange) + 3
  double T = 1;
  Index n = 0;           // Brownian dimension; 0 takes sigma's noise dimension
  double Cbudget = 1;    // Davie budget for the per-sample check
  int verify_level = 6;  // Davie check on the level-min(N, verify_level) nodes
  ImplicitOptions implicit;
};

/// E[sup_t |y^{Delta_N}_t - Y^S_t|^2] with y^{Delta_N} the implicit scheme on
/// the level-N dyadic partition driven by the lift of B^Nref.
ConvergenceReport wz_error_curve(const VectorField& sigma, const Domain& domain, const Vecd& y0,
                                 const std::vector<int>& Nrange, Index samples, double p, std::uint64_t seed,
                                 const WZOptions& opt = {});

/// E[max_t |int sigma(Y^N) dB^N - int sigma(Y^S) o dB|^2] with Y^N driven by B^N.
ConvergenceReport integral_gap_curve(const VectorField& sigma, const Domain& domain, const Vecd& y0,
                                     const std::vector<int>& Nrange, Index samples, std::uint64_t seed,
                                     double p = 2.5, const WZOptions& opt = {});

/// Both curves with one reference solve per sample.
std::pair<ConvergenceReport, ConvergenceReport> wz_study(const VectorField& sigma, const Domain& domain,
                                                          const Vecd& y0, const std::vector<int>& Nrange,
                                                          Index samples, double p, std::uint64_t seed,
                                                          const WZOptions& opt = {}, bool error_curve = true,
                                                          bool gap_curve = true);

/// Pairwise (cascade) summation; the result depends only on the order of v.
double pairwise_sum(const double* v, std::size_t n);

}  // namespace rrde
