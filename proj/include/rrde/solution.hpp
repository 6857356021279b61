#pragma once

#include <vector>

#include "rrde/control.hpp"
#include "rrde/domain.hpp"

namespace rrde {

/// Empirical a-priori constants: C in |Y_t - Y_s| <= C (1 + omega(0,T))^k omega^{1/p}
/// and the same for ||Phi||_{[s,t]}, maximised over partition-node pairs
/// (k = 1 for the Young solver, 3 for the rough solver).
struct MeasuredConstants {
  double C_Y = 0;
  double C_Phi = 0;
  double omega_total = 0;
  int power = 1;
};

/// Per-step record of the implicit Skorohod iteration.
struct StepContractionCert {
  Index begin = 0, end = 0;
  double x_sup = 0;
  double threshold = kUnbounded;
  double F_norm = 0;
  int iterations = 0;
  double residual = 0;
  std::vector<double> gaps;
};

struct ReflectedSolution {
  GridPathd Y;
  GridPathd Phi;
  std::vector<double> phi_tv;
  std::vector<Index> partition;
  MeasuredConstants constants;
  std::vector<StepContractionCert> certs;
};

/// Bucketed remainder profile against omega and its log-log slope.
struct DefectBucket {
  double omega_lo = 0, omega_hi = 0;
  double max_abs = 0;
  double omega_at_max = 0;
  Index count = 0;
};

struct DefectReport {
  std::vector<DefectBucket> buckets;
  double slope = 0;
  double intercept = 0;
  double expected_slope = 0;
  double within_step_max = 0;  // pairs inside one partition step
  double identity_max = 0;     // additivity / three-point identity residual
  Index pairs = 0;
};

/// Least-squares fit y = a + b x; returns {b, a, half-width of a 95% interval for b}.
struct LineFit {
  double slope = 0, intercept = 0, halfwidth = 0;
  std::vector<double> residuals;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Collect (omega, |r|) samples into log-spaced buckets and fit the maxima.
DefectReport bucket_profile(const std::vector<double>& omega, const std::vector<double>& value, int nbuckets = 16);

/// Constants over partition-node pairs for a solution and its control.
MeasuredConstants measure_constants(const GridPathd& Y, const std::vector<double>& phi_tv, const std::vector<Index>& nodes,
                                    const Controld& ctrl, double p, int power);

}  // namespace rrde
