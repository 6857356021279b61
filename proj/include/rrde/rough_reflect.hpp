#pragma once

#include <optional>

#include "rrde/rough_path.hpp"
#include "rrde/skorohod.hpp"
#include "rrde/solution.hpp"
#include "rrde/vector_field.hpp"

namespace rrde {

struct ImplicitOptions {
  double tol = 1e-10;  // relative to max(1, |base|, domain scale)
  int max_iter = 200;
};

struct ImplicitStep {
  Matd Y;    // d x m, column 0 is the base point
  Matd Phi;  // d x m, relative to the step start
  StepContractionCert cert;
};

/// One step of the implicit Skorohod equation
///   Y_t = y + sigma(y) x_{0,t} + F(sigma(y) X2_{0,t}) + F(int_0^t Phi (x) dx) + Phi_t,
/// (Y, Phi) solving the Skorohod problem, by fixed-point iteration from
/// Phi = 0. xSeg holds the driver on the step's grid nodes and X2seg[j] the
/// second level from the step start to node j. The cross integral is the
/// exact integral of the piecewise-linear interpolants.
ImplicitStep solve_implicit_step(const Vecd& base, const GridPathd& xSeg, const std::vector<Matd>& X2seg,
                                 const VectorField& sigma, const Domain& domain, const ImplicitOptions& opt = {});

/// 1/4 min(1, (2 C_D ||Dsigma||)^{-p}).
double default_epsilon_rough(const VectorField& sigma, const Domain& domain, double p);

/// Adaptive partition from the control (X's certificate, else
/// C(X)(t - s)), one implicit step per interval, intervals halved while the
/// contraction threshold (10 C_D ||F||)^{-1} is violated.
ReflectedSolution solve_reflected_rough(const RoughPathd& X, const VectorField& sigma, const Domain& domain,
                                        const Vecd& y0, double p, double epsilon = 0, const ImplicitOptions& opt = {});

/// Same on a given partition (still split where the threshold demands).
ReflectedSolution solve_reflected_rough_on(const RoughPathd& X, const VectorField& sigma, const Domain& domain,
                                           const Vecd& y0, double p, const std::vector<Index>& partition,
                                           const Controld& ctrl, const ImplicitOptions& opt = {},
                                           bool measure = true);

/// Rough path over R^{n+d} for z = (x, Phi). On each grid cell the local
/// second level is [[X2, dx (x) dPhi / 2], [dPhi (x) dx / 2, dPhi (x) dPhi / 2]],
/// composed by Chen, so the mixed blocks are the exact integrals of the
/// piecewise-linear interpolants.
class HatRoughPath {
 public:
  HatRoughPath(const RoughPathd& X, const GridPathd& Phi);
  const RoughPathd& path() const { return hat_; }
  Index n() const { return n_; }
  Index d() const { return d_; }
  Matd X2(Index a, Index b) const;         // n x n
  Matd x_dphi(Index a, Index b) const;     // n x d, int X1 (x) dPhi
  Matd phi_dx(Index a, Index b) const;     // d x n, int dPhi (x) dx
  Matd phi_dphi(Index a, Index b) const;   // d x d
  /// |int X1 (x) dPhi + (int dPhi (x) dX)^T - X1 (x) dPhi|.
  double ibp_residual(Index a, Index b) const;

 private:
  RoughPathd hat_;
  Index n_, d_;
};

HatRoughPath hat_rough_path(const RoughPathd& X, const GridPathd& Phi);

/// J_s(t) = I_s(t) - F_s(sigma(Y_s) X2_{s,t}) - F_s(int_s^t (Phi - Phi_s) (x) dx).
class RemainderCalculus {
 public:
  RemainderCalculus(const GridPathd& Y, const GridPathd& Phi, const RoughPathd& X, const VectorField& sigma);
  Vecd I(Index s, Index t) const;
  Vecd J(Index s, Index t) const;
  Matd K(Index s, Index t) const;  // d x n
  /// Right side of J_s(u) - J_s(t) - J_t(u) as an explicit expansion.
  Vecd three_point(Index s, Index t, Index u) const;
  /// First bracket sigma_t - sigma_s - Dsigma_s(Y_t - Y_s) of the expansion.
  Matd taylor_gap(Index s, Index t) const;

 private:
  GridPathd Y_;
  GridPathd Phi_;
  RoughPathd X_;
  std::vector<Matd> sig_;
  std::vector<std::vector<Matd>> ds_;
  Matd P_;  // prefix sums of the trapezoid cells of Phi (x) dx, row-major d*n per node
};

/// J at (partition node, later grid node) pairs, as for I; omega_cap as there.
DefectReport defect_profile_J(const ReflectedSolution& sol, const RoughPathd& X, const VectorField& sigma,
                              const Controld& ctrl, double p, double gamma = 3, double omega_cap = kUnbounded);

/// Second level of the solution over R^d, stored as A_t = Y2_{0,t}; on each
/// cell the local term is dY (x) dY / 2 + Antisym(hat_sigma S hat_sigma^T)
/// with hat_sigma = [sigma(Y_k) | I] and S the cell's hat second level.
RoughPathd solution_level2(const ReflectedSolution& sol, const HatRoughPath& Xhat, const VectorField& sigma);

struct DavieVerdict {
  bool pass = false;
  double max_ratio = 0;  // max |J| / (Cbudget omega^{gamma/p})
  double max_abs = 0;
  double complementarity = 0;
  Index pairs = 0;
};

/// Davie-sense check |J_s(t)| <= Cbudget omega(s,t)^{gamma/p} on grid pairs
/// (all nodes, or the given subset) plus complementarity of (Y, Phi).
DavieVerdict verify_davie_solution(const GridPathd& Y, const GridPathd& Phi, const RoughPathd& X,
                                   const VectorField& sigma, const Controld& ctrl, double p, double gamma,
                                   double Cbudget, const Domain& domain, const std::vector<Index>& nodes = {});

}  // namespace rrde
