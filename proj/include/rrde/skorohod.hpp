#pragma once

#include "rrde/domain.hpp"

namespace rrde {

/// (xi, phi) with xi = w + phi in the closure and the running total
/// variation of phi, tv[k] = ||phi||_{[0, t_k]}.
struct SkorohodSolution {
  GridPathd xi;
  GridPathd phi;
  std::vector<double> tv;
};

/// Solve the Skorohod problem for y0 + (w - w_0). Half-spaces and orthants use
/// the explicit running-maximum reflection; balls and polyhedra use the
/// projection recursion xi_{k+1} = Proj(xi_k + dw_k).
SkorohodSolution solve_skorohod(const GridPathd& w, const Domain& domain, const Vecd& y0);

/// Projection recursion on any convex catalogue domain (used as a cross-check
/// of the explicit formulas).
SkorohodSolution solve_skorohod_projection(const GridPathd& w, const Domain& domain, const Vecd& y0);

/// Core kernel on raw columns: z is the free path with z.col(0) in the
/// closure; writes xi and the local time increments dphi (d x (m-1)).
void skorohod_map(const Domain& domain, const Matd& z, Matd& xi, Matd& dphi, bool force_projection = false);

/// Max over steps of growth of phi away from the boundary and of the
/// deficit of dphi against the active normal cone.
double complementarity_residual(const GridPathd& xi, const GridPathd& phi, const Domain& domain);
double complementarity_residual(const SkorohodSolution& sol, const Domain& domain);

/// Right-hand side of the local-time bound
/// beta ({G(a)/delta + 1}^p omega + 1)(G(a) + 2) a with
/// G(a) = 4 {1 + beta e^{beta(2 delta + a)/(2 r0)}} e^{beta(2 delta + a)/(2 r0)}.
double local_time_bound(double beta, double delta, double r0, double sup_norm, double omega, double p);

/// Running total variation of a grid path.
std::vector<double> tv_profile(const GridPathd& phi);

}  // namespace rrde
