#include "rrde/skorohod.hpp"

#include <cmath>

#include "rrde/errors.hpp"

namespace rrde {

void skorohod_map(const Domain& D, const Matd& z, Matd& xi, Matd& dphi, bool force_projection) {
  if (!D.convex()) throw UnsupportedDomainError("skorohod: domain " + D.shape_name() + " is not convex");
  if (z.rows() != D.dim()) throw DomainError("skorohod: path dimension differs from the domain's");
  const Index d = z.rows(), m = z.cols();
  xi.resize(d, m);
  dphi.setZero(d, std::max<Index>(m - 1, 0));
  xi.col(0) = z.col(0);
  if (!force_projection && D.shape() == Domain::Shape::HalfSpace) {
    const Vecd n = D.normals().row(0).transpose();
    const double c = D.offsets()(0);
    double M = 0;
    for (Index k = 1; k < m; ++k) {
      const double g = c - n.dot(z.col(k));
      if (g > M) {
        dphi.col(k - 1) = (g - M) * n;
        M = g;
      }
      xi.col(k) = z.col(k) + M * n;
    }
    return;
  }
  if (!force_projection && D.shape() == Domain::Shape::Orthant) {
    Vecd M = Vecd::Zero(d);
    for (Index k = 1; k < m; ++k) {
      for (Index i = 0; i < d; ++i) {
        const double g = -z(i, k);
        if (g > M(i)) {
          dphi(i, k - 1) = g - M(i);
          M(i) = g;
        }
      }
      xi.col(k) = z.col(k) + M;
    }
    return;
  }
  Vecd q(d);
  for (Index k = 1; k < m; ++k) {
    q = xi.col(k - 1) + (z.col(k) - z.col(k - 1));
    xi.col(k) = D.project(q);
    dphi.col(k - 1) = xi.col(k) - q;
  }
}

namespace {

SkorohodSolution assemble(const GridPathd& w, const Domain& D, const Vecd& y0, bool force) {
  if (w.dim() != D.dim() || y0.size() != D.dim()) throw DomainError("solve_skorohod: dimension mismatch");
  if (!D.convex()) throw UnsupportedDomainError("solve_skorohod: domain " + D.shape_name() + " is not convex");
  if (!D.contains(y0, 1e-10 * D.scale())) throw DomainError("solve_skorohod: start point outside the closure");
  Matd z = w.values();
  const Vecd w0 = w.point(0);
  for (Index k = 0; k < z.cols(); ++k) z.col(k) += y0 - w0;
  Matd xi, dphi;
  skorohod_map(D, z, xi, dphi, force);
  Matd phi = Matd::Zero(z.rows(), z.cols());
  std::vector<double> tv(static_cast<std::size_t>(z.cols()), 0.0);
  for (Index k = 1; k < z.cols(); ++k) {
    phi.col(k) = phi.col(k - 1) + dphi.col(k - 1);
    tv[k] = tv[k - 1] + dphi.col(k - 1).norm();
  }
  return SkorohodSolution{GridPathd(w.times(), std::move(xi)), GridPathd(w.times(), std::move(phi)), std::move(tv)};
}

}  // namespace

SkorohodSolution solve_skorohod(const GridPathd& w, const Domain& D, const Vecd& y0) {
  return assemble(w, D, y0, false);
}

SkorohodSolution solve_skorohod_projection(const GridPathd& w, const Domain& D, const Vecd& y0) {
  return assemble(w, D, y0, true);
}

double complementarity_residual(const GridPathd& xi, const GridPathd& phi, const Domain& D) {
  if (!xi.same_grid(phi) || xi.dim() != D.dim() || phi.dim() != D.dim())
    throw DomainError("complementarity_residual: inconsistent solution");
  double xs = 1, ps = 0;
  for (Index k = 0; k < xi.size(); ++k) {
    xs = std::max(xs, xi.point(k).cwiseAbs().maxCoeff());
    ps = std::max(ps, phi.point(k).norm());
  }
  const double tol = kActiveTol * std::max(xs, D.scale());
  const double floor = 1e-9 * (1 + ps);
  double res = 0;
  for (Index k = 0; k + 1 < xi.size(); ++k) {
    const Vecd dp = phi.point(k + 1) - phi.point(k);
    const double a = dp.norm();
    if (a == 0) continue;
    const Vecd x = xi.point(k + 1);
    if (D.boundary_distance(x) > tol) {
      res = std::max(res, a);
      continue;
    }
    if (a < floor) continue;
    const Vecd pc = project_onto_cone(dp, D.normals_at(x, tol));
    res = std::max(res, 1 - pc.norm() / a);
  }
  return res;
}

double complementarity_residual(const SkorohodSolution& sol, const Domain& D) {
  return complementarity_residual(sol.xi, sol.phi, D);
}

double local_time_bound(double beta, double delta, double r0, double a, double omega, double p) {
  if (!(r0 > 0)) throw DomainError("local_time_bound: r0 must be positive");
  if (!(delta > 0)) throw DomainError("local_time_bound: delta must be positive");
  if (!(beta >= 1)) throw DomainError("local_time_bound: beta must be >= 1");
  if (!(p >= 1) || a < 0 || omega < 0) throw DomainError("local_time_bound: arguments out of range");
  const double e = std::isinf(r0) ? 1.0 : std::exp(beta * (2 * delta + a) / (2 * r0));
  const double G = 4 * (1 + beta * e) * e;
  return beta * (std::pow(G / delta + 1, p) * omega + 1) * (G + 2) * a;
}

std::vector<double> tv_profile(const GridPathd& phi) { return total_variation_profile(phi); }

}  // namespace rrde
