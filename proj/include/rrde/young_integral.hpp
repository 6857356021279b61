#pragma once

#include "rrde/grid_path.hpp"

namespace rrde {

/// t -> int_0^t f dx on the common grid of f and x.
///
/// Each cell contributes the left-point term f_k dx_k plus the compensation
/// (f_{k+1} - f_k) dx_k / 2, i.e. the exact integral of the piecewise-linear
/// interpolants against each other. Refining means passing finer grids; there
/// is no internal refinement. The integrand is either scalar (dim 1, output
/// has the driver's dimension) or has the driver's dimension (componentwise).
template <typename Scalar>
GridPath<Scalar> young_integral(const GridPath<Scalar>& f, const GridPath<Scalar>& x, Scalar p, Scalar q) {
  if (!(p >= Scalar(1) && q >= Scalar(1))) throw RegimeError("young_integral: exponents must be >= 1");
  if (!(Scalar(1) / p + Scalar(1) / q > Scalar(1))) throw RegimeError("young_integral: need 1/p + 1/q > 1");
  if (!f.same_grid(x)) throw DomainError("young_integral: integrand and driver on different grids");
  if (f.dim() != 1 && f.dim() != x.dim()) throw DomainError("young_integral: integrand dimension must be 1 or match the driver");

  const Index N = x.size();
  Mat<Scalar> out = Mat<Scalar>::Zero(x.dim(), N);
  for (Index k = 0; k + 1 < N; ++k) {
    const auto dx = x.point(k + 1) - x.point(k);
    if (f.dim() == 1) {
      const Scalar fm = Scalar(0.5) * (f.values()(0, k) + f.values()(0, k + 1));
      out.col(k + 1) = out.col(k) + fm * dx;
    } else {
      out.col(k + 1) = out.col(k) + (Scalar(0.5) * (f.point(k) + f.point(k + 1))).cwiseProduct(dx);
    }
  }
  return GridPath<Scalar>(x.times(), std::move(out));
}

}  // namespace rrde
