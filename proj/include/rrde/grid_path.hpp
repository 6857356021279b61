#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "rrde/errors.hpp"

namespace rrde {

using Index = Eigen::Index;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// A continuous path sampled on a strictly increasing time grid with
/// times[0] = 0. Column k of values() is the point at times()[k]; between
/// nodes the path is the piecewise-linear interpolant.
template <typename Scalar>
class GridPath {
 public:
  GridPath(std::vector<Scalar> times, Mat<Scalar> values)
      : times_(std::move(times)), values_(std::move(values)) {
    if (times_.size() < 2) throw DomainError("GridPath: need at least two nodes");
    if (static_cast<Index>(times_.size()) != values_.cols())
      throw DomainError("GridPath: times and values differ in length");
    if (times_.front() != Scalar(0)) throw DomainError("GridPath: times must start at 0");
    for (std::size_t k = 1; k < times_.size(); ++k)
      if (!(times_[k] > times_[k - 1])) throw DomainError("GridPath: times must be strictly increasing");
  }

  Index size() const { return values_.cols(); }
  Index dim() const { return values_.rows(); }
  Scalar horizon() const { return times_.back(); }
  Scalar time(Index k) const { return times_[static_cast<std::size_t>(k)]; }
  const std::vector<Scalar>& times() const { return times_; }
  const Mat<Scalar>& values() const { return values_; }
  auto point(Index k) const { return values_.col(k); }

  /// Grid index of time t. Times within 1e-12 * horizon of a node snap to it.
  Index index_of(Scalar t) const {
    const Scalar tol = Scalar(1e-12) * std::max(Scalar(1), horizon());
    auto it = std::lower_bound(times_.begin(), times_.end(), t - tol);
    if (it == times_.end() || std::abs(*it - t) > tol)
      throw DomainError("GridPath: time " + std::to_string(static_cast<double>(t)) + " is not a grid node");
    return static_cast<Index>(it - times_.begin());
  }

  /// Piecewise-linear evaluation at an arbitrary t in [0, T].
  Vec<Scalar> operator()(Scalar t) const {
    if (t < Scalar(0) || t > horizon()) throw DomainError("GridPath: evaluation outside [0, T]");
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.end()) return values_.col(size() - 1);
    const Index k = static_cast<Index>(it - times_.begin()) - 1;
    const Scalar lam = (t - times_[k]) / (times_[k + 1] - times_[k]);
    return (Scalar(1) - lam) * values_.col(k) + lam * values_.col(k + 1);
  }

  /// Sub-path on nodes a..b, re-based so that its first time is 0.
  GridPath segment(Index a, Index b) const {
    if (a < 0 || b >= size() || b <= a) throw DomainError("GridPath: bad segment bounds");
    std::vector<Scalar> t(static_cast<std::size_t>(b - a + 1));
    for (Index k = a; k <= b; ++k) t[k - a] = times_[k] - times_[a];
    return GridPath(std::move(t), values_.middleCols(a, b - a + 1));
  }

  /// Path restricted to a strictly increasing subset of node indices starting at 0.
  GridPath restricted(const std::vector<Index>& nodes) const {
    std::vector<Scalar> t;
    Mat<Scalar> v(dim(), static_cast<Index>(nodes.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      t.push_back(times_.at(static_cast<std::size_t>(nodes[i])));
      v.col(static_cast<Index>(i)) = values_.col(nodes[i]);
    }
    return GridPath(std::move(t), std::move(v));
  }

  bool same_grid(const GridPath& other) const { return times_ == other.times_; }

 private:
  std::vector<Scalar> times_;
  Mat<Scalar> values_;
};

using GridPathd = GridPath<double>;
using Vecd = Vec<double>;
using Matd = Mat<double>;

/// Oscillation max_{a <= u <= v <= b} |w_u - w_v| over grid nodes a..b.
template <typename Scalar>
Scalar sup_norm_nodes(const GridPath<Scalar>& w, Index a, Index b) {
  if (a > b || a < 0 || b >= w.size()) throw DomainError("sup_norm: need s <= t on the grid");
  Scalar best = 0;
  for (Index u = a; u <= b; ++u)
    for (Index v = u + 1; v <= b; ++v) best = std::max(best, (w.point(v) - w.point(u)).norm());
  return best;
}

template <typename Scalar>
Scalar sup_norm(const GridPath<Scalar>& w, Scalar s, Scalar t) {
  if (s > t) throw DomainError("sup_norm: s > t");
  return sup_norm_nodes(w, w.index_of(s), w.index_of(t));
}

/// omega(a, j) = sup over grid sub-partitions of [t_a, t_j] of sum |dw|^p,
/// for every j >= a (entry j - a). Exact dynamic programme over grid nodes.
template <typename Scalar>
std::vector<Scalar> pvar_row(const GridPath<Scalar>& w, Scalar p, Index a) {
  if (p < Scalar(1)) throw DomainError("pvar_norm: p < 1");
  const Index n = w.size();
  if (a < 0 || a >= n) throw DomainError("pvar_norm: start outside grid");
  std::vector<Scalar> best(static_cast<std::size_t>(n - a), Scalar(0));
  const bool linear = (p == Scalar(1));
  for (Index j = a + 1; j < n; ++j) {
    Scalar m = 0;
    for (Index i = a; i < j; ++i) {
      const Scalar inc = (w.point(j) - w.point(i)).norm();
      const Scalar term = linear ? inc : std::pow(inc, p);
      m = std::max(m, best[i - a] + term);
    }
    best[j - a] = m;
  }
  return best;
}

template <typename Scalar>
Scalar pvar_norm_nodes(const GridPath<Scalar>& w, Scalar p, Index a, Index b) {
  if (a > b) throw DomainError("pvar_norm: s > t");
  if (p < Scalar(1)) throw DomainError("pvar_norm: p < 1");
  if (a == b) return Scalar(0);
  // Row restricted to [a, b] only needs nodes up to b.
  std::vector<Scalar> best(static_cast<std::size_t>(b - a + 1), Scalar(0));
  for (Index j = a + 1; j <= b; ++j) {
    Scalar m = 0;
    for (Index i = a; i < j; ++i) {
      const Scalar inc = (w.point(j) - w.point(i)).norm();
      m = std::max(m, best[i - a] + (p == Scalar(1) ? inc : std::pow(inc, p)));
    }
    best[j - a] = m;
  }
  return std::pow(best.back(), Scalar(1) / p);
}

/// p-variation norm of w over [s, t], sup taken over partitions on grid nodes.
template <typename Scalar>
Scalar pvar_norm(const GridPath<Scalar>& w, Scalar p, Scalar s, Scalar t) {
  if (p < Scalar(1)) throw DomainError("pvar_norm: p < 1");
  if (s > t) throw DomainError("pvar_norm: s > t");
  return pvar_norm_nodes(w, p, w.index_of(s), w.index_of(t));
}

/// Total variation sum_k |w_{k+1} - w_k| for the piecewise-linear path,
/// accumulated from node 0 (entry k is the variation over [t_0, t_k]).
template <typename Scalar>
std::vector<Scalar> total_variation_profile(const GridPath<Scalar>& w) {
  std::vector<Scalar> tv(static_cast<std::size_t>(w.size()), Scalar(0));
  for (Index k = 1; k < w.size(); ++k) tv[k] = tv[k - 1] + (w.point(k) - w.point(k - 1)).norm();
  return tv;
}

}  // namespace rrde
