#pragma once

#include <optional>

#include "rrde/control.hpp"

namespace rrde {

/// Level-2 rough path on a grid. The first level is the base path x
/// (X1_{s,t} = x_t - x_s); the second is stored as A_t = X2_{0,t}, one
/// row-major n*n column per node, and
///   X2_{s,t} = A_t - A_s - (x_s - x_0) (x) (x_t - x_s),
/// which satisfies Chen's identity for any A. Index convention:
/// X2^{ij}_{s,t} = int_s^t (x^i_u - x^i_s) dx^j_u.
template <typename Scalar>
class RoughPath {
 public:
  RoughPath(std::vector<Scalar> times, Mat<Scalar> x, Mat<Scalar> A, Scalar p,
            std::optional<ControlFunction<Scalar>> certificate = std::nullopt)
      : base_(std::move(times), std::move(x)), A_(std::move(A)), p_(p), cert_(std::move(certificate)) {
    const Index n = base_.dim();
    if (A_.rows() != n * n || A_.cols() != base_.size())
      throw DomainError("RoughPath: second level must be (n*n) x nodes");
    if (A_.col(0).cwiseAbs().maxCoeff() != Scalar(0)) throw DomainError("RoughPath: A_0 must vanish");
  }

  Index dim() const { return base_.dim(); }
  Index size() const { return base_.size(); }
  Scalar p() const { return p_; }
  Scalar horizon() const { return base_.horizon(); }
  Scalar time(Index k) const { return base_.time(k); }
  const std::vector<Scalar>& times() const { return base_.times(); }
  const GridPath<Scalar>& base() const { return base_; }
  const Mat<Scalar>& A() const { return A_; }
  const std::optional<ControlFunction<Scalar>>& certificate() const { return cert_; }
  Index index_of(Scalar t) const { return base_.index_of(t); }

  Vec<Scalar> X1(Index a, Index b) const { return base_.point(b) - base_.point(a); }

  Mat<Scalar> X2(Index a, Index b) const {
    const Index n = dim();
    Mat<Scalar> out(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) out(i, j) = A_(i * n + j, b) - A_(i * n + j, a);
    out.noalias() -= (base_.point(a) - base_.point(0)) * (base_.point(b) - base_.point(a)).transpose();
    return out;
  }

  /// Same rough path seen on a subset of nodes (must start at node 0).
  RoughPath restricted(const std::vector<Index>& nodes) const {
    if (nodes.empty() || nodes.front() != 0) throw DomainError("RoughPath: restriction must keep node 0");
    GridPath<Scalar> b = base_.restricted(nodes);
    Mat<Scalar> A(A_.rows(), static_cast<Index>(nodes.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i) A.col(static_cast<Index>(i)) = A_.col(nodes[i]);
    return RoughPath(b.times(), b.values(), std::move(A), p_);
  }

  RoughPath with_certificate(ControlFunction<Scalar> ctrl) const {
    return RoughPath(base_.times(), base_.values(), A_, p_, std::move(ctrl));
  }

 private:
  GridPath<Scalar> base_;
  Mat<Scalar> A_;
  Scalar p_;
  std::optional<ControlFunction<Scalar>> cert_;
};

using RoughPathd = RoughPath<double>;

/// Exact iterated integrals of the piecewise-linear interpolant of path.
template <typename Scalar>
RoughPath<Scalar> lift_piecewise_linear(const GridPath<Scalar>& path, Scalar p) {
  if (!(p >= Scalar(2) && p < Scalar(3))) throw DomainError("lift_piecewise_linear: p must lie in [2, 3)");
  const Index n = path.dim(), N = path.size();
  Mat<Scalar> A = Mat<Scalar>::Zero(n * n, N);
  for (Index k = 0; k + 1 < N; ++k) {
    const Vec<Scalar> off = path.point(k) - path.point(0);
    const Vec<Scalar> d = path.point(k + 1) - path.point(k);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        A(i * n + j, k + 1) = A(i * n + j, k) + off(i) * d(j) + Scalar(0.5) * d(i) * d(j);
  }
  return RoughPath<Scalar>(path.times(), path.values(), std::move(A), p);
}

/// Characteristic size used to scale identity tolerances.
template <typename Scalar>
Scalar rough_scale(const RoughPath<Scalar>& rp) {
  const Vec<Scalar> x0 = rp.base().point(0);
  Scalar m = 1;
  for (Index k = 0; k < rp.size(); ++k) m = std::max(m, (rp.base().point(k) - x0).squaredNorm());
  return std::max(m, rp.A().cwiseAbs().maxCoeff());
}

template <typename Scalar>
Scalar chen_defect_nodes(const RoughPath<Scalar>& rp, Index a, Index b, Index c) {
  if (!(a <= b && b <= c) || a < 0 || c >= rp.size()) throw DomainError("chen_defect: need s <= t <= u on the grid");
  const Mat<Scalar> r = rp.X2(a, c) - rp.X2(a, b) - rp.X2(b, c) - rp.X1(a, b) * rp.X1(b, c).transpose();
  return r.cwiseAbs().maxCoeff();
}

template <typename Scalar>
Scalar chen_defect(const RoughPath<Scalar>& rp, Scalar s, Scalar t, Scalar u) {
  if (!(s <= t && t <= u)) throw DomainError("chen_defect: need s <= t <= u");
  return chen_defect_nodes(rp, rp.index_of(s), rp.index_of(t), rp.index_of(u));
}

/// |Sym(X2_{s,t}) - X1 (x) X1 / 2| in max-entry norm.
template <typename Scalar>
Scalar geometric_defect_nodes(const RoughPath<Scalar>& rp, Index a, Index b) {
  const Mat<Scalar> X2 = rp.X2(a, b);
  const Vec<Scalar> X1 = rp.X1(a, b);
  const Mat<Scalar> r = Scalar(0.5) * (X2 + X2.transpose()) - Scalar(0.5) * X1 * X1.transpose();
  return r.cwiseAbs().maxCoeff();
}

namespace detail {

// (t_b - t_a)^{-e} for all pairs; uniform grids reuse a per-lag table.
template <typename Scalar>
class InvPowTable {
 public:
  InvPowTable(const std::vector<Scalar>& t, Scalar e) : t_(t), e_(e) {
    const std::size_t N = t.size();
    const Scalar h = t.back() / Scalar(N - 1);
    uniform_ = true;
    for (std::size_t k = 0; k < N && uniform_; ++k)
      uniform_ = std::abs(t[k] - h * Scalar(k)) <= Scalar(1e-12) * std::max(Scalar(1), t.back());
    if (uniform_) {
      lag_.assign(N, Scalar(0));
      for (std::size_t k = 1; k < N; ++k) lag_[k] = std::pow(h * Scalar(k), -e);
    }
  }
  Scalar operator()(Index a, Index b) const {
    return uniform_ ? lag_[static_cast<std::size_t>(b - a)] : std::pow(t_[b] - t_[a], -e_);
  }

 private:
  const std::vector<Scalar>& t_;
  Scalar e_;
  bool uniform_ = false;
  std::vector<Scalar> lag_;
};

// sup over grid pairs of |X^i - Y^i| / (t - s)^{i/p} for i = 1, 2; Y may be null (zero path).
template <typename Scalar>
std::pair<Scalar, Scalar> dp_levels(const RoughPath<Scalar>& X, const RoughPath<Scalar>* Y) {
  const Index n = X.dim(), N = X.size();
  const Scalar p = X.p();
  InvPowTable<Scalar> w1(X.times(), Scalar(1) / p), w2(X.times(), Scalar(2) / p);
  const Mat<Scalar>& x = X.base().values();
  const Mat<Scalar>& A = X.A();
  const Mat<Scalar>* y = Y ? &Y->base().values() : nullptr;
  const Mat<Scalar>* B = Y ? &Y->A() : nullptr;
  Scalar s1 = 0, s2 = 0;
  Vec<Scalar> ox(n), oy(n), dx(n), dy(n);
  for (Index a = 0; a + 1 < N; ++a) {
    ox = x.col(a) - x.col(0);
    if (y) oy = y->col(a) - y->col(0);
    for (Index b = a + 1; b < N; ++b) {
      dx = x.col(b) - x.col(a);
      Scalar l1, l2 = 0;
      if (y) {
        dy = y->col(b) - y->col(a);
        l1 = (dx - dy).norm();
        for (Index i = 0; i < n; ++i)
          for (Index j = 0; j < n; ++j) {
            const Index r = i * n + j;
            const Scalar vx = A(r, b) - A(r, a) - ox(i) * dx(j);
            const Scalar vy = (*B)(r, b) - (*B)(r, a) - oy(i) * dy(j);
            l2 = std::max(l2, std::abs(vx - vy));
          }
      } else {
        l1 = dx.norm();
        for (Index i = 0; i < n; ++i)
          for (Index j = 0; j < n; ++j) {
            const Index r = i * n + j;
            l2 = std::max(l2, std::abs(A(r, b) - A(r, a) - ox(i) * dx(j)));
          }
      }
      s1 = std::max(s1, l1 * w1(a, b));
      s2 = std::max(s2, l2 * w2(a, b));
    }
  }
  return {s1, s2};
}

}  // namespace detail

/// d_p(X, Y) = sum_{i=1,2} sup_{s<t} |X^i_{s,t} - Y^i_{s,t}| / (t-s)^{i/p}
/// over grid pairs.
template <typename Scalar>
Scalar dp_distance(const RoughPath<Scalar>& X, const RoughPath<Scalar>& Y) {
  if (X.times() != Y.times()) throw DomainError("dp_distance: rough paths on different grids");
  if (X.dim() != Y.dim()) throw DomainError("dp_distance: dimension mismatch");
  if (X.p() != Y.p()) throw DomainError("dp_distance: different p");
  const auto [a, b] = detail::dp_levels(X, &Y);
  return a + b;
}

/// d_p(0, X).
template <typename Scalar>
Scalar dp_norm(const RoughPath<Scalar>& X) {
  const auto [a, b] = detail::dp_levels<Scalar>(X, nullptr);
  return a + b;
}

/// C(X) = d_p(0,X)^p + d_p(0,X)^{p/2}; omega = C(X)(t - s) dominates both levels.
template <typename Scalar>
Scalar rough_constant(const RoughPath<Scalar>& X) {
  const Scalar d = dp_norm(X);
  return std::pow(d, X.p()) + std::pow(d, X.p() / Scalar(2));
}

template <typename Scalar>
ControlFunction<Scalar> rough_control(const RoughPath<Scalar>& X) {
  return ControlFunction<Scalar>::holder(rough_constant(X), X.p(), X.times());
}

/// max over grid pairs of |X^i_{s,t}| - omega(s,t)^{i/p}; <= 0 means the
/// certificate holds.
template <typename Scalar>
Scalar certificate_excess(const RoughPath<Scalar>& X, const ControlFunction<Scalar>& ctrl) {
  Scalar worst = -std::numeric_limits<Scalar>::infinity();
  for (Index a = 0; a + 1 < X.size(); ++a) {
    const std::vector<Scalar> r = ctrl.row(a);
    for (Index b = a + 1; b < X.size(); ++b) {
      const Scalar w = r[b - a];
      worst = std::max(worst, X.X1(a, b).norm() - std::pow(w, Scalar(1) / X.p()));
      worst = std::max(worst, X.X2(a, b).cwiseAbs().maxCoeff() - std::pow(w, Scalar(2) / X.p()));
    }
  }
  return worst;
}

}  // namespace rrde
