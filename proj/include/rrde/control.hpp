#pragma once

#include <memory>
#include <vector>

#include "rrde/grid_path.hpp"

namespace rrde {

/// omega(s, t) on a fixed time grid. Two kinds: Hölder-type C * (t - s), and
/// the p-variation control of a path, ||w||^p_{p-var,[s,t]}.
template <typename Scalar>
class ControlFunction {
 public:
  enum class Kind { Holder, PVariation };

  static ControlFunction holder(Scalar C, Scalar p, std::vector<Scalar> times) {
    if (C < Scalar(0)) throw DomainError("ControlFunction: negative Hölder constant");
    ControlFunction f;
    f.kind_ = Kind::Holder;
    f.C_ = C;
    f.p_ = p;
    f.times_ = std::make_shared<const std::vector<Scalar>>(std::move(times));
    return f;
  }

  static ControlFunction pvariation(GridPath<Scalar> path, Scalar p) {
    if (p < Scalar(1)) throw DomainError("ControlFunction: p < 1");
    ControlFunction f;
    f.kind_ = Kind::PVariation;
    f.p_ = p;
    f.times_ = std::make_shared<const std::vector<Scalar>>(path.times());
    f.path_ = std::make_shared<const GridPath<Scalar>>(std::move(path));
    return f;
  }

  Kind kind() const { return kind_; }
  Scalar p() const { return p_; }
  Scalar constant() const { return C_; }
  const std::vector<Scalar>& times() const { return *times_; }
  Index size() const { return static_cast<Index>(times_->size()); }
  Scalar horizon() const { return times_->back(); }

  /// omega between grid nodes a <= b.
  Scalar nodes(Index a, Index b) const {
    if (a > b) throw DomainError("control_eval: s > t");
    if (a == b) return Scalar(0);
    if (kind_ == Kind::Holder) return C_ * ((*times_)[b] - (*times_)[a]);
    return pvar_row(path_->segment(a, b), p_, 0).back();
  }

  /// omega(t_a, t_j) for all j >= a (entry j - a).
  std::vector<Scalar> row(Index a) const {
    if (kind_ == Kind::Holder) {
      std::vector<Scalar> r(static_cast<std::size_t>(size() - a));
      for (Index j = a; j < size(); ++j) r[j - a] = C_ * ((*times_)[j] - (*times_)[a]);
      return r;
    }
    return pvar_row(*path_, p_, a);
  }

  /// omega(s, t). Hölder kind accepts any s <= t in [0, T]; the p-variation
  /// kind needs grid times.
  Scalar operator()(Scalar s, Scalar t) const {
    if (s > t) throw DomainError("control_eval: s > t");
    if (kind_ == Kind::Holder) return C_ * (t - s);
    return nodes(path_->index_of(s), path_->index_of(t));
  }

 private:
  ControlFunction() = default;
  Kind kind_ = Kind::Holder;
  Scalar C_ = 0;
  Scalar p_ = 1;
  std::shared_ptr<const std::vector<Scalar>> times_;
  std::shared_ptr<const GridPath<Scalar>> path_;
};

using Controld = ControlFunction<double>;

template <typename Scalar>
Scalar control_eval(const ControlFunction<Scalar>& ctrl, Scalar s, Scalar t) {
  return ctrl(s, t);
}

}  // namespace rrde
