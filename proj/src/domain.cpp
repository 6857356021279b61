#include "rrde/domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rrde/errors.hpp"
#include "rrde/rng.hpp"
#include "rrde/skorohod.hpp"

namespace rrde {

namespace {

// Enumerate index subsets of {0..m-1} of size <= kmax in order of size.
template <typename F>
bool for_subsets(Index m, Index kmax, F&& f) {
  std::vector<Index> idx;
  for (Index k = 0; k <= std::min(m, kmax); ++k) {
    idx.resize(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      if (f(idx)) return true;
      Index i = k - 1;
      while (i >= 0 && idx[i] == m - k + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (Index j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return false;
}

Matd stack(const std::vector<Vecd>& v, const std::vector<Index>& S) {
  Matd G(v.front().size(), static_cast<Index>(S.size()));
  for (std::size_t i = 0; i < S.size(); ++i) G.col(static_cast<Index>(i)) = v[S[i]];
  return G;
}

}  // namespace

Vecd project_onto_cone(const Vecd& v, const std::vector<Vecd>& gens) {
  if (gens.empty()) return Vecd::Zero(v.size());
  // Nonnegative least squares by support enumeration: the optimum is the
  // projection onto span(G_S) for some S with nonnegative weights whose
  // residual has nonpositive inner product with every generator.
  Vecd best = Vecd::Zero(v.size());
  const Index kmax = std::min<Index>(static_cast<Index>(gens.size()), v.size());
  for_subsets(static_cast<Index>(gens.size()), kmax, [&](const std::vector<Index>& S) {
    Vecd proj = Vecd::Zero(v.size());
    if (!S.empty()) {
      const Matd G = stack(gens, S);
      Eigen::ColPivHouseholderQR<Matd> qr(G);
      if (qr.rank() < static_cast<Index>(S.size())) return false;
      const Vecd lam = qr.solve(v);
      if (lam.minCoeff() < -1e-14) return false;
      proj = G * lam;
    }
    const Vecd r = v - proj;
    for (const auto& g : gens)
      if (g.dot(r) > 1e-12 * (1 + v.norm())) return false;
    best = proj;
    return true;
  });
  return best;
}

Vecd min_norm_in_hull(const std::vector<Vecd>& pts) {
  if (pts.empty()) throw DomainError("min_norm_in_hull: no points");
  const Index d = pts.front().size();
  Vecd best;
  double bestn = std::numeric_limits<double>::infinity();
  // Candidate: min-norm point of the affine hull of a subset, kept when its
  // barycentric weights are nonnegative. The global optimum is among them.
  for_subsets(static_cast<Index>(pts.size()), d + 1, [&](const std::vector<Index>& S) {
    if (S.empty()) return false;
    const Index k = static_cast<Index>(S.size());
    Matd K = Matd::Zero(k + 1, k + 1);
    Vecd rhs = Vecd::Zero(k + 1);
    for (Index i = 0; i < k; ++i) {
      for (Index j = 0; j < k; ++j) K(i, j) = pts[S[i]].dot(pts[S[j]]);
      K(i, k) = 1;
      K(k, i) = 1;
    }
    rhs(k) = 1;
    Eigen::FullPivLU<Matd> lu(K);
    if (!lu.isInvertible()) return false;
    const Vecd sol = lu.solve(rhs);
    if (sol.head(k).minCoeff() < -1e-12) return false;
    Vecd x = Vecd::Zero(d);
    for (Index i = 0; i < k; ++i) x += sol(i) * pts[S[i]];
    if (x.norm() < bestn) {
      bestn = x.norm();
      best = x;
    }
    return false;
  });
  return best;
}

Domain Domain::half_space(const Vecd& normal, double offset) {
  const double nn = normal.norm();
  if (!(nn > 0)) throw DomainError("half_space: zero normal");
  Domain D;
  D.shape_ = Shape::HalfSpace;
  D.dim_ = normal.size();
  D.N_ = (normal / nn).transpose();
  D.c_ = Vecd::Constant(1, offset / nn);
  D.certify();
  return D;
}

Domain Domain::orthant(Index d) {
  if (d < 1) throw DomainError("orthant: dimension must be >= 1");
  Domain D;
  D.shape_ = Shape::Orthant;
  D.dim_ = d;
  D.N_ = Matd::Identity(d, d);
  D.c_ = Vecd::Zero(d);
  D.certify();
  return D;
}

Domain Domain::ball(const Vecd& center, double radius) {
  if (!(radius > 0)) throw DomainError("ball: radius must be positive");
  Domain D;
  D.shape_ = Shape::Ball;
  D.dim_ = center.size();
  D.center_ = center;
  D.radius_ = radius;
  D.certify();
  return D;
}

Domain Domain::ball_exterior(const Vecd& center, double radius) {
  if (!(radius > 0)) throw DomainError("ball_exterior: radius must be positive");
  Domain D;
  D.shape_ = Shape::BallExterior;
  D.dim_ = center.size();
  D.center_ = center;
  D.radius_ = radius;
  D.certify();
  return D;
}

Domain Domain::polyhedron(const Matd& normals, const Vecd& offsets) {
  if (normals.rows() != offsets.size() || normals.rows() < 1)
    throw DomainError("polyhedron: need one offset per constraint");
  if (normals.rows() > 12) throw DomainError("polyhedron: at most 12 constraints are supported");
  Domain D;
  D.shape_ = Shape::Polyhedron;
  D.dim_ = normals.cols();
  D.N_ = normals;
  D.c_ = offsets;
  for (Index i = 0; i < normals.rows(); ++i) {
    const double nn = normals.row(i).norm();
    if (!(nn > 0)) throw DomainError("polyhedron: zero normal");
    D.N_.row(i) /= nn;
    D.c_(i) /= nn;
  }
  // Feasibility check: projecting any point must land in the set.
  const Vecd probe = D.project(Vecd::Zero(D.dim_));
  if (!D.contains(probe, 1e-9)) throw DomainError("polyhedron: constraints are infeasible");
  D.certify();
  return D;
}

std::string Domain::shape_name() const {
  switch (shape_) {
    case Shape::HalfSpace: return "halfspace";
    case Shape::Orthant: return "orthant";
    case Shape::Ball: return "ball";
    case Shape::Polyhedron: return "polyhedron";
    case Shape::BallExterior: return "ball-exterior";
  }
  return "unknown";
}

double Domain::scale() const {
  if (shape_ == Shape::Ball || shape_ == Shape::BallExterior) return std::max(1.0, radius_);
  return std::max(1.0, c_.size() ? c_.cwiseAbs().maxCoeff() : 0.0);
}

bool Domain::contains(const Vecd& x, double tol) const {
  if (x.size() != dim_) throw DomainError("Domain: point dimension mismatch");
  switch (shape_) {
    case Shape::Ball: return (x - center_).norm() <= radius_ + tol;
    case Shape::BallExterior: return (x - center_).norm() >= radius_ - tol;
    default: return ((N_ * x - c_).array() >= -tol).all();
  }
}

double Domain::boundary_distance(const Vecd& x) const {
  switch (shape_) {
    case Shape::Ball: return radius_ - (x - center_).norm();
    case Shape::BallExterior: return (x - center_).norm() - radius_;
    default: return (N_ * x - c_).minCoeff();
  }
}

std::vector<Vecd> Domain::normals_at(const Vecd& x, double tol) const {
  std::vector<Vecd> out;
  switch (shape_) {
    case Shape::Ball: {
      const Vecd r = x - center_;
      if (radius_ - r.norm() <= tol) out.push_back(-r / r.norm());
      break;
    }
    case Shape::BallExterior: {
      const Vecd r = x - center_;
      if (r.norm() - radius_ <= tol && r.norm() > 0) out.push_back(r / r.norm());
      break;
    }
    default: {
      const Vecd g = N_ * x - c_;
      for (Index i = 0; i < g.size(); ++i)
        if (g(i) <= tol) out.push_back(N_.row(i).transpose());
    }
  }
  return out;
}

Vecd Domain::project(const Vecd& x) const {
  if (x.size() != dim_) throw DomainError("Domain: point dimension mismatch");
  switch (shape_) {
    case Shape::HalfSpace: {
      const Vecd n = N_.row(0).transpose();
      const double g = c_(0) - n.dot(x);
      return g > 0 ? Vecd(x + g * n) : x;
    }
    case Shape::Orthant: return x.cwiseMax(0.0);
    case Shape::Ball: {
      const Vecd r = x - center_;
      const double rn = r.norm();
      return rn <= radius_ ? x : Vecd(center_ + (radius_ / rn) * r);
    }
    case Shape::BallExterior: {
      Vecd r = x - center_;
      double rn = r.norm();
      if (rn >= radius_) return x;
      if (rn == 0) {
        r = Vecd::Unit(dim_, 0);
        rn = 1;
      }
      return center_ + (radius_ / rn) * r;
    }
    case Shape::Polyhedron: return project_polyhedron(x, nullptr);
  }
  return x;
}

Vecd Domain::project_polyhedron(const Vecd& z, const std::vector<Index>* eq) const {
  const Index m = N_.rows();
  if (!eq && ((N_ * z - c_).array() >= 0).all()) return z;
  // KKT by active-set enumeration: x = z + A_T^T lam, A_T x = c_T, lam >= 0
  // off the forced equalities, x feasible.
  Vecd out;
  bool found = for_subsets(m, dim_, [&](const std::vector<Index>& T) {
    if (eq)
      for (Index e : *eq)
        if (std::find(T.begin(), T.end(), e) == T.end()) return false;
    if (T.empty()) return false;
    const Index k = static_cast<Index>(T.size());
    Matd A(k, dim_);
    Vecd c(k);
    for (Index i = 0; i < k; ++i) {
      A.row(i) = N_.row(T[i]);
      c(i) = c_(T[i]);
    }
    const Matd G = A * A.transpose();
    Eigen::FullPivLU<Matd> lu(G);
    if (!lu.isInvertible()) return false;
    const Vecd lam = lu.solve(c - A * z);
    for (Index i = 0; i < k; ++i) {
      const bool forced = eq && std::find(eq->begin(), eq->end(), T[i]) != eq->end();
      if (!forced && lam(i) < -1e-13) return false;
    }
    const Vecd x = z + A.transpose() * lam;
    if (((N_ * x - c_).array() < -1e-11 * scale()).any()) return false;
    out = x;
    return true;
  });
  if (!found) {
    if (eq) return Vecd();
    throw DomainError("polyhedron: projection failed");
  }
  return out;
}

void Domain::certify() {
  DomainConstants k;
  switch (shape_) {
    case Shape::HalfSpace:
      k.r0 = kUnbounded;
      k.beta = 1;
      k.delta = 1;
      k.l = N_.row(0).transpose();
      k.C_D = 1.0;
      k.C_D_provenance = "explicit: running-maximum reflection gives ||L(w)||_[s,t] <= ||w||_inf,[s,t]";
      break;
    case Shape::Orthant:
      k.r0 = kUnbounded;
      k.beta = std::sqrt(static_cast<double>(dim_));
      k.delta = 1;
      k.l = Vecd::Constant(dim_, 1.0 / std::sqrt(static_cast<double>(dim_)));
      k.C_D = static_cast<double>(dim_);
      k.C_D_provenance = "explicit: componentwise reflection, one unit per coordinate";
      break;
    case Shape::Ball:
      // Tangent exterior balls of radius r, and normals within distance r of
      // a boundary point turn by at most 60 degrees.
      k.r0 = radius_;
      k.beta = 2;
      k.delta = radius_;
      break;
    case Shape::BallExterior:
      k.r0 = radius_;
      k.beta = 2;
      k.delta = radius_;
      k.convex = false;
      k.condition_c = false;
      break;
    case Shape::Polyhedron: {
      k.r0 = kUnbounded;
      std::vector<Vecd> all;
      for (Index i = 0; i < N_.rows(); ++i) all.push_back(N_.row(i).transpose());
      const Vecd mn = min_norm_in_hull(all);
      if (mn.norm() > 1e-12) {
        // One direction serves the whole boundary, so any delta works.
        k.beta = 1.0 / mn.norm();
        k.delta = 1;
        k.l = mn / mn.norm();
      } else {
        // Bounded or two-sided: worst face cone, valid only as delta -> 0.
        double worst = 1;
        for_subsets(N_.rows(), dim_, [&](const std::vector<Index>& S) {
          if (S.empty()) return false;
          if (project_polyhedron(Vecd::Zero(dim_), &S).size() == 0) return false;
          const double h = min_norm_in_hull(std::vector<Vecd>(
              [&] { std::vector<Vecd> v; for (Index i : S) v.push_back(all[i]); return v; }())).norm();
          worst = std::max(worst, h > 1e-12 ? 1.0 / h : kUnbounded);
          return false;
        });
        k.beta = worst;
        k.delta = std::numeric_limits<double>::quiet_NaN();
        k.beta_certified = false;
      }
      break;
    }
  }
  consts_ = k;
  if (shape_ == Shape::Ball || shape_ == Shape::Polyhedron) {
    // Empirical (H1) certificate from seeded random walks started on the boundary.
    const int walks = 96, steps = 160;
    const double h = 0.05 * scale();
    double worst = 0;
    for (int wk = 0; wk < walks; ++wk) {
      const std::uint64_t key = stream_key(0x5eed0c0dULL, static_cast<std::uint64_t>(wk));
      Vecd g(dim_);
      for (Index i = 0; i < dim_; ++i) g(i) = counter_normal(key, static_cast<std::uint64_t>(i));
      const Vecd start = project(center_.size() ? Vecd(center_ + 4 * radius_ * g) : Vecd(4 * scale() * g));
      const std::vector<Vecd> nrm = normals_at(start, 1e-9);
      const Vecd outward = nrm.empty() ? Vecd::Zero(dim_) : Vecd(-nrm.front());
      const double bias = (wk % 3) * 0.5;
      Matd z(dim_, steps + 1);
      z.col(0) = start;
      for (int s = 0; s < steps; ++s) {
        for (Index i = 0; i < dim_; ++i)
          g(i) = counter_normal(key, static_cast<std::uint64_t>(dim_ + s * dim_ + i));
        z.col(s + 1) = z.col(s) + h * (g + bias * outward);
      }
      Matd xi, dphi;
      skorohod_map(*this, z, xi, dphi);
      const std::pair<int, int> windows[] = {{0, steps}, {0, steps / 2}, {steps / 2, steps}};
      for (const auto& [a, e] : windows) {
        double tv = 0, osc = 0;
        for (int s = a; s < e; ++s) tv += dphi.col(s).norm();
        for (int u = a; u <= e; ++u)
          for (int v = u + 1; v <= e; ++v) osc = std::max(osc, (z.col(v) - z.col(u)).norm());
        if (osc > 0) worst = std::max(worst, tv / osc);
      }
    }
    std::ostringstream os;
    os.precision(6);
    os << "empirical: 2 x max ratio ||L(w)||/||w||_inf over " << walks << " seeded walks of " << steps
       << " steps (max ratio " << worst << ")";
    consts_.C_D = 2 * std::max(worst, 1.0);
    consts_.C_D_empirical = true;
    consts_.C_D_provenance = os.str();
  }
}

DomainConstants domain_constants(const Domain& domain) { return domain.constants(); }

}  // namespace rrde
