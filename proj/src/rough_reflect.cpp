#include "rrde/rough_reflect.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "rrde/errors.hpp"
#include "rrde/rng.hpp"
#include "rrde/young_reflect.hpp"

namespace rrde {

namespace {

double oscillation(const Matd& x) {
  const Index m = x.cols();
  if (m > 1024) {
    // Cheap upper bound for long steps.
    double r = 0;
    for (Index j = 1; j < m; ++j) r = std::max(r, (x.col(j) - x.col(0)).norm());
    return 2 * r;
  }
  double r = 0;
  for (Index a = 0; a < m; ++a)
    for (Index b = a + 1; b < m; ++b) r = std::max(r, (x.col(b) - x.col(a)).norm());
  return r;
}

// x: n x m driver on the step, X2: (n*n) x m row-major X2_{0,j}.
ImplicitStep implicit_core(const Vecd& base, const Matd& x, const Matd& X2, const VectorField& sigma, const Domain& D,
                           const ImplicitOptions& opt) {
  const Index d = D.dim(), n = x.rows(), m = x.cols();
  if (sigma.dim() != d || sigma.noise_dim() != n || base.size() != d)
    throw DomainError("solve_implicit_step: dimensions of sigma, driver and domain are inconsistent");
  if (!D.constants().C_D) throw UnsupportedDomainError("solve_implicit_step: domain has no (H1) constant");
  const Matd s0 = sigma.sigma(base);
  const std::vector<Matd> Ds = sigma.dsigma(base);
  ImplicitStep st;
  st.cert.F_norm = F_norm(Ds);
  st.cert.x_sup = oscillation(x);
  st.cert.threshold = st.cert.F_norm > 0 ? 1 / (10 * *D.constants().C_D * st.cert.F_norm) : kUnbounded;
  if (st.cert.x_sup > st.cert.threshold) throw StepTooLargeError("solve_implicit_step: driver oscillation exceeds the contraction threshold");

  Matd eta(d, m);
  Matd M(n, n), SX(d, n);
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < n; ++i)
      for (Index k = 0; k < n; ++k) M(i, k) = X2(i * n + k, j);
    SX.noalias() = s0 * M;
    eta.col(j) = s0 * (x.col(j) - x.col(0)) + apply_F(Ds, SX);
  }
  // F(m (x) dx_i) = G_i m with column b of G_i equal to d_b sigma dx_i.
  std::vector<Matd> G(static_cast<std::size_t>(std::max<Index>(m - 1, 0)), Matd(d, d));
  for (Index i = 0; i + 1 < m; ++i) {
    const Vecd dx = x.col(i + 1) - x.col(i);
    for (Index b = 0; b < d; ++b) G[i].col(b) = Ds[b] * dx;
  }
  const double tol = opt.tol * std::max({1.0, base.cwiseAbs().maxCoeff(), D.scale()});
  Matd Phi = Matd::Zero(d, m), FK = Matd::Zero(d, m), z(d, m), xi, dphi;
  auto cross = [&](const Matd& P) {
    FK.col(0).setZero();
    for (Index i = 0; i + 1 < m; ++i) FK.col(i + 1) = FK.col(i) + G[i] * (0.5 * (P.col(i) + P.col(i + 1)));
  };
  const bool coupled = st.cert.F_norm > 0;
  bool done = false;
  for (int it = 1; it <= (coupled ? opt.max_iter : 1); ++it) {
    if (coupled) cross(Phi);
    for (Index j = 0; j < m; ++j) z.col(j) = base + eta.col(j) + FK.col(j);
    skorohod_map(D, z, xi, dphi);
    Matd next = Matd::Zero(d, m);
    for (Index j = 1; j < m; ++j) next.col(j) = next.col(j - 1) + dphi.col(j - 1);
    const double gap = m > 0 ? (next - Phi).cwiseAbs().maxCoeff() : 0;
    Phi = std::move(next);
    st.cert.iterations = it;
    st.cert.gaps.push_back(gap);
    if (!coupled || gap <= tol) {
      done = true;
      break;
    }
  }
  if (!done) throw ContractionFailure("solve_implicit_step: iteration budget exhausted", st.cert.gaps);
  st.cert.residual = st.cert.gaps.back();
  if (coupled) cross(Phi);
  st.Y.resize(d, m);
  for (Index j = 0; j < m; ++j) st.Y.col(j) = base + eta.col(j) + FK.col(j) + Phi.col(j);
  st.Phi = std::move(Phi);
  return st;
}

Matd X2_from(const RoughPathd& X, Index a, Index b) {
  const Index n = X.dim();
  const Matd& A = X.A();
  const Matd& x = X.base().values();
  Matd out(n * n, b - a + 1);
  const Vecd off = x.col(a) - x.col(0);
  for (Index j = a; j <= b; ++j) {
    const Vecd dx = x.col(j) - x.col(a);
    for (Index i = 0; i < n; ++i)
      for (Index k = 0; k < n; ++k) out(i * n + k, j - a) = A(i * n + k, j) - A(i * n + k, a) - off(i) * dx(k);
  }
  return out;
}

}  // namespace

ImplicitStep solve_implicit_step(const Vecd& base, const GridPathd& xSeg, const std::vector<Matd>& X2seg,
                                 const VectorField& sigma, const Domain& D, const ImplicitOptions& opt) {
  const Index n = xSeg.dim(), m = xSeg.size();
  if (static_cast<Index>(X2seg.size()) != m) throw DomainError("solve_implicit_step: one second-level matrix per node");
  Matd X2(n * n, m);
  for (Index j = 0; j < m; ++j) {
    if (X2seg[j].rows() != n || X2seg[j].cols() != n) throw DomainError("solve_implicit_step: second level has the wrong shape");
    for (Index i = 0; i < n; ++i)
      for (Index k = 0; k < n; ++k) X2(i * n + k, j) = X2seg[j](i, k);
  }
  if (!D.convex()) throw UnsupportedDomainError("solve_implicit_step: domain " + D.shape_name() + " is not convex");
  return implicit_core(base, xSeg.values(), X2, sigma, D, opt);
}

double default_epsilon_rough(const VectorField& sigma, const Domain& D, double p) {
  const double ds = sigma.bounds().dsigma;
  if (ds == 0) return 0.25;
  if (!D.constants().C_D) throw UnsupportedDomainError("default_epsilon_rough: domain has no (H1) constant");
  if (!std::isfinite(ds)) throw DomainError("default_epsilon_rough: Dsigma bound is not finite; pass epsilon");
  return 0.25 * std::min(1.0, std::pow(2 * *D.constants().C_D * ds, -p));
}

ReflectedSolution solve_reflected_rough_on(const RoughPathd& X, const VectorField& sigma, const Domain& D,
                                           const Vecd& y0, double p, const std::vector<Index>& part,
                                           const Controld& ctrl, const ImplicitOptions& opt, bool measure) {
  if (!(p >= 2 && p < 3)) throw RegimeError("solve_reflected_rough: p must lie in [2, 3)");
  if (sigma.dim() != D.dim() || sigma.noise_dim() != X.dim() || y0.size() != D.dim())
    throw DomainError("solve_reflected_rough: dimensions of sigma, driver, domain and start point are inconsistent");
  if (!D.convex()) throw UnsupportedDomainError("solve_reflected_rough: domain " + D.shape_name() + " is not convex");
  if (!D.constants().C_D) throw UnsupportedDomainError("solve_reflected_rough: domain has no (H1) constant");
  if (!D.contains(y0, 1e-10 * D.scale())) throw DomainError("solve_reflected_rough: start point outside the closure");
  if (part.size() < 2 || part.front() != 0 || part.back() != X.size() - 1)
    throw DomainError("solve_reflected_rough: partition must run from the first to the last node");

  const Index d = D.dim(), N = X.size();
  const Matd& x = X.base().values();
  Matd Y(d, N), Phi = Matd::Zero(d, N);
  std::vector<double> tv(static_cast<std::size_t>(N), 0.0);
  Y.col(0) = y0;
  ReflectedSolution sol{GridPathd(X.times(), Matd::Zero(d, N)), GridPathd(X.times(), Matd::Zero(d, N)), {}, {0}, {}, {}};

  std::function<void(Index, Index)> step = [&](Index a, Index b) {
    ImplicitStep st;
    try {
      st = implicit_core(Y.col(a), x.middleCols(a, b - a + 1), X2_from(X, a, b), sigma, D, opt);
    } catch (const StepTooLargeError&) {
      if (b - a < 2) throw StepTooLargeError("solve_reflected_rough: single grid step exceeds the contraction threshold");
      const Index mid = (a + b) / 2;
      step(a, mid);
      step(mid, b);
      return;
    }
    for (Index j = a + 1; j <= b; ++j) {
      Y.col(j) = st.Y.col(j - a);
      Phi.col(j) = Phi.col(a) + st.Phi.col(j - a);
      tv[j] = tv[j - 1] + (st.Phi.col(j - a) - st.Phi.col(j - a - 1)).norm();
    }
    st.cert.begin = a;
    st.cert.end = b;
    sol.certs.push_back(std::move(st.cert));
    sol.partition.push_back(b);
  };
  for (std::size_t k = 0; k + 1 < part.size(); ++k) step(part[k], part[k + 1]);

  sol.Y = GridPathd(X.times(), std::move(Y));
  sol.Phi = GridPathd(X.times(), std::move(Phi));
  sol.phi_tv = std::move(tv);
  if (measure) sol.constants = measure_constants(sol.Y, sol.phi_tv, sol.partition, ctrl, p, 3);
  return sol;
}

ReflectedSolution solve_reflected_rough(const RoughPathd& X, const VectorField& sigma, const Domain& D, const Vecd& y0,
                                        double p, double eps, const ImplicitOptions& opt) {
  if (!(p >= 2 && p < 3)) throw RegimeError("solve_reflected_rough: p must lie in [2, 3)");
  const Controld ctrl = X.certificate() ? *X.certificate() : rough_control(X);
  if (eps <= 0) eps = default_epsilon_rough(sigma, D, p);
  return solve_reflected_rough_on(X, sigma, D, y0, p, adaptive_partition(ctrl, eps), ctrl, opt);
}

HatRoughPath::HatRoughPath(const RoughPathd& X, const GridPathd& Phi)
    : hat_(lift_piecewise_linear(GridPathd(std::vector<double>{0.0, 1.0}, Matd::Zero(1, 2)), 2.0)),
      n_(X.dim()),
      d_(Phi.dim()) {
  if (X.times() != Phi.times()) throw DomainError("hat_rough_path: rough path and local time on different grids");
  const Index n = n_, d = d_, m = n + d, N = X.size();
  Matd z(m, N);
  z.topRows(n) = X.base().values();
  z.bottomRows(d) = Phi.values();
  Matd A = Matd::Zero(m * m, N);
  for (Index k = 0; k + 1 < N; ++k) {
    const Vecd off = z.col(k) - z.col(0);
    const Vecd dz = z.col(k + 1) - z.col(k);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j) {
        double local;
        if (i < n && j < n) {
          local = 0;  // x block copied from X below
        } else {
          local = 0.5 * dz(i) * dz(j);
        }
        A(i * m + j, k + 1) = A(i * m + j, k) + off(i) * dz(j) + local;
      }
  }
  for (Index k = 0; k < N; ++k)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) A(i * m + j, k) = X.A()(i * n + j, k);
  hat_ = RoughPathd(X.times(), std::move(z), std::move(A), X.p());
}

Matd HatRoughPath::X2(Index a, Index b) const { return hat_.X2(a, b).topLeftCorner(n_, n_); }
Matd HatRoughPath::x_dphi(Index a, Index b) const { return hat_.X2(a, b).topRightCorner(n_, d_); }
Matd HatRoughPath::phi_dx(Index a, Index b) const { return hat_.X2(a, b).bottomLeftCorner(d_, n_); }
Matd HatRoughPath::phi_dphi(Index a, Index b) const { return hat_.X2(a, b).bottomRightCorner(d_, d_); }

double HatRoughPath::ibp_residual(Index a, Index b) const {
  const Matd S = hat_.X2(a, b);
  const Vecd dz = hat_.X1(a, b);
  const Matd r = S.topRightCorner(n_, d_) + S.bottomLeftCorner(d_, n_).transpose() - dz.head(n_) * dz.tail(d_).transpose();
  return r.cwiseAbs().maxCoeff();
}

HatRoughPath hat_rough_path(const RoughPathd& X, const GridPathd& Phi) { return HatRoughPath(X, Phi); }

RemainderCalculus::RemainderCalculus(const GridPathd& Y, const GridPathd& Phi, const RoughPathd& X,
                                     const VectorField& sigma)
    : Y_(Y), Phi_(Phi), X_(X) {
  if (!Y.same_grid(Phi) || Y.times() != X.times()) throw DomainError("remainder: inputs on different grids");
  if (sigma.dim() != Y.dim() || sigma.noise_dim() != X.dim()) throw DomainError("remainder: dimension mismatch");
  const Index N = Y.size(), d = Y.dim(), n = X.dim();
  sig_.reserve(static_cast<std::size_t>(N));
  ds_.reserve(static_cast<std::size_t>(N));
  for (Index k = 0; k < N; ++k) {
    sig_.push_back(sigma.sigma(Y.point(k)));
    ds_.push_back(sigma.dsigma(Y.point(k)));
  }
  P_ = Matd::Zero(d * n, N);
  for (Index k = 0; k + 1 < N; ++k) {
    const Vecd mid = 0.5 * (Phi.point(k) + Phi.point(k + 1));
    const Vecd dx = X.base().point(k + 1) - X.base().point(k);
    for (Index b = 0; b < d; ++b)
      for (Index j = 0; j < n; ++j) P_(b * n + j, k + 1) = P_(b * n + j, k) + mid(b) * dx(j);
  }
}

Matd RemainderCalculus::K(Index s, Index t) const {
  const Index d = Y_.dim(), n = X_.dim();
  Matd k(d, n);
  for (Index b = 0; b < d; ++b)
    for (Index j = 0; j < n; ++j) k(b, j) = P_(b * n + j, t) - P_(b * n + j, s);
  k.noalias() -= Phi_.point(s) * X_.X1(s, t).transpose();
  return k;
}

Vecd RemainderCalculus::I(Index s, Index t) const {
  return Y_.point(t) - Y_.point(s) - sig_[s] * X_.X1(s, t) - (Phi_.point(t) - Phi_.point(s));
}

Vecd RemainderCalculus::J(Index s, Index t) const {
  return I(s, t) - apply_F(ds_[s], sig_[s] * X_.X2(s, t)) - apply_F(ds_[s], K(s, t));
}

Matd RemainderCalculus::taylor_gap(Index s, Index t) const {
  return sig_[t] - sig_[s] - directional(ds_[s], Y_.point(t) - Y_.point(s));
}

Vecd RemainderCalculus::three_point(Index s, Index t, Index u) const {
  const Matd bracket = taylor_gap(s, t) + directional(ds_[s], I(s, t));
  const Matd X2 = X_.X2(t, u);
  const Matd Ktu = K(t, u);
  return bracket * X_.X1(t, u) + apply_F(ds_[t], sig_[t] * X2) - apply_F(ds_[s], sig_[s] * X2) + apply_F(ds_[t], Ktu) -
         apply_F(ds_[s], Ktu);
}

DefectReport defect_profile_J(const ReflectedSolution& sol, const RoughPathd& X, const VectorField& sigma,
                              const Controld& ctrl, double p, double gamma, double omega_cap) {
  const RemainderCalculus rc(sol.Y, sol.Phi, X, sigma);
  const auto& part = sol.partition;
  const Index N = X.size();
  std::vector<double> om, val;
  double within = 0;
  for (std::size_t k = 0; k + 1 < part.size(); ++k) {
    const Index s = part[k];
    const std::vector<double> row = ctrl.row(s);
    for (Index t = s + 1; t < N; ++t) {
      const double a = rc.J(s, t).cwiseAbs().maxCoeff();
      if (t <= part[k + 1]) {
        within = std::max(within, a);
      } else if (row[t - s] <= omega_cap) {
        om.push_back(row[t - s]);
        val.push_back(a);
      }
    }
  }
  DefectReport rep = bucket_profile(om, val);
  rep.within_step_max = within;
  rep.expected_slope = gamma / p;
  const std::uint64_t key = stream_key(0x7819017ULL, static_cast<std::uint64_t>(N));
  double worst = 0;
  for (std::uint64_t r = 0; r < 2000 && N >= 3; ++r) {
    Index v[3];
    for (int i = 0; i < 3; ++i) v[i] = static_cast<Index>(counter_uniform(key, 3 * r + i) * N) % N;
    std::sort(v, v + 3);
    if (v[0] == v[1] || v[1] == v[2]) continue;
    const Vecd lhs = rc.J(v[0], v[2]) - rc.J(v[0], v[1]) - rc.J(v[1], v[2]);
    worst = std::max(worst, (lhs - rc.three_point(v[0], v[1], v[2])).cwiseAbs().maxCoeff());
  }
  rep.identity_max = worst;
  return rep;
}

RoughPathd solution_level2(const ReflectedSolution& sol, const HatRoughPath& Xhat, const VectorField& sigma) {
  const RoughPathd& H = Xhat.path();
  if (H.times() != sol.Y.times()) throw DomainError("solution_level2: solution and hat path on different grids");
  const Index d = sol.Y.dim(), n = Xhat.n(), N = sol.Y.size();
  if (Xhat.d() != d || sigma.noise_dim() != n) throw DomainError("solution_level2: dimension mismatch");
  Matd A = Matd::Zero(d * d, N);
  Matd sh(d, n + d);
  for (Index k = 0; k + 1 < N; ++k) {
    sh.leftCols(n) = sigma.sigma(sol.Y.point(k));
    sh.rightCols(d).setIdentity();
    const Matd L = sh * H.X2(k, k + 1) * sh.transpose();
    const Vecd dY = sol.Y.point(k + 1) - sol.Y.point(k);
    const Vecd off = sol.Y.point(k) - sol.Y.point(0);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j)
        A(i * d + j, k + 1) = A(i * d + j, k) + off(i) * dY(j) + 0.5 * dY(i) * dY(j) + 0.5 * (L(i, j) - L(j, i));
  }
  return RoughPathd(sol.Y.times(), sol.Y.values(), std::move(A), H.p());
}

DavieVerdict verify_davie_solution(const GridPathd& Y, const GridPathd& Phi, const RoughPathd& X,
                                   const VectorField& sigma, const Controld& ctrl, double p, double gamma,
                                   double Cbudget, const Domain& D, const std::vector<Index>& nodes) {
  const RemainderCalculus rc(Y, Phi, X, sigma);
  std::vector<Index> idx = nodes;
  if (idx.empty())
    for (Index k = 0; k < Y.size(); ++k) idx.push_back(k);
  std::sort(idx.begin(), idx.end());
  double ysc = 1;
  for (Index k = 0; k < Y.size(); ++k) ysc = std::max(ysc, Y.point(k).cwiseAbs().maxCoeff());
  DavieVerdict v;
  for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
    const std::vector<double> row = ctrl.row(idx[i]);
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      const double a = rc.J(idx[i], idx[j]).cwiseAbs().maxCoeff();
      const double w = row[idx[j] - idx[i]];
      v.max_abs = std::max(v.max_abs, a);
      ++v.pairs;
      if (w > 0) {
        v.max_ratio = std::max(v.max_ratio, a / (Cbudget * std::pow(w, gamma / p)));
      } else if (a > 1e-12 * ysc) {
        v.max_ratio = kUnbounded;
      }
    }
  }
  v.complementarity = complementarity_residual(Y, Phi, D);
  v.pass = v.max_ratio <= 1 && v.complementarity <= 1e-8;
  return v;
}

}  // namespace rrde
