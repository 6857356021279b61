#include "rrde/wongzakai.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rrde/errors.hpp"
#include "rrde/rng.hpp"

namespace rrde {

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

namespace {

std::vector<Index> stride_nodes(Index size, Index stride) {
  std::vector<Index> v;
  for (Index k = 0; k < size; k += stride) v.push_back(k);
  return v;
}

Controld subgrid_control(const RoughPathd& X, int Nref) {
  const int L = std::min(Nref, 9);
  const RoughPathd S = X.restricted(stride_nodes(X.size(), Index(1) << (Nref - L)));
  return Controld::holder(rough_constant(S), X.p(), X.times());
}

ReflectedSolution solve_all_nodes(const RoughPathd& X, const VectorField& sigma, const Domain& D, const Vecd& y0,
                                  double p, const ImplicitOptions& opt) {
  return solve_reflected_rough_on(X, sigma, D, y0, p, stride_nodes(X.size(), 1), Controld::holder(1, p, X.times()),
                                  opt, false);
}

void check_setup(const VectorField& sigma, const Domain& D, const Vecd& y0, double p) {
  if (!D.convex()) throw UnsupportedDomainError("wongzakai: domain " + D.shape_name() + " is not convex");
  if (!D.constants().C_D) throw UnsupportedDomainError("wongzakai: domain has no (H1) constant");
  if (!(p > 2 && p < 3)) throw RegimeError("wongzakai: p must lie in (2, 3)");
  if (sigma.dim() != D.dim() || y0.size() != D.dim()) throw DomainError("wongzakai: dimension mismatch");
}

void finish(ConvergenceReport& r, const std::vector<std::vector<double>>& vals) {
  const std::size_t K = r.N.size();
  r.mean_sq_err.assign(K, 0);
  r.stderr_.assign(K, 0);
  r.median.assign(K, 0);
  std::vector<double> lx, ly;
  r.within_budget = true;
  for (std::size_t k = 0; k < K; ++k) {
    const auto& v = vals[k];
    const std::size_t m = v.size();
    r.within_budget = r.within_budget && r.samples_failed[k] * 100 <= r.samples;
    if (m == 0) {
      r.mean_sq_err[k] = std::nan("");
      continue;
    }
    const double mean = pairwise_sum(v.data(), m) / static_cast<double>(m);
    std::vector<double> dev(m);
    for (std::size_t i = 0; i < m; ++i) dev[i] = (v[i] - mean) * (v[i] - mean);
    const double var = m > 1 ? pairwise_sum(dev.data(), m) / static_cast<double>(m - 1) : 0;
    r.mean_sq_err[k] = mean;
    r.stderr_[k] = std::sqrt(var / static_cast<double>(m));
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    r.median[k] = m % 2 ? s[m / 2] : 0.5 * (s[m / 2 - 1] + s[m / 2]);
    if (mean > 0) {
      lx.push_back(r.N[k]);
      ly.push_back(std::log2(mean));
    }
  }
  if (lx.size() >= 2) r.fit = fit_line(lx, ly);
  r.strictly_decreasing = K >= 2;
  for (std::size_t k = 1; k < K; ++k)
    r.strictly_decreasing = r.strictly_decreasing && r.mean_sq_err[k] < r.mean_sq_err[k - 1];
  r.gate = K >= 2 && r.mean_sq_err.back() < r.mean_sq_err.front();
}

}  // namespace

ReferenceSolution reference_solution(const BrownianSample& B, const VectorField& sigma, const Domain& D,
                                     const Vecd& y0, double p, int Nref, const ImplicitOptions& opt) {
  check_setup(sigma, D, y0, p);
  if (Nref < 1 || Nref > B.Nmax) throw DomainError("reference_solution: need 1 <= Nref <= Nmax");
  RoughPathd X = lift_piecewise_linear(dyadic_nodes(B, Nref), p);
  ReflectedSolution sol = solve_all_nodes(X, sigma, D, y0, p, opt);
  const RoughPathd Xc = lift_piecewise_linear(dyadic_nodes(B, Nref - 1), p);
  const ReflectedSolution coarse = solve_all_nodes(Xc, sigma, D, y0, p, opt);
  double gap = 0;
  for (Index k = 0; k < Xc.size(); ++k) gap = std::max(gap, (sol.Y.point(2 * k) - coarse.Y.point(k)).norm());
  return ReferenceSolution{std::move(sol), std::move(X), gap};
}

GridPathd stratonovich_projection_euler(const BrownianSample& B, const VectorField& sigma, const Domain& D,
                                        const Vecd& y0, int L) {
  if (!D.convex()) throw UnsupportedDomainError("stratonovich_projection_euler: domain is not convex");
  const GridPathd b = dyadic_nodes(B, L);
  const Index d = D.dim(), n = sigma.noise_dim(), M = b.size();
  Matd Y(d, M);
  Y.col(0) = D.project(y0);
  for (Index k = 0; k + 1 < M; ++k) {
    const Vecd y = Y.col(k);
    const Matd s = sigma.sigma(y);
    const std::vector<Matd> Ds = sigma.dsigma(y);
    Vecd drift = Vecd::Zero(d);
    for (Index j = 0; j < n; ++j)
      for (Index c = 0; c < d; ++c) drift += s(c, j) * Ds[c].col(j);
    const double dt = b.time(k + 1) - b.time(k);
    Y.col(k + 1) = D.project(y + s * (b.point(k + 1) - b.point(k)) + 0.5 * dt * drift);
  }
  return GridPathd(b.times(), std::move(Y));
}

std::pair<ConvergenceReport, ConvergenceReport> wz_study(const VectorField& sigma, const Domain& D, const Vecd& y0,
                                                          const std::vector<int>& Nrange, Index samples, double p,
                                                          std::uint64_t seed, const WZOptions& opt, bool want_err,
                                                          bool want_gap) {
  check_setup(sigma, D, y0, p);
  if (Nrange.empty() || samples < 1) throw DomainError("wongzakai: empty N range or sample set");
  const int top = *std::max_element(Nrange.begin(), Nrange.end());
  const int Nref = opt.Nref > 0 ? opt.Nref : top + 3;
  if (Nref < top + 1 || Nref > kMaxDyadicLevel) throw DomainError("wongzakai: Nref must exceed every N in range");
  const Index n = opt.n > 0 ? opt.n : sigma.noise_dim();

  ConvergenceReport base;
  base.N = Nrange;
  base.samples = samples;
  base.seed = seed;
  base.Nref = Nref;
  base.samples_failed.assign(Nrange.size(), 0);
  std::ostringstream cfg;
  cfg << "sigma=" << sigma.name() << " domain=" << D.shape_name() << " p=" << p << " samples=" << samples
      << " seed=" << seed << " Nref=" << Nref;
  base.config = cfg.str();
  ConvergenceReport err = base, gap = base;
  err.theory_slope = -4 / p;
  gap.theory_slope = -1.0 / 6;
  std::vector<std::vector<double>> ev(Nrange.size()), gv(Nrange.size());
  std::vector<double> self;

  for (Index s = 0; s < samples; ++s) {
    const BrownianSample B = sample_brownian(derive_seed(seed, static_cast<std::uint64_t>(s)), n, Nref, opt.T);
    std::optional<ReferenceSolution> ref;
    Controld ctrl = Controld::holder(0, p, B.path.times());
    try {
      ref = reference_solution(B, sigma, D, y0, p, Nref, opt.implicit);
      ctrl = subgrid_control(ref->X, Nref);
      const DavieVerdict v = verify_davie_solution(ref->sol.Y, ref->sol.Phi, ref->X, sigma, ctrl, p, 3, opt.Cbudget,
                                                   D, stride_nodes(ref->X.size(), Index(1) << (Nref - std::min(Nref, opt.verify_level))));
      if (!v.pass) ref.reset();
    } catch (const Error&) {
      ref.reset();
    }
    if (!ref) {
      for (std::size_t k = 0; k < Nrange.size(); ++k) {
        ++err.samples_failed[k];
        ++gap.samples_failed[k];
      }
      continue;
    }
    self.push_back(ref->self_gap);
    const Matd& YS = ref->sol.Y.values();
    const Matd IS = YS - ref->sol.Phi.values();
    for (std::size_t k = 0; k < Nrange.size(); ++k) {
      const int N = Nrange[k];
      const std::vector<Index> check = stride_nodes(ref->X.size(), Index(1) << (Nref - std::min(N, opt.verify_level)));
      if (want_err) {
        try {
          const ReflectedSolution y = solve_reflected_rough_on(ref->X, sigma, D, y0, p,
                                                               stride_nodes(ref->X.size(), Index(1) << (Nref - N)),
                                                               ctrl, opt.implicit, false);
          const DavieVerdict v = verify_davie_solution(y.Y, y.Phi, ref->X, sigma, ctrl, p, 3, opt.Cbudget, D, check);
          if (!v.pass) throw ConvergenceError("wz: Davie check failed", {v.max_ratio});
          ev[k].push_back((y.Y.values() - YS).colwise().squaredNorm().maxCoeff());
        } catch (const Error&) {
          ++err.samples_failed[k];
        }
      }
      if (want_gap) {
        try {
          const RoughPathd XN = lift_piecewise_linear(dyadic_refine_on(B, N, Nref), p);
          const ReflectedSolution y = solve_all_nodes(XN, sigma, D, y0, p, opt.implicit);
          const Controld cN = subgrid_control(XN, Nref);
          const DavieVerdict v = verify_davie_solution(y.Y, y.Phi, XN, sigma, cN, p, 3, opt.Cbudget, D, check);
          if (!v.pass) throw ConvergenceError("wz: Davie check failed", {v.max_ratio});
          gv[k].push_back(((y.Y.values() - y.Phi.values()) - IS).colwise().squaredNorm().maxCoeff());
        } catch (const Error&) {
          ++gap.samples_failed[k];
        }
      }
    }
  }
  const double sg = self.empty() ? std::nan("") : pairwise_sum(self.data(), self.size()) / static_cast<double>(self.size());
  err.self_gap_mean = gap.self_gap_mean = sg;
  if (want_err) finish(err, ev);
  if (want_gap) finish(gap, gv);
  return {std::move(err), std::move(gap)};
}

ConvergenceReport wz_error_curve(const VectorField& sigma, const Domain& D, const Vecd& y0,
                                 const std::vector<int>& Nrange, Index samples, double p, std::uint64_t seed,
                                 const WZOptions& opt) {
  return wz_study(sigma, D, y0, Nrange, samples, p, seed, opt, true, false).first;
}

ConvergenceReport integral_gap_curve(const VectorField& sigma, const Domain& D, const Vecd& y0,
                                     const std::vector<int>& Nrange, Index samples, std::uint64_t seed, double p,
                                     const WZOptions& opt) {
  return wz_study(sigma, D, y0, Nrange, samples, p, seed, opt, false, true).second;
}

}  // namespace rrde
