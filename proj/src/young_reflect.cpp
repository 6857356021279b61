#include "rrde/young_reflect.hpp"

#include <algorithm>
#include <cmath>

#include "rrde/errors.hpp"
#include "rrde/rng.hpp"

namespace rrde {

std::vector<Index> adaptive_partition(const Controld& ctrl, double eps) {
  if (!(eps > 0)) throw DomainError("adaptive_partition: epsilon must be positive");
  const Index N = ctrl.size();
  std::vector<Index> nodes{0};
  std::vector<std::vector<double>> rows{ctrl.row(0)};
  const bool holder = ctrl.kind() == Controld::Kind::Holder;
  while (nodes.back() < N - 1) {
    const Index l = nodes.back();
    auto ok = [&](Index j) {
      if (holder) return rows.back()[j - l] <= eps / 2;  // increments do not depend on k
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        const auto& r = rows[k];
        const Index a = nodes[k];
        if (r[j - a] - r[l - a] > eps / 2) return false;
      }
      return true;
    };
    if (!ok(l + 1)) {
      double jump = 0;
      for (std::size_t k = 0; k < nodes.size(); ++k) jump = std::max(jump, rows[k][l + 1 - nodes[k]] - rows[k][l - nodes[k]]);
      throw ResolutionError("adaptive_partition: a single grid step already exceeds epsilon/2", jump, eps);
    }
    Index j = l + 1;
    while (j + 1 < N && ok(j + 1)) ++j;
    nodes.push_back(j);
    if (j < N - 1) rows.push_back(ctrl.row(j));
  }
  return nodes;
}

std::vector<double> partition_times(const Controld& ctrl, const std::vector<Index>& nodes) {
  std::vector<double> t;
  for (Index k : nodes) t.push_back(ctrl.times()[k]);
  return t;
}

double default_epsilon_young(const VectorField& sigma, double p) {
  const double C2 = 1 + 4 * sigma.bounds().sigma;
  const double ds = sigma.bounds().dsigma;
  if (ds == 0) return 0.25;
  if (!std::isfinite(C2) || !std::isfinite(ds)) throw DomainError("default_epsilon_young: vector field bounds are not finite; pass epsilon");
  return 0.25 * std::min(1.0, std::pow(2 * C2 * ds, -p));
}

namespace {

void check_inputs(const GridPathd& x, const VectorField& sigma, const Domain& D, const Vecd& y0) {
  if (sigma.dim() != D.dim() || sigma.noise_dim() != x.dim() || y0.size() != D.dim())
    throw DomainError("solver: dimensions of sigma, driver, domain and start point are inconsistent");
  if (!D.convex()) throw UnsupportedDomainError("solver: domain " + D.shape_name() + " is not convex");
  if (!D.contains(y0, 1e-10 * D.scale())) throw DomainError("solver: start point outside the closure");
}

}  // namespace

ReflectedSolution solve_reflected_young_on(const GridPathd& x, const VectorField& sigma, const Domain& D, const Vecd& y0,
                                           double p, const std::vector<Index>& part, const Controld& ctrl) {
  if (!(p >= 1 && p < 2)) throw RegimeError("solve_reflected_young: p must lie in [1, 2)");
  check_inputs(x, sigma, D, y0);
  if (part.size() < 2 || part.front() != 0 || part.back() != x.size() - 1)
    throw DomainError("solve_reflected_young: partition must run from the first to the last node");
  const Index d = D.dim(), N = x.size();
  Matd Y(d, N), Phi = Matd::Zero(d, N);
  std::vector<double> tv(static_cast<std::size_t>(N), 0.0);
  Y.col(0) = y0;
  Matd z, xi, dphi;
  for (std::size_t k = 0; k + 1 < part.size(); ++k) {
    const Index a = part[k], b = part[k + 1];
    const Matd s0 = sigma.sigma(Y.col(a));
    z.resize(d, b - a + 1);
    for (Index j = a; j <= b; ++j) z.col(j - a) = Y.col(a) + s0 * (x.point(j) - x.point(a));
    skorohod_map(D, z, xi, dphi);
    for (Index j = a + 1; j <= b; ++j) {
      Y.col(j) = xi.col(j - a);
      Phi.col(j) = Phi.col(j - 1) + dphi.col(j - a - 1);
      tv[j] = tv[j - 1] + dphi.col(j - a - 1).norm();
    }
  }
  ReflectedSolution sol{GridPathd(x.times(), std::move(Y)), GridPathd(x.times(), std::move(Phi)), std::move(tv), part, {}, {}};
  sol.constants = measure_constants(sol.Y, sol.phi_tv, part, ctrl, p, 1);
  return sol;
}

ReflectedSolution solve_reflected_young(const GridPathd& x, const VectorField& sigma, const Domain& D, const Vecd& y0,
                                        double p, double eps, const std::optional<Controld>& ctrl) {
  if (!(p >= 1 && p < 2)) throw RegimeError("solve_reflected_young: p must lie in [1, 2)");
  check_inputs(x, sigma, D, y0);
  const Controld c = ctrl ? *ctrl : Controld::pvariation(x, p);
  if (eps <= 0) eps = default_epsilon_young(sigma, p);
  return solve_reflected_young_on(x, sigma, D, y0, p, adaptive_partition(c, eps), c);
}

Vecd remainder_I(const ReflectedSolution& sol, const GridPathd& x, const VectorField& sigma, Index s, Index t) {
  return sol.Y.point(t) - sol.Y.point(s) - sigma.sigma(sol.Y.point(s)) * (x.point(t) - x.point(s)) -
         (sol.Phi.point(t) - sol.Phi.point(s));
}

DefectReport defect_profile_I(const ReflectedSolution& sol, const GridPathd& x, const VectorField& sigma,
                              const Controld& ctrl, double p, double gamma, double omega_cap) {
  const auto& part = sol.partition;
  const Index N = x.size();
  std::vector<double> om, val;
  double within = 0;
  for (std::size_t k = 0; k + 1 < part.size(); ++k) {
    const Index s = part[k];
    const std::vector<double> row = ctrl.row(s);
    const Matd ss = sigma.sigma(sol.Y.point(s));
    for (Index t = s + 1; t < N; ++t) {
      const Vecd I = sol.Y.point(t) - sol.Y.point(s) - ss * (x.point(t) - x.point(s)) - (sol.Phi.point(t) - sol.Phi.point(s));
      const double a = I.cwiseAbs().maxCoeff();
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
  // Additivity on seeded triples.
  const std::uint64_t key = stream_key(0xadd1717ULL, static_cast<std::uint64_t>(N));
  double worst = 0;
  for (std::uint64_t r = 0; r < 2000 && N >= 3; ++r) {
    Index v[3];
    for (int i = 0; i < 3; ++i) v[i] = static_cast<Index>(counter_uniform(key, 3 * r + i) * N) % N;
    std::sort(v, v + 3);
    if (v[0] == v[1] || v[1] == v[2]) continue;
    const Vecd lhs = remainder_I(sol, x, sigma, v[0], v[2]) - remainder_I(sol, x, sigma, v[0], v[1]) -
                     remainder_I(sol, x, sigma, v[1], v[2]);
    const Vecd rhs = (sigma.sigma(sol.Y.point(v[1])) - sigma.sigma(sol.Y.point(v[0]))) * (x.point(v[2]) - x.point(v[1]));
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  rep.identity_max = worst;
  return rep;
}

RefinementResult refine_until_converged(const GridPathd& x, const VectorField& sigma, const Domain& D, const Vecd& y0,
                                        double p, double tol, int max_levels) {
  if (!(p >= 1 && p < 2)) throw RegimeError("refine_until_converged: p must lie in [1, 2)");
  check_inputs(x, sigma, D, y0);
  const Controld ctrl = Controld::pvariation(x, p);
  std::vector<Index> part;
  try {
    part = adaptive_partition(ctrl, default_epsilon_young(sigma, p));
  } catch (const ResolutionError&) {
    part.resize(static_cast<std::size_t>(x.size()));
    for (Index k = 0; k < x.size(); ++k) part[k] = k;
  }
  RefinementResult res{solve_reflected_young_on(x, sigma, D, y0, p, part, ctrl), {}, {part.size()}};
  for (int level = 1; level <= max_levels; ++level) {
    std::vector<Index> finer{part.front()};
    for (std::size_t k = 0; k + 1 < part.size(); ++k) {
      if (part[k + 1] - part[k] >= 2) finer.push_back((part[k] + part[k + 1]) / 2);
      finer.push_back(part[k + 1]);
    }
    part = std::move(finer);
    ReflectedSolution next = solve_reflected_young_on(x, sigma, D, y0, p, part, ctrl);
    double gap = 0;
    for (Index k = 0; k < x.size(); ++k) gap = std::max(gap, (next.Y.point(k) - res.solution.Y.point(k)).norm());
    res.gaps.push_back(gap);
    res.partition_sizes.push_back(part.size());
    res.solution = std::move(next);
    if (gap < tol) return res;
  }
  throw ConvergenceError("refine_until_converged: level budget exhausted", res.gaps);
}

LipschitzGap lipschitz_gap(const GridPathd& x, const GridPathd& xp, const VectorField& sigma, const Domain& D,
                           const Vecd& y0) {
  if (!D.constants().condition_c) throw UnsupportedDomainError("lipschitz_gap: domain lacks the condition (C) certificate");
  if (!x.same_grid(xp)) throw DomainError("lipschitz_gap: drivers on different grids");
  const ReflectedSolution a = solve_reflected_young(x, sigma, D, y0, 1.0);
  const ReflectedSolution b = solve_reflected_young(xp, sigma, D, y0, 1.0);
  LipschitzGap g;
  for (Index k = 0; k < x.size(); ++k) g.sup_diff = std::max(g.sup_diff, (a.Y.point(k) - b.Y.point(k)).norm());
  for (Index k = 0; k + 1 < x.size(); ++k) {
    g.bv_diff += ((x.point(k + 1) - xp.point(k + 1)) - (x.point(k) - xp.point(k))).norm();
    g.bv_x += (x.point(k + 1) - x.point(k)).norm();
    g.bv_xprime += (xp.point(k + 1) - xp.point(k)).norm();
  }
  return g;
}

}  // namespace rrde
