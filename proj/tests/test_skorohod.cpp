#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"
#include "rrde/brownian.hpp"
#include "rrde/control.hpp"
#include "rrde/skorohod.hpp"

using namespace rrde;
using namespace testutil;

namespace {

Vecd vec(std::initializer_list<double> v) {
  Vecd r(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

std::vector<Domain> catalogue() {
  Matd N(3, 2);
  N << 1, 0, 0, 1, -1, -1;
  return {Domain::half_space(vec({1, 1}), 0.2), Domain::orthant(2), Domain::ball(vec({0, 0}), 1.5),
          Domain::polyhedron(N, vec({0, 0, -2}))};
}

// Explicit one-dimensional reflection at 0.
Matd reflect_1d(const GridPathd& w, double y0) {
  Matd xi(1, w.size());
  double m = 0;
  for (Index k = 0; k < w.size(); ++k) {
    const double free = y0 + w.point(k)(0) - w.point(0)(0);
    m = std::max(m, -free);
    xi(0, k) = free + m;
  }
  return xi;
}

}  // namespace

TEST_CASE("pressed against the wall") {
  const Domain D = Domain::half_space(vec({1}), 0);
  const GridPathd w = from_function(1, 101, [](double t) { return Vecd::Constant(1, -t); });
  const SkorohodSolution s = solve_skorohod(w, D, vec({0}));
  CHECK(s.xi.values().cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(s.tv.back() == doctest::Approx(1).epsilon(1e-13));
  CHECK(complementarity_residual(s, D) <= 1e-10);
}

TEST_CASE("interior motion has no local time") {
  for (const Domain& D : catalogue()) {
    const GridPathd w = random_walk(2, 2, 60, 0.002);
    const Vecd inner = D.shape() == Domain::Shape::Ball ? vec({0.2, 0.3}) : vec({0.7, 0.6});
    const SkorohodSolution s = solve_skorohod(w, D, inner);
    CHECK(s.phi.values().cwiseAbs().maxCoeff() == 0);
    for (Index k = 0; k < w.size(); ++k) CHECK((s.xi.point(k) - inner - w.point(k)).norm() <= 1e-15);
    CHECK(complementarity_residual(s, D) == 0);
  }
}

TEST_CASE("half-line reflection formula") {
  const Domain D = Domain::half_space(vec({1}), 0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const GridPathd w = from_function(1, 400, [&](double t) {
      return Vecd::Constant(1, 1.5 * std::sin(9 * t + seed) - 2 * t + 0.3 * std::cos(31 * t));
    });
    const Matd oracle = reflect_1d(w, 1.0);
    CHECK((solve_skorohod(w, D, vec({1})).xi.values() - oracle).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((solve_skorohod_projection(w, D, vec({1})).xi.values() - oracle).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("solution invariants on the catalogue") {
  for (const Domain& D : catalogue()) {
    int reflected = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const GridPathd w = random_walk(40 + seed, 2, 300, 0.08);
      const Vecd y0 = D.project(vec({0.3, 0.4}));
      const SkorohodSolution s = solve_skorohod(w, D, y0);
      double worst = 0;
      for (Index k = 0; k < w.size(); ++k) {
        CHECK(D.contains(s.xi.point(k), 1e-10));
        worst = std::max(worst, (s.xi.point(k) - (y0 + w.point(k) - w.point(0) + s.phi.point(k))).norm());
      }
      CHECK(worst <= 1e-12);
      CHECK(complementarity_residual(s, D) <= 1e-8);
      reflected += s.tv.back() > 0;

      // Truncation reproduces the prefix.
      const Index cut = 137;
      const SkorohodSolution p = solve_skorohod(w.restricted([&] {
        std::vector<Index> n;
        for (Index k = 0; k <= cut; ++k) n.push_back(k);
        return n;
      }()), D, y0);
      CHECK((p.xi.values() - s.xi.values().leftCols(cut + 1)).cwiseAbs().maxCoeff() == 0);
    }
    CHECK(reflected > 0);
  }
}

TEST_CASE("explicit and projection solvers agree on half-spaces and orthants") {
  for (const Domain& D : {Domain::half_space(vec({0.6, -0.8}), -0.1), Domain::orthant(3)}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const GridPathd w = random_walk(70 + seed, D.dim(), 512, 0.05);
      const Vecd y0 = D.project(Vecd::Constant(D.dim(), 0.05));
      const SkorohodSolution a = solve_skorohod(w, D, y0), b = solve_skorohod_projection(w, D, y0);
      CHECK((a.xi.values() - b.xi.values()).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("complementarity residual detects tangential local time") {
  const Domain D = Domain::half_space(vec({1, 0}), 0);
  const GridPathd w = from_function(2, 51, [](double t) { return vec({-t, 0}); });
  const SkorohodSolution s = solve_skorohod(w, D, vec({0, 0}));
  CHECK(complementarity_residual(s, D) <= 1e-10);
  Matd phi = s.phi.values();
  for (Index k = 20; k < phi.cols(); ++k) phi(1, k) += 0.01;
  CHECK(complementarity_residual(s.xi, GridPathd(s.phi.times(), phi), D) > 0.1);

  // Local time growing away from the boundary.
  const GridPathd in = from_function(2, 11, [](double) { return vec({1, 0}); });
  Matd grow = Matd::Zero(2, 11);
  grow(0, 10) = 0.5;
  CHECK(complementarity_residual(in, GridPathd(in.times(), grow), D) >= 0.5);
  CHECK(complementarity_residual(in, GridPathd(in.times(), Matd::Zero(2, 11)), D) == 0);
}

TEST_CASE("local time bound formula") {
  CHECK(local_time_bound(1, 1, 1, 0, 0, 1) == 0);
  const double e = std::exp(1.0);
  auto G = [](double beta, double delta, double r0, double a) {
    const double x = std::exp(beta * (2 * delta + a) / (2 * r0));
    return 4 * (1 + beta * x) * x;
  };
  CHECK(G(1, 1, 1, 0) == doctest::Approx(4 * (1 + e) * e).epsilon(1e-15));
  const double a = 0.5, w = 0.3, p = 1.5, g = G(1, 1, 1, a);
  const double expect = 1 * (std::pow(g / 1 + 1, p) * w + 1) * (g + 2) * a;
  CHECK(local_time_bound(1, 1, 1, a, w, p) == doctest::Approx(expect).epsilon(1e-14));
  const double g2 = G(2, 0.5, 3, 1.2);
  CHECK(local_time_bound(2, 0.5, 3, 1.2, 0.7, 2) ==
        doctest::Approx(2 * (std::pow(g2 / 0.5 + 1, 2) * 0.7 + 1) * (g2 + 2) * 1.2).epsilon(1e-14));
  CHECK(local_time_bound(1, 1, kUnbounded, 1, 1, 1) == doctest::Approx((9 * 1 + 1) * 10 * 1).epsilon(1e-15));
  CHECK_THROWS_AS(local_time_bound(1, 1, 0, 1, 1, 1), DomainError);
  CHECK_THROWS_AS(local_time_bound(1, 0, 1, 1, 1, 1), DomainError);
  CHECK_THROWS_AS(local_time_bound(0.5, 1, 1, 1, 1, 1), DomainError);
}

TEST_CASE("solver local time within the bound on half-spaces") {
  const double p = 2;
  Index violations = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const double ang = 6.283185307179586 * uniform(seed, 0);
    const Domain D = Domain::half_space(vec({std::cos(ang), std::sin(ang)}), uniform(seed, 1) - 0.5);
    const GridPathd w = random_walk(500 + seed, 2, 120, 0.1);
    const SkorohodSolution s = solve_skorohod(w, D, D.project(vec({0, 0})));
    const Controld ctrl = Controld::pvariation(w, p);
    const DomainConstants& c = D.constants();
    for (Index a = 0; a < w.size(); a += 7) {
      const std::vector<double> row = ctrl.row(a);
      for (Index b = a + 1; b < w.size(); b += 5) {
        const double bound = local_time_bound(c.beta, c.delta, c.r0, sup_norm_nodes(w, a, b), row[b - a], p);
        if (s.tv[b] - s.tv[a] > bound) ++violations;
      }
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("catalogue constants") {
  const Domain H = Domain::half_space(vec({3, 4}), 1);
  CHECK(H.constants().beta == 1);
  CHECK(H.constants().l.dot(H.normals().row(0).transpose()) == doctest::Approx(1));
  CHECK(H.constants().r0 == kUnbounded);
  CHECK(H.constants().C_D.value() == 1);
  CHECK_FALSE(H.constants().C_D_empirical);

  const Domain O = Domain::orthant(2);
  CHECK(O.constants().beta == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  for (Index i = 0; i < 2; ++i) CHECK(O.constants().l(i) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-14));

  const Domain B = Domain::ball(vec({1, -1}), 3);
  CHECK(B.constants().r0 == 3);
  CHECK(B.constants().C_D.has_value());
  CHECK(B.constants().C_D_empirical);
  CHECK_FALSE(B.constants().C_D_provenance.empty());
  CHECK(domain_constants(B).r0 == 3);

  const Domain E = Domain::ball_exterior(vec({0, 0}), 1);
  CHECK_FALSE(E.convex());
  CHECK_FALSE(E.constants().condition_c);
  CHECK_THROWS_AS(solve_skorohod(random_walk(1, 2, 10), E, vec({2, 0})), UnsupportedDomainError);
  CHECK_THROWS_AS(solve_skorohod(random_walk(1, 2, 10), B, vec({10, 0})), DomainError);
}

TEST_CASE("projection is idempotent and non-expansive") {
  for (const Domain& D : catalogue())
    for (std::uint64_t k = 0; k < 200; ++k) {
      const Vecd a = vec({6 * uniform(k, 0) - 3, 6 * uniform(k, 1) - 3});
      const Vecd b = vec({6 * uniform(k, 2) - 3, 6 * uniform(k, 3) - 3});
      const Vecd pa = D.project(a), pb = D.project(b);
      CHECK(D.contains(pa, 1e-10));
      CHECK((D.project(pa) - pa).norm() <= 1e-12);
      CHECK((pa - pb).norm() <= (a - b).norm() + 1e-12);
    }
}

TEST_CASE("inward normals and exterior tangent balls") {
  const Domain B = Domain::ball(vec({0.5, 0}), 2);
  const Domain H = Domain::half_space(vec({1, 2}), 0.3);
  for (std::uint64_t k = 0; k < 50; ++k) {
    const double ang = 6.283185307179586 * uniform(k, 5);
    const Vecd x = B.center() + 2 * vec({std::cos(ang), std::sin(ang)});
    const std::vector<Vecd> nb = B.normals_at(x);
    REQUIRE(nb.size() == 1);
    CHECK(nb[0].norm() == doctest::Approx(1).epsilon(1e-14));
    const double r0 = B.constants().r0;
    const Vecd xh = H.project(vec({4 * uniform(k, 6) - 2, 4 * uniform(k, 7) - 2}) - 10 * H.normals().row(0).transpose());
    const std::vector<Vecd> nh = H.normals_at(xh);
    REQUIRE(nh.size() == 1);
    for (std::uint64_t j = 0; j < 20; ++j) {
      const Vecd u = vec({2 * uniform(k * 50 + j, 8) - 1, 2 * uniform(k * 50 + j, 9) - 1});
      if (u.norm() >= 1) continue;
      CHECK_FALSE(B.contains(x - r0 * nb[0] + 0.999 * r0 * u, 0));
      CHECK_FALSE(H.contains(xh - 1e3 * nh[0] + 0.999e3 * u, 0));
    }
  }
}

TEST_CASE("local time controlled by the driver oscillation") {
  for (const Domain& D : catalogue()) {
    const double CD = *D.constants().C_D;
    double worst = 0, lip = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const GridPathd w = random_walk(900 + seed, 2, 80, 0.15);
      const GridPathd w2(w.times(), w.values() + random_walk(1900 + seed, 2, 80, 0.02).values());
      const Vecd y0 = D.project(vec({0.1, 0.1}));
      const SkorohodSolution s = solve_skorohod(w, D, y0), s2 = solve_skorohod(w2, D, y0);
      for (Index a = 0; a < w.size(); a += 9)
        for (Index b = a + 5; b < w.size(); b += 11) {
          const double osc = sup_norm_nodes(w, a, b);
          if (osc > 0) worst = std::max(worst, (s.tv[b] - s.tv[a]) / osc);
        }
      double dphi = 0, dw = 0;
      for (Index k = 0; k < w.size(); ++k) {
        dphi = std::max(dphi, (s.phi.point(k) - s2.phi.point(k)).norm());
        dw = std::max(dw, (w.point(k) - w2.point(k)).norm());
      }
      lip = std::max(lip, dphi / dw);
    }
    CHECK(worst <= CD);
    // The map is Lipschitz in sup norm for the explicit shapes.
    if (D.shape() == Domain::Shape::HalfSpace || D.shape() == Domain::Shape::Orthant) CHECK(lip <= 2 * CD);
  }
}

TEST_CASE("grid refinement changes the solution by the mesh modulus") {
  const Domain D = Domain::ball(vec({0, 0}), 0.5);
  const BrownianSample B = sample_brownian(8, 2, 13);
  std::vector<double> gaps;
  for (int L = 6; L <= 12; ++L) {
    const GridPathd c = dyadic_nodes(B, L), f = dyadic_nodes(B, L + 1);
    const SkorohodSolution a = solve_skorohod(c, D, vec({0, 0})), b = solve_skorohod(f, D, vec({0, 0}));
    double gap = 0, mod = 0;
    for (Index k = 0; k < c.size(); ++k) gap = std::max(gap, (a.xi.point(k) - b.xi.point(2 * k)).norm());
    for (Index k = 0; k + 1 < f.size(); ++k) mod = std::max(mod, (f.point(k + 1) - f.point(k)).norm());
    CHECK(gap <= 4 * mod);
    gaps.push_back(gap);
  }
  CHECK(gaps.back() < gaps.front());
}
