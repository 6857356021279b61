#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "rrde/rng.hpp"
#include "rrde/skorohod.hpp"
#include "rrde/wongzakai.hpp"

using namespace rrde;

namespace {

Vecd vec(std::initializer_list<double> v) {
  Vecd r(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

const Domain& halfspace() {
  static const Domain D = Domain::half_space(vec({1, 0}), 0);
  return D;
}

const VectorField& field() {
  static const VectorField s = VectorField::smooth(2, 2, 1, 0.1, 1);
  return s;
}

}  // namespace

TEST_CASE("reference solution") {
  SUBCASE("identity field is the Skorohod map of the finest approximant") {
    const BrownianSample B = sample_brownian(4, 2, 10);
    const ReferenceSolution r = reference_solution(B, VectorField::identity(2), halfspace(), vec({0.05, 0}), 2.5, 10);
    const SkorohodSolution s = solve_skorohod(dyadic_nodes(B, 10), halfspace(), vec({0.05, 0}));
    for (Index k = 0; k < s.xi.size(); ++k) CHECK((r.sol.Y.point(k) - s.xi.point(k)).norm() <= 1e-12);
  }
  SUBCASE("self-consistency gap shrinks") {
    // Pathwise the gap is a single sup and not monotone; its mean square is.
    std::vector<double> g(3, 0);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const BrownianSample B = sample_brownian(derive_seed(31, s), 2, 11);
      int i = 0;
      for (int L : {7, 9, 11}) g[i++] += std::pow(reference_solution(B, field(), halfspace(), vec({0.1, 0}), 2.5, L).self_gap, 2);
    }
    CHECK(g[1] < g[0]);
    CHECK(g[2] < g[1]);
  }
  SUBCASE("projected Stratonovich Euler agrees in the mean") {
    // The uncorrected projected Euler scheme serves as a negative control.
    const Index S = 1000;
    const int L = 10;
    std::vector<double> diff[2], ito[2];
    for (Index i = 0; i < S; ++i) {
      const BrownianSample B = sample_brownian(derive_seed(8, static_cast<std::uint64_t>(i)), 2, L);
      const ReferenceSolution r = reference_solution(B, field(), halfspace(), vec({0.1, 0}), 2.5, L);
      const GridPathd e = stratonovich_projection_euler(B, field(), halfspace(), vec({0.1, 0}), L);
      Vecd y = vec({0.1, 0});
      for (Index k = 0; k + 1 < B.path.size(); ++k)
        y = halfspace().project(y + field().sigma(y) * (B.path.point(k + 1) - B.path.point(k)));
      const Vecd yr = r.sol.Y.point(r.sol.Y.size() - 1);
      for (int c = 0; c < 2; ++c) {
        diff[c].push_back(yr(c) - e.point(e.size() - 1)(c));
        ito[c].push_back(yr(c) - y(c));
      }
    }
    auto stats = [&](const std::vector<double>& d) {
      const double m = pairwise_sum(d.data(), d.size()) / S;
      double v = 0;
      for (double x : d) v += (x - m) * (x - m);
      return std::make_pair(m, std::sqrt(v / (S - 1) / S));
    };
    double worst_ito = 0;
    for (int c = 0; c < 2; ++c) {
      const auto [m, se] = stats(diff[c]);
      CAPTURE(c);
      CHECK(std::abs(m) <= 3 * se + 0.005);
      const auto [mi, sei] = stats(ito[c]);
      worst_ito = std::max(worst_ito, std::abs(mi) - 3 * sei - 0.005);
    }
    CHECK(worst_ito > 0);
  }
  SUBCASE("errors") {
    const BrownianSample B = sample_brownian(4, 2, 8);
    CHECK_THROWS_AS(reference_solution(B, field(), halfspace(), vec({0.1, 0}), 2.5, 9), DomainError);
    CHECK_THROWS_AS(reference_solution(B, field(), halfspace(), vec({0.1, 0}), 2.0, 8), RegimeError);
    CHECK_THROWS_AS(reference_solution(B, field(), Domain::ball_exterior(vec({0, 0}), 0.05), vec({1, 0}), 2.5, 8),
                    UnsupportedDomainError);
  }
}

TEST_CASE("constant field reductions") {
  Matd M(2, 2);
  M << 1, 0.2, -0.1, 0.8;
  const VectorField k = VectorField::constant(M);
  const std::vector<int> Ns{3, 4, 5};
  SUBCASE("the scheme on B is exact") {
    const ConvergenceReport r = wz_error_curve(k, halfspace(), vec({0.1, 0}), Ns, 5, 2.5, 17);
    for (double e : r.mean_sq_err) CHECK(e <= 1e-24);
  }
  SUBCASE("integral gap is the sup distance of the approximants") {
    const Index S = 5;
    const ConvergenceReport r = integral_gap_curve(k, halfspace(), vec({0.1, 0}), Ns, S, 17);
    for (std::size_t j = 0; j < Ns.size(); ++j) {
      double acc = 0;
      for (Index s = 0; s < S; ++s) {
        const BrownianSample B = sample_brownian(derive_seed(17, static_cast<std::uint64_t>(s)), 2, r.Nref);
        const GridPathd a = dyadic_refine_on(B, Ns[j], r.Nref), b = dyadic_nodes(B, r.Nref);
        double m = 0;
        for (Index i = 0; i < a.size(); ++i) m = std::max(m, (M * (a.point(i) - b.point(i))).squaredNorm());
        acc += m;
      }
      CHECK(r.mean_sq_err[j] == doctest::Approx(acc / S).epsilon(1e-10));
    }
  }
}

TEST_CASE("error curves") {
  const std::vector<int> Ns{4, 5, 6, 7};
  const auto [e, g] = wz_study(field(), halfspace(), vec({0.1, 0}), Ns, 30, 2.5, 99);
  CHECK(e.Nref == 10);
  CHECK(e.samples == 30);
  for (Index f : e.samples_failed) CHECK(f == 0);
  CHECK(e.strictly_decreasing);
  CHECK(e.gate);
  CHECK(e.within_budget);
  CHECK(e.fit.slope <= -1.2);
  CHECK(e.theory_slope == doctest::Approx(-1.6));
  CHECK(e.fit.residuals.size() == Ns.size());
  CHECK(g.strictly_decreasing);
  CHECK(g.fit.slope <= -0.1);
  CHECK(std::isfinite(e.self_gap_mean));
  SUBCASE("reproducible") {
    const auto [e2, g2] = wz_study(field(), halfspace(), vec({0.1, 0}), Ns, 30, 2.5, 99);
    CHECK(e2.mean_sq_err == e.mean_sq_err);
    CHECK(g2.mean_sq_err == g.mean_sq_err);
    CHECK(e2.fit.slope == e.fit.slope);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(wz_error_curve(field(), halfspace(), vec({0.1, 0}), Ns, 2, 2.5, 1, WZOptions{7}), DomainError);
    CHECK_THROWS_AS(wz_error_curve(field(), halfspace(), vec({0.1, 0}), {}, 2, 2.5, 1), DomainError);
    CHECK_THROWS_AS(wz_error_curve(field(), halfspace(), vec({0.1, 0}), Ns, 2, 3.0, 1), RegimeError);
  }
}

TEST_CASE("pairwise summation") {
  std::vector<double> v;
  long double exact = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    v.push_back(counter_uniform(stream_key(1, 2), i) * 1e-3 + 1);
    exact += v.back();
  }
  CHECK(std::abs(pairwise_sum(v.data(), v.size()) - static_cast<double>(exact)) <= 1e-12);
  CHECK(pairwise_sum(v.data(), 0) == 0);
  CHECK(pairwise_sum(v.data(), 3) == v[0] + v[1] + v[2]);
}
