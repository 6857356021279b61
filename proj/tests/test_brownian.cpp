#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rrde/brownian.hpp"
#include "rrde/rng.hpp"

using namespace rrde;

namespace {

double sup_dist(const GridPathd& a, const GridPathd& b) {
  double r = 0;
  for (Index k = 0; k < a.size(); ++k) r = std::max(r, (a.point(k) - b.point(k)).norm());
  return r;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

TEST_CASE("sampling") {
  SUBCASE("pinned start and determinism") {
    for (std::uint64_t seed : {0ull, 1ull, 0xfeedull}) {
      const BrownianSample a = sample_brownian(seed, 3, 10), b = sample_brownian(seed, 3, 10);
      CHECK(a.path.point(0).cwiseAbs().maxCoeff() == 0);
      CHECK(a.path.values() == b.path.values());
      CHECK(a.path.size() == 1025);
    }
    CHECK(sample_brownian(1, 2, 8).path.values() != sample_brownian(2, 2, 8).path.values());
  }
  SUBCASE("increment variance") {
    const int N = 10;
    const Index S = 10000;
    const double dt = 1.0 / 1024;
    const std::vector<Index> steps{0, 1, 17, 511, 1023};
    std::vector<double> m2(steps.size(), 0), m4(steps.size(), 0);
    for (Index s = 0; s < S; ++s) {
      const BrownianSample B = sample_brownian(derive_seed(42, static_cast<std::uint64_t>(s)), 1, N);
      for (std::size_t i = 0; i < steps.size(); ++i) {
        const double d = B.path.point(steps[i] + 1)(0) - B.path.point(steps[i])(0);
        m2[i] += d * d;
        m4[i] += d * d * d * d;
      }
    }
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const double mean = m2[i] / S;
      const double se = std::sqrt((m4[i] / S - mean * mean) / S);
      CHECK(std::abs(mean - dt) <= 3 * se);
    }
  }
  SUBCASE("level guard") {
    CHECK_THROWS_AS(sample_brownian(1, 1, kMaxDyadicLevel + 1), BudgetError);
  }
}

TEST_CASE("dyadic approximants") {
  const BrownianSample B = sample_brownian(7, 2, 12);
  SUBCASE("exact at nodes, affine between") {
    const int N = 6;
    const GridPathd r = dyadic_refine(B, N);
    const Index stride = Index(1) << (12 - N);
    for (Index k = 0; k < B.path.size(); k += stride) CHECK(r.point(k) == B.path.point(k));
    double second = 0;
    for (Index k = 1; k + 1 < r.size(); ++k)
      if (k % stride != 0) second = std::max(second, (r.point(k + 1) - 2 * r.point(k) + r.point(k - 1)).cwiseAbs().maxCoeff());
    CHECK(second <= 1e-14);
    CHECK_THROWS_AS(dyadic_refine(B, 13), DomainError);
  }
  SUBCASE("nested consistency") {
    for (int N = 2; N < 12; ++N) {
      const GridPathd a = dyadic_nodes(B, N), b = dyadic_nodes(B, N + 1);
      for (Index k = 0; k < a.size(); ++k) CHECK(a.point(k) == b.point(2 * k));
      CHECK(dyadic_times(N, 1)[3] == dyadic_times(N + 1, 1)[6]);
    }
  }
  SUBCASE("sup distance decreases") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const BrownianSample b = sample_brownian(derive_seed(5, s), 2, 12);
      double prev = std::numeric_limits<double>::infinity();
      for (int N : {2, 4, 6, 8, 10}) {
        const double d = sup_dist(dyadic_refine(b, N), b.path);
        CHECK(d < prev);
        prev = d;
      }
    }
  }
}

TEST_CASE("lifts") {
  SUBCASE("geometric and Chen") {
    const BrownianSample B = sample_brownian(11, 2, 12);
    for (int N : {4, 8, 12}) {
      const RoughPathd X = lift_piecewise_linear(dyadic_nodes(B, N), 2.5);
      const double sc = rough_scale(X);
      const std::uint64_t key = stream_key(3, static_cast<std::uint64_t>(N));
      for (std::uint64_t r = 0; r < 200; ++r) {
        Index v[3];
        for (int i = 0; i < 3; ++i) v[i] = static_cast<Index>(counter_uniform(key, 3 * r + i) * X.size()) % X.size();
        std::sort(v, v + 3);
        CHECK(chen_defect_nodes(X, v[0], v[1], v[2]) <= 1e-10 * sc);
        CHECK(geometric_defect_nodes(X, v[0], v[2]) <= 1e-10 * sc);
      }
    }
  }
  SUBCASE("certificate") {
    const RoughPathd X = brownian_lift(sample_brownian(12, 2, 8), 8, 2.5);
    REQUIRE(X.certificate());
    CHECK(certificate_excess(X, *X.certificate()) <= 1e-12);
    CHECK(X.certificate()->constant() == doctest::Approx(rough_constant(X)));
    CHECK_THROWS_AS(brownian_lift(sample_brownian(12, 2, 8), 8, 2.0), DomainError);
  }
  SUBCASE("Levy area variance") {
    // Var(A_1) = 1/4 for the area (1/2) int (x dy - y dx); the level-12
    // interpolant carries (1 - 2^-12) of it.
    const Index S = 10000;
    double m2 = 0, m4 = 0;
    for (Index s = 0; s < S; ++s) {
      const GridPathd b = dyadic_nodes(sample_brownian(derive_seed(19, static_cast<std::uint64_t>(s)), 2, 12), 12);
      const RoughPathd X = lift_piecewise_linear(b, 2.5);
      const Matd M = X.X2(0, X.size() - 1);
      const double a = 0.5 * (M(0, 1) - M(1, 0));
      m2 += a * a;
      m4 += a * a * a * a;
    }
    const double mean = m2 / S, se = std::sqrt((m4 / S - mean * mean) / S);
    CHECK(std::abs(mean - 0.25) <= 3 * se);
  }
  SUBCASE("consecutive d_p distances shrink") {
    std::vector<double> med;
    for (int N : {8, 10, 12}) {
      std::vector<double> g;
      for (std::uint64_t s = 0; s < 20; ++s) {
        const BrownianSample B = sample_brownian(derive_seed(77, s), 2, 13);
        g.push_back(dp_distance(brownian_lift_on(B, N, 2.5, N + 1, false), brownian_lift_on(B, N + 1, 2.5, N + 1, false)));
      }
      med.push_back(median(g));
    }
    CHECK(med[1] < med[0]);
    CHECK(med[2] < med[1]);
  }
}

TEST_CASE("moment statistics") {
  const RoughStats r = rough_convergence_stats(9, 20, 2, {8, 9, 10, 11}, 2.5, 2);
  REQUIRE(r.rows.size() == 4);
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (const auto& w : r.rows) {
    lo = std::min(lo, w.C_mean);
    hi = std::max(hi, w.C_mean);
    CHECK(w.C_q_mean >= w.C_mean * w.C_mean);
  }
  CHECK(hi / lo < 1.2);
  CHECK(r.C_uniform);
  CHECK(r.dp_gap_decreasing);
  CHECK(r.holder_low_grows);
}

TEST_CASE("fractional Brownian motion") {
  // Var(B^H_t) = t^{2H}, checked at t = 1/2 and 1.
  const Index S = 2000;
  const double H = 0.7;
  double v1 = 0, vh = 0;
  for (Index s = 0; s < S; ++s) {
    const GridPathd x = sample_fbm(derive_seed(3, static_cast<std::uint64_t>(s)), 1, H, 6);
    v1 += x.point(64)(0) * x.point(64)(0);
    vh += x.point(32)(0) * x.point(32)(0);
  }
  v1 /= S;
  vh /= S;
  const double se = std::sqrt(2.0 / S);
  CHECK(std::abs(v1 - 1) <= 3 * se);
  CHECK(std::abs(vh - std::pow(0.5, 2 * H)) <= 3 * se * std::pow(0.5, 2 * H));
  CHECK(sample_fbm(3, 1, H, 6).point(0)(0) == 0);
  CHECK_THROWS_AS(sample_fbm(1, 1, H, 12), BudgetError);
}
