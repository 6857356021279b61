#include "rrde/brownian.hpp"

#include <algorithm>
#include <cmath>

#include "rrde/errors.hpp"
#include "rrde/rng.hpp"

namespace rrde {

std::vector<double> dyadic_times(int L, double T) {
  const Index m = Index(1) << L;
  std::vector<double> t(static_cast<std::size_t>(m + 1));
  const double inv = std::ldexp(1.0, -L);
  for (Index k = 0; k <= m; ++k) t[k] = static_cast<double>(k) * T * inv;
  t[m] = T;
  return t;
}

BrownianSample sample_brownian(std::uint64_t seed, Index n, int Nmax, double T) {
  if (Nmax < 0 || Nmax > kMaxDyadicLevel) throw BudgetError("sample_brownian: Nmax must lie in [0, 24]");
  if (n < 1 || !(T > 0)) throw DomainError("sample_brownian: need n >= 1 and T > 0");
  const Index m = Index(1) << Nmax;
  const double sd = std::sqrt(T * std::ldexp(1.0, -Nmax));
  Matd v(n, m + 1);
  for (Index i = 0; i < n; ++i) {
    const std::uint64_t key = stream_key(seed, static_cast<std::uint64_t>(i));
    v(i, 0) = 0;
    for (Index k = 0; k < m; ++k) v(i, k + 1) = v(i, k) + sd * counter_normal(key, static_cast<std::uint64_t>(k));
  }
  return BrownianSample{seed, n, Nmax, T, GridPathd(dyadic_times(Nmax, T), std::move(v))};
}

GridPathd dyadic_nodes(const BrownianSample& B, int N) { return dyadic_refine_on(B, N, N); }

GridPathd dyadic_refine(const BrownianSample& B, int N) { return dyadic_refine_on(B, N, B.Nmax); }

GridPathd dyadic_refine_on(const BrownianSample& B, int N, int L) {
  if (N < 0 || N > L || L > B.Nmax) throw DomainError("dyadic_refine: need 0 <= N <= L <= Nmax");
  const Index cells = Index(1) << N, sub = Index(1) << (L - N), fine = Index(1) << (B.Nmax - L);
  const Matd& b = B.path.values();
  Matd v(B.n, cells * sub + 1);
  for (Index k = 0; k < cells; ++k) {
    const auto lo = b.col(k * sub * fine), hi = b.col((k + 1) * sub * fine);
    v.col(k * sub) = lo;
    for (Index j = 1; j < sub; ++j) {
      const double lam = static_cast<double>(j) / static_cast<double>(sub);
      v.col(k * sub + j) = (1 - lam) * lo + lam * hi;
    }
  }
  v.col(cells * sub) = b.col(b.cols() - 1);
  return GridPathd(dyadic_times(L, B.T), std::move(v));
}

RoughPathd brownian_lift(const BrownianSample& B, int N, double p) { return brownian_lift_on(B, N, p, N, true); }

RoughPathd brownian_lift_on(const BrownianSample& B, int N, double p, int L, bool certify) {
  if (!(p > 2 && p < 3)) throw DomainError("brownian_lift: p must lie in (2, 3)");
  RoughPathd X = lift_piecewise_linear(dyadic_refine_on(B, N, L), p);
  if (!certify) return X;
  Controld c = rough_control(X);
  return X.with_certificate(std::move(c));
}

GridPathd sample_fbm(std::uint64_t seed, Index n, double H, int N, double T) {
  if (!(H > 0 && H < 1)) throw DomainError("sample_fbm: H must lie in (0, 1)");
  if (N < 1 || N > 11) throw BudgetError("sample_fbm: N must lie in [1, 11]");
  const Index m = Index(1) << N;
  const std::vector<double> t = dyadic_times(N, T);
  Matd C(m, m);
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b) {
      const double s = t[a + 1], u = t[b + 1];
      C(a, b) = 0.5 * (std::pow(s, 2 * H) + std::pow(u, 2 * H) - std::pow(std::abs(s - u), 2 * H));
    }
  const Eigen::LLT<Matd> llt(C);
  if (llt.info() != Eigen::Success) throw DomainError("sample_fbm: covariance factorisation failed");
  Matd v = Matd::Zero(n, m + 1);
  Vecd g(m);
  for (Index i = 0; i < n; ++i) {
    const std::uint64_t key = stream_key(seed, static_cast<std::uint64_t>(i));
    for (Index k = 0; k < m; ++k) g(k) = counter_normal(key, static_cast<std::uint64_t>(k));
    v.row(i).tail(m) = (llt.matrixL() * g).transpose();
  }
  return GridPathd(t, std::move(v));
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

// sup over grid pairs of |x_t - x_s| / (t - s)^{1/p}.
double holder_quotient(const GridPathd& x, double p) {
  detail::InvPowTable<double> w(x.times(), 1 / p);
  double r = 0;
  for (Index a = 0; a + 1 < x.size(); ++a)
    for (Index b = a + 1; b < x.size(); ++b) r = std::max(r, (x.point(b) - x.point(a)).norm() * w(a, b));
  return r;
}

}  // namespace

RoughStats rough_convergence_stats(std::uint64_t seed, Index samples, Index n, const std::vector<int>& Nrange, double p,
                                   double q, double T) {
  if (!(p > 2 && p < 3) || q < 1) throw DomainError("rough_convergence_stats: need p in (2, 3) and q >= 1");
  if (Nrange.empty() || samples < 1) throw DomainError("rough_convergence_stats: empty range or sample set");
  const int top = *std::max_element(Nrange.begin(), Nrange.end()) + 1;
  RoughStats st;
  st.p = p;
  st.q = q;
  std::vector<std::vector<double>> gaps(Nrange.size()), Cs(Nrange.size()), hq(Nrange.size());
  for (Index s = 0; s < samples; ++s) {
    const BrownianSample B = sample_brownian(derive_seed(seed, static_cast<std::uint64_t>(s)), n, top, T);
    for (std::size_t r = 0; r < Nrange.size(); ++r) {
      const int N = Nrange[r];
      const RoughPathd X = lift_piecewise_linear(dyadic_nodes(B, N), p);
      Cs[r].push_back(rough_constant(X));
      hq[r].push_back(holder_quotient(X.base(), 1.9));
      const RoughPathd a = brownian_lift_on(B, N, p, N + 1, false);
      const RoughPathd b = brownian_lift_on(B, N + 1, p, N + 1, false);
      gaps[r].push_back(dp_distance(a, b));
    }
  }
  for (std::size_t r = 0; r < Nrange.size(); ++r) {
    RoughStatsRow row;
    row.N = Nrange[r];
    row.dp_gap = median(gaps[r]);
    for (std::size_t i = 0; i < Cs[r].size(); ++i) {
      row.C_mean += Cs[r][i];
      row.C_q_mean += std::pow(Cs[r][i], q);
      row.holder_low += hq[r][i];
    }
    row.C_mean /= static_cast<double>(samples);
    row.C_q_mean /= static_cast<double>(samples);
    row.holder_low /= static_cast<double>(samples);
    st.rows.push_back(row);
  }
  st.dp_gap_decreasing = st.holder_low_grows = true;
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (std::size_t r = 0; r < st.rows.size(); ++r) {
    lo = std::min(lo, st.rows[r].C_mean);
    hi = std::max(hi, st.rows[r].C_mean);
    if (r > 0) {
      st.dp_gap_decreasing = st.dp_gap_decreasing && st.rows[r].dp_gap < st.rows[r - 1].dp_gap;
      st.holder_low_grows = st.holder_low_grows && st.rows[r].holder_low > st.rows[r - 1].holder_low;
    }
  }
  st.C_uniform = hi < 1.2 * lo;
  return st;
}

}  // namespace rrde
