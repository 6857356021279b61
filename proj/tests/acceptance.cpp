// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "helpers.hpp"
#include "rrde/brownian.hpp"
#include "rrde/cli.hpp"
#include "rrde/control.hpp"
#include "rrde/rough_reflect.hpp"
#include "rrde/skorohod.hpp"
#include "rrde/wongzakai.hpp"
#include "rrde/young_reflect.hpp"

using namespace rrde;
using namespace testutil;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

Vecd vec2(double a, double b) {
  Vecd v(2);
  v << a, b;
  return v;
}

const Domain& halfspace() {
  static const Domain D = Domain::half_space(vec2(1, 0), 0);
  return D;
}

const VectorField& field() {
  static const VectorField s = VectorField::smooth(2, 2, 1, 0.1, 1);
  return s;
}

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome skorohod_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const double ang = 6.283185307179586 * uniform(7100 + s, 0);
    const Domain D = Domain::half_space(vec2(std::cos(ang), std::sin(ang)), uniform(7100 + s, 1) - 0.5);
    const GridPathd w = random_walk(7100 + s, 2, 512, 0.05);
    const Vecd y0 = D.project(vec2(0, 0));
    const SkorohodSolution a = solve_skorohod(w, D, y0), b = solve_skorohod_projection(w, D, y0);
    for (Index k = 0; k < w.size(); ++k) worst = std::max(worst, (a.xi.point(k) - b.xi.point(k)).norm());
  }
  const double sec = seconds_since(t0);
  return {worst <= 1e-10 && sec < 5, "sup gap " + fmt(worst) + ", " + fmt(sec) + " s"};
}

Outcome local_time_bounds() {
  const double p = 2;
  Index violations = 0, pairs = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const double ang = 6.283185307179586 * uniform(7200 + s, 0);
    const Domain D = Domain::half_space(vec2(std::cos(ang), std::sin(ang)), uniform(7200 + s, 1) - 0.5);
    const GridPathd w = random_walk(7200 + s, 2, 200, 0.1);
    const SkorohodSolution sol = solve_skorohod(w, D, D.project(vec2(0, 0)));
    const Controld ctrl = Controld::pvariation(w, p);
    const DomainConstants& c = D.constants();
    for (Index a = 0; a < w.size(); ++a) {
      const std::vector<double> row = ctrl.row(a);
      for (Index b = a + 1; b < w.size(); ++b, ++pairs) {
        const double bound = local_time_bound(c.beta, c.delta, c.r0, sup_norm_nodes(w, a, b), row[b - a], p);
        if (sol.tv[b] - sol.tv[a] > bound) ++violations;
      }
    }
  }
  return {violations == 0, std::to_string(violations) + " violations over " + std::to_string(pairs) + " intervals"};
}

Outcome lift_identities() {
  double chen = 0, sym = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const BrownianSample B = sample_brownian(derive_seed(7300, s), 2, 12);
    for (int N = 1; N <= 12; ++N) {
      const RoughPathd X = brownian_lift(B, N, 2.5);
      const double sc = rough_scale(X);
      const Index n = X.size();
      for (Index a = 0; a < n; ++a)
        for (Index b = a + 1; b < n; ++b) sym = std::max(sym, geometric_defect_nodes(X, a, b) / sc);
      const std::uint64_t key = stream_key(7300 + s, static_cast<std::uint64_t>(N));
      for (std::uint64_t r = 0; r < 2000; ++r) {
        Index v[3];
        for (int i = 0; i < 3; ++i) v[i] = static_cast<Index>(counter_uniform(key, 3 * r + i) * n) % n;
        std::sort(v, v + 3);
        chen = std::max(chen, chen_defect_nodes(X, v[0], v[1], v[2]) / sc);
      }
    }
  }
  return {chen <= 1e-10 && sym <= 1e-10, "Chen " + fmt(chen) + ", symmetric part " + fmt(sym) + " (relative)"};
}

Outcome young_remainder() {
  const auto t0 = std::chrono::steady_clock::now();
  const double p = 1.6, gamma = 2;
  double lo = 1e300, within = 0;
  for (std::uint64_t seed = 1000; seed < 1010; ++seed) {
    const GridPathd x = sample_fbm(seed, 2, 0.6, 11);
    const Controld c = Controld::pvariation(x, p);
    const ReflectedSolution sol = solve_reflected_young(x, field(), halfspace(), vec2(0.1, 0), p);
    const DefectReport r = defect_profile_I(sol, x, field(), c, p, 2, 1.0);
    lo = std::min(lo, r.slope);
    within = std::max(within, r.within_step_max);
  }
  const double sec = seconds_since(t0);
  return {lo >= gamma / p - 0.15 && sec < 60,
          "min slope " + fmt(lo) + " (need " + fmt(gamma / p - 0.15) + "), within-step " + fmt(within) + ", " +
              fmt(sec) + " s"};
}

Outcome rough_remainder() {
  const double p = 2.5, gamma = 3;
  double lo = 1e300, within = 0;
  for (std::uint64_t seed = 2000; seed < 2010; ++seed) {
    const RoughPathd X = brownian_lift(sample_brownian(seed, 2, 10), 10, p);
    const ReflectedSolution s = solve_reflected_rough(X, field(), halfspace(), vec2(0.1, 0), p, 0.5);
    const DefectReport r = defect_profile_J(s, X, field(), rough_control(X), p);
    lo = std::min(lo, r.slope);
    within = std::max(within, r.within_step_max);
  }
  return {within <= 1e-12 && lo >= gamma / p - 0.2,
          "min slope " + fmt(lo) + " (need " + fmt(gamma / p - 0.2) + "), within-step " + fmt(within)};
}

Outcome coincidence() {
  const VectorField s = VectorField::smooth(2, 2, 1, 0.3, 2);
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    double c[2][3], f[2][3];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) {
        c[i][j] = 0.5 * (2 * uniform(7600 + seed, 6 * i + j) - 1);
        f[i][j] = 1 + 6 * uniform(7600 + seed, 100 + 6 * i + j);
      }
    const GridPathd x = from_function(2, 513, [&](double t) {
      Vecd v = Vecd::Zero(2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) v(i) += c[i][j] * std::sin(f[i][j] * t);
      return v;
    });
    double mesh = 0;
    for (Index k = 0; k + 1 < x.size(); ++k) mesh = std::max(mesh, (x.point(k + 1) - x.point(k)).norm());
    const ReflectedSolution r = solve_reflected_rough(lift_piecewise_linear(x, 2.5), s, halfspace(), vec2(0.01, 0), 2.5);
    const ReflectedSolution y = solve_reflected_young(x, s, halfspace(), vec2(0.01, 0), 1.0);
    for (Index k = 0; k < x.size(); ++k) worst = std::max(worst, (r.Y.point(k) - y.Y.point(k)).norm() / mesh);
  }
  return {worst <= 10, "worst gap " + fmt(worst) + " mesh moduli"};
}

Outcome apriori_constants() {
  double worst = 1;
  for (std::uint64_t seed = 3000; seed < 3010; ++seed) {
    const BrownianSample B = sample_brownian(seed, 2, 14);
    double ylo = 1e300, yhi = 0, plo = 1e300, phi = 0;
    for (int N = 12; N <= 14; ++N) {
      const ReflectedSolution s = solve_reflected_rough(brownian_lift(B, N, 2.5), field(), halfspace(), vec2(0.05, 0), 2.5);
      ylo = std::min(ylo, s.constants.C_Y);
      yhi = std::max(yhi, s.constants.C_Y);
      plo = std::min(plo, s.constants.C_Phi);
      phi = std::max(phi, s.constants.C_Phi);
    }
    worst = std::max({worst, yhi / ylo, phi / plo});
  }
  return {worst < 1.5, "worst max/min " + fmt(worst)};
}

std::string curve(const ConvergenceReport& r) {
  std::string s;
  for (std::size_t j = 0; j < r.N.size(); ++j)
    s += (j ? " " : "") + std::to_string(r.N[j]) + ":" + fmt(r.mean_sq_err[j]);
  return s;
}

Index failed(const ConvergenceReport& r) {
  Index f = 0;
  for (Index x : r.samples_failed) f += x;
  return f;
}

Outcome golden() {
  const fs::path dir = RRDE_GOLDEN;
  const fs::path tmp = fs::temp_directory_path() / "rrde_acceptance";
  fs::create_directories(tmp);
  std::ifstream cases(dir / "cases.txt");
  std::string cmd, file, bad;
  int n = 0;
  while (cases >> cmd >> file) {
    Config c = Config::load((dir / (file + ".cfg")).string());
    c.set("command", cmd);
    c.set("out", (tmp / (cmd + ".csv")).string());
    std::ostringstream log;
    const auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::stringstream s;
      s << in.rdbuf();
      return s.str();
    };
    ++n;
    if (run(c, log) != kOk || slurp(tmp / (cmd + ".csv")) != slurp(dir / "expected" / (cmd + ".csv"))) bad += " " + cmd;
  }
  return {n > 0 && bad.empty(), std::to_string(n) + " configs" + (bad.empty() ? "" : ", differ:" + bad)};
}

}  // namespace

int main() {
  int failures = 0;
  const auto report = [&](int id, const std::string& name, const std::function<Outcome()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  };
  report(1, "Skorohod oracle equivalence", skorohod_oracle);
  report(2, "local time bound", local_time_bounds);
  report(3, "Chen and geometric identities", lift_identities);
  report(4, "Young remainder scaling", young_remainder);
  report(5, "rough remainder scaling", rough_remainder);
  report(6, "rough and Young solvers coincide", coincidence);
  report(7, "a-priori constants", apriori_constants);

  // One reference solve per sample feeds both Wong-Zakai curves.
  ConvergenceReport err, gap;
  double wz_seconds = 0;
  std::string wz_error;
  try {
    const auto t0 = std::chrono::steady_clock::now();
    std::tie(err, gap) = wz_study(field(), halfspace(), vec2(0.1, 0), {5, 6, 7, 8, 9, 10}, 1000, 2.5, 20261014);
    wz_seconds = seconds_since(t0);
  } catch (const std::exception& e) {
    wz_error = e.what();
  }
  report(8, "Wong-Zakai rate", [&]() -> Outcome {
    if (!wz_error.empty()) return {false, "exception: " + wz_error};
    return {err.strictly_decreasing && err.fit.slope <= -1.2 && err.within_budget && wz_seconds < 1800,
            "slope " + fmt(err.fit.slope) + " +- " + fmt(err.fit.halfwidth) + " (theory " + fmt(err.theory_slope) +
                "), " + curve(err) + ", failed samples " + std::to_string(failed(err)) + ", " + fmt(wz_seconds) +
                " s"};
  });
  report(9, "integral gap trend", [&]() -> Outcome {
    if (!wz_error.empty()) return {false, "exception: " + wz_error};
    return {gap.strictly_decreasing && gap.fit.slope <= -0.1,
            "slope " + fmt(gap.fit.slope) + " +- " + fmt(gap.fit.halfwidth) + ", " + curve(gap)};
  });
  report(10, "golden determinism", golden);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
