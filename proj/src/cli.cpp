#include "rrde/cli.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "rrde/brownian.hpp"
#include "rrde/rough_reflect.hpp"
#include "rrde/skorohod.hpp"
#include "rrde/wongzakai.hpp"
#include "rrde/young_reflect.hpp"

namespace rrde {

namespace {

// "name(k=v,k=v)" -> name and arguments; a bare name has no arguments.
bool split_call(const std::string& spec, std::string& name, Config& args) {
  const auto open = spec.find('(');
  if (open == std::string::npos) {
    name = spec;
    return false;
  }
  if (spec.back() != ')') throw ConfigError("malformed specification '" + spec + "'");
  name = spec.substr(0, open);
  std::string body = spec.substr(open + 1, spec.size() - open - 2);
  std::string text;
  for (char c : body) text += c == ',' ? '\n' : c;
  // Values such as matrices use spaces, so commas only separate arguments.
  args = Config::parse(text, spec);
  return true;
}

Matd reals_matrix(const std::string& text, Index rows, Index cols, const std::string& what) {
  const std::vector<double> v = parse_reals(text);
  if (static_cast<Index>(v.size()) != rows * cols)
    throw ConfigError(what + ": expected " + std::to_string(rows * cols) + " entries");
  Matd M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) M(i, j) = v[i * cols + j];
  return M;
}

Vecd reals_vector(const std::string& text, const std::string& what) {
  const std::vector<double> v = parse_reals(text);
  if (v.empty()) throw ConfigError(what + ": empty vector");
  return Eigen::Map<const Vecd>(v.data(), static_cast<Index>(v.size()));
}

VectorField sigma_from(const std::string& kind, const Config& a) {
  const Index d = a.integer("d");
  if (kind == "identity") return VectorField::identity(d);
  const Index n = a.integer_or("n", d);
  if (kind == "zero") return VectorField::zero(d, n);
  if (kind == "constant") return VectorField::constant(reals_matrix(a.get("matrix"), d, n, "constant matrix"));
  if (kind == "smooth")
    return VectorField::smooth(d, n, a.number_or("base", 1), a.number_or("amp", 0.1), a.number_or("freq", 1));
  if (kind == "affine") {
    std::vector<Matd> M;
    for (Index b = 1; b <= d; ++b) M.push_back(reals_matrix(a.get("M" + std::to_string(b)), d, n, "affine slope"));
    return VectorField::affine(reals_matrix(a.get("M0"), d, n, "affine offset"), M);
  }
  throw ConfigError("unknown vector field '" + kind + "'");
}

Table with_provenance(Table t, const Config& cfg, const std::vector<std::string>& extra) {
  char h[32];
  std::snprintf(h, sizeof h, "%016" PRIx64, cfg.hash());
  std::vector<std::string> c{kVersion, "command=" + cfg.get("command"), std::string("config_hash=") + h,
                             "seed=" + cfg.get_or("seed", "none")};
  c.insert(c.end(), extra.begin(), extra.end());
  c.insert(c.end(), t.comments.begin(), t.comments.end());
  t.comments = std::move(c);
  return t;
}

std::uint64_t seed_of(const Config& cfg) {
  const std::string& s = cfg.get("seed");
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || *end || s[0] == '-') throw ConfigError("seed must be a nonnegative integer");
  return v;
}

double regime_p(const Config& cfg, double lo, double hi, bool open_lo, const std::string& cmd) {
  const double p = cfg.number("p");
  if (!(open_lo ? p > lo : p >= lo) || !(p < hi))
    throw RegimeError(cmd + ": p = " + format_real(p) + " outside the command's regime");
  return p;
}

std::vector<int> level_range(const Config& cfg) {
  const long long a = cfg.integer("Nmin"), b = cfg.integer("Nmax");
  if (a < 1 || b < a || b > kMaxDyadicLevel - 3) throw ConfigError("need 1 <= Nmin <= Nmax <= 21");
  std::vector<int> r;
  for (long long N = a; N <= b; ++N) r.push_back(static_cast<int>(N));
  return r;
}

GridPathd load_driver(const Config& cfg) {
  const std::string spec = cfg.get("driver");
  std::string name;
  Config a;
  if (split_call(spec, name, a)) {
    const Index n = a.integer_or("n", 1);
    const int N = static_cast<int>(a.integer("N"));
    const double T = a.number_or("T", 1);
    if (name == "brownian") return dyadic_nodes(sample_brownian(seed_of(cfg), n, N, T), N);
    if (name == "fbm") return sample_fbm(seed_of(cfg), n, a.number("H"), N, T);
    throw ConfigError("unknown driver generator '" + name + "'");
  }
  return path_from_table(read_csv(cfg.resolve(spec)));
}

RoughPathd load_rough(const Config& cfg, double p) {
  const std::string spec = cfg.get("rough");
  std::string name;
  Config a;
  if (split_call(spec, name, a)) {
    if (name != "brownian") throw ConfigError("unknown rough path generator '" + name + "'");
    const int N = static_cast<int>(a.integer("N"));
    return brownian_lift(sample_brownian(seed_of(cfg), a.integer_or("n", 1), N, a.number_or("T", 1)), N, p);
  }
  RoughPathd X = rough_from_table(read_csv(cfg.resolve(spec)), p);
  return X.with_certificate(rough_control(X));
}

Vecd start_point(const Config& cfg, const Domain& D) {
  const Vecd y0 = reals_vector(cfg.get("y0"), "y0");
  if (y0.size() != D.dim()) throw ConfigError("y0 has the wrong dimension");
  return y0;
}

Table solution_table(const GridPathd& Y, const GridPathd& Phi, const std::vector<double>& tv, const char* yname,
                     const char* pname) {
  Table t;
  t.header.push_back("t");
  for (Index i = 1; i <= Y.dim(); ++i) t.header.push_back(yname + std::to_string(i));
  for (Index i = 1; i <= Y.dim(); ++i) t.header.push_back(pname + std::to_string(i));
  t.header.push_back("phiTV");
  for (Index k = 0; k < Y.size(); ++k) {
    std::vector<double> r{Y.time(k)};
    for (Index i = 0; i < Y.dim(); ++i) r.push_back(Y.values()(i, k));
    for (Index i = 0; i < Y.dim(); ++i) r.push_back(Phi.values()(i, k));
    r.push_back(tv[k]);
    t.rows.push_back(std::move(r));
  }
  return t;
}

std::vector<std::string> solution_notes(const ReflectedSolution& s, const Domain& D) {
  return {"partition_intervals=" + std::to_string(s.partition.size() - 1), "C_Y=" + format_real(s.constants.C_Y),
          "C_Phi=" + format_real(s.constants.C_Phi),
          "complementarity=" + format_real(complementarity_residual(s.Y, s.Phi, D))};
}

Table report_table(const ConvergenceReport& r) {
  Table t;
  t.header = {"N", "mean_sq_err", "stderr", "samples_failed"};
  for (std::size_t k = 0; k < r.N.size(); ++k)
    t.rows.push_back({double(r.N[k]), r.mean_sq_err[k], r.stderr_[k], double(r.samples_failed[k])});
  t.comments = {r.config, "slope_log2=" + format_real(r.fit.slope), "slope_halfwidth=" + format_real(r.fit.halfwidth),
                "theory_slope=" + format_real(r.theory_slope), "self_gap_mean=" + format_real(r.self_gap_mean),
                std::string("strictly_decreasing=") + (r.strictly_decreasing ? "1" : "0"),
                std::string("within_failure_budget=") + (r.within_budget ? "1" : "0")};
  return t;
}

Table cmd_skorohod(const Config& cfg) {
  const Domain D = load_domain(cfg.resolve(cfg.get("domain")));
  const GridPathd w = load_driver(cfg);
  const Vecd y0 = start_point(cfg, D);
  const std::string method = cfg.get_or("method", "auto");
  if (method != "auto" && method != "projection") throw ConfigError("method must be auto or projection");
  const SkorohodSolution s = method == "projection" ? solve_skorohod_projection(w, D, y0) : solve_skorohod(w, D, y0);
  std::vector<std::string> notes{"complementarity=" + format_real(complementarity_residual(s, D))};
  if (cfg.integer_or("grid-check", 0)) {
    const SkorohodSolution q = solve_skorohod_projection(w, D, y0);
    notes.push_back("projection_gap=" + format_real((q.xi.values() - s.xi.values()).cwiseAbs().maxCoeff()));
  }
  return with_provenance(solution_table(s.xi, s.phi, s.tv, "xi", "phi"), cfg, notes);
}

Table cmd_solve_young(const Config& cfg) {
  const double p = regime_p(cfg, 1, 2, false, "solve-young");
  const Domain D = load_domain(cfg.resolve(cfg.get("domain")));
  const VectorField sigma = parse_sigma(cfg.get("sigma"), cfg);
  const GridPathd x = load_driver(cfg);
  const Vecd y0 = start_point(cfg, D);
  if (cfg.has("tol")) {
    const RefinementResult r = refine_until_converged(x, sigma, D, y0, p, cfg.number("tol"));
    std::vector<std::string> notes = solution_notes(r.solution, D);
    notes.push_back("refinement_levels=" + std::to_string(r.gaps.size()));
    notes.push_back("final_gap=" + format_real(r.gaps.empty() ? 0 : r.gaps.back()));
    return with_provenance(solution_table(r.solution.Y, r.solution.Phi, r.solution.phi_tv, "Y", "Phi"), cfg, notes);
  }
  const ReflectedSolution s = solve_reflected_young(x, sigma, D, y0, p, cfg.number_or("eps", 0));
  return with_provenance(solution_table(s.Y, s.Phi, s.phi_tv, "Y", "Phi"), cfg, solution_notes(s, D));
}

ImplicitOptions implicit_options(const Config& cfg) {
  ImplicitOptions o;
  o.tol = cfg.number_or("tol", o.tol);
  o.max_iter = static_cast<int>(cfg.integer_or("max-iter", o.max_iter));
  return o;
}

Table cmd_solve_rough(const Config& cfg) {
  const double p = regime_p(cfg, 2, 3, false, "solve-rough");
  const Domain D = load_domain(cfg.resolve(cfg.get("domain")));
  const VectorField sigma = parse_sigma(cfg.get("sigma"), cfg);
  const RoughPathd X = load_rough(cfg, p);
  const Vecd y0 = start_point(cfg, D);
  const ReflectedSolution s = solve_reflected_rough(X, sigma, D, y0, p, cfg.number_or("eps", 0), implicit_options(cfg));
  std::vector<std::string> notes = solution_notes(s, D);
  int it = 0;
  for (const auto& c : s.certs) it = std::max(it, c.iterations);
  notes.push_back("max_iterations=" + std::to_string(it));
  return with_provenance(solution_table(s.Y, s.Phi, s.phi_tv, "Y", "Phi"), cfg, notes);
}

Table cmd_lift(const Config& cfg) {
  const double p = regime_p(cfg, 2, 3, true, "lift");
  const int N = static_cast<int>(cfg.integer("N"));
  const Index n = cfg.integer_or("n", 2);
  const std::uint64_t seed = seed_of(cfg);
  const RoughPathd X = brownian_lift(sample_brownian(seed, n, N, cfg.number_or("T", 1)), N, p);
  std::vector<std::string> notes{"C_X=" + format_real(X.certificate()->constant())};
  if (cfg.has("stats")) {
    const RoughStats st = rough_convergence_stats(seed, cfg.integer_or("samples", 20), n, level_range(cfg), p,
                                                  cfg.number_or("q", 1), cfg.number_or("T", 1));
    Table s;
    s.header = {"N", "dp_gap", "C_mean", "C_q_mean"};
    for (const auto& r : st.rows) s.rows.push_back({double(r.N), r.dp_gap, r.C_mean, r.C_q_mean});
    s = with_provenance(std::move(s), cfg,
                        {std::string("dp_gap_decreasing=") + (st.dp_gap_decreasing ? "1" : "0"),
                         std::string("C_uniform=") + (st.C_uniform ? "1" : "0"),
                         std::string("holder_1.9_grows=") + (st.holder_low_grows ? "1" : "0")});
    emit_csv(s, cfg.resolve(cfg.get("stats")));
  }
  return with_provenance(rough_table(X), cfg, notes);
}

Table cmd_defect_scan(const Config& cfg) {
  const double p = cfg.number("p");
  if (!(p >= 1 && p < 3)) throw RegimeError("defect-scan: p must lie in [1, 3)");
  const Domain D = load_domain(cfg.resolve(cfg.get("domain")));
  const VectorField sigma = parse_sigma(cfg.get("sigma"), cfg);
  const Vecd y0 = start_point(cfg, D);
  const Index stride = std::max<long long>(1, cfg.integer_or("stride", 1));
  Table t;
  t.header = {"s", "t", "omega", "absI", "absJ"};
  std::vector<std::string> notes;
  if (p < 2) {
    const GridPathd x = load_driver(cfg);
    const ReflectedSolution s = solve_reflected_young(x, sigma, D, y0, p, cfg.number_or("eps", 0));
    const Controld ctrl = Controld::pvariation(x, p);
    for (std::size_t k = 0; k + 1 < s.partition.size(); ++k) {
      const Index a = s.partition[k];
      const std::vector<double> row = ctrl.row(a);
      for (Index b = a + 1; b < x.size(); b += stride)
        t.rows.push_back({x.time(a), x.time(b), row[b - a], remainder_I(s, x, sigma, a, b).cwiseAbs().maxCoeff(),
                          std::nan("")});
    }
    // The local bound holds for omega <= epsilon <= 1; the fit stays there.
    const double cap = cfg.number_or("omega-cap", 1);
    const DefectReport r = defect_profile_I(s, x, sigma, ctrl, p, 2, cap);
    notes = {"regime=young", "omega_cap=" + format_real(cap), "slope=" + format_real(r.slope),
             "within_step_max=" + format_real(r.within_step_max)};
  } else {
    const RoughPathd X = load_rough(cfg, p);
    const ReflectedSolution s = solve_reflected_rough(X, sigma, D, y0, p, cfg.number_or("eps", 0), implicit_options(cfg));
    const Controld ctrl = *X.certificate();
    const RemainderCalculus rc(s.Y, s.Phi, X, sigma);
    for (std::size_t k = 0; k + 1 < s.partition.size(); ++k) {
      const Index a = s.partition[k];
      const std::vector<double> row = ctrl.row(a);
      for (Index b = a + 1; b < X.size(); b += stride)
        t.rows.push_back({X.time(a), X.time(b), row[b - a], rc.I(a, b).cwiseAbs().maxCoeff(), rc.J(a, b).cwiseAbs().maxCoeff()});
    }
    const DefectReport r = defect_profile_J(s, X, sigma, ctrl, p);
    notes = {"regime=rough", "slope=" + format_real(r.slope), "within_step_max=" + format_real(r.within_step_max)};
  }
  return with_provenance(std::move(t), cfg, notes);
}

WZOptions wz_options(const Config& cfg) {
  WZOptions o;
  o.Nref = static_cast<int>(cfg.integer_or("Nref", 0));
  o.T = cfg.number_or("T", 1);
  o.Cbudget = cfg.number_or("Cbudget", o.Cbudget);
  o.implicit = implicit_options(cfg);
  return o;
}

Table cmd_wz(const Config& cfg, bool gap) {
  const double p = regime_p(cfg, 2, 3, true, gap ? "integral-gap" : "wz-converge");
  const Domain D = load_domain(cfg.resolve(cfg.get("domain")));
  const VectorField sigma = parse_sigma(cfg.get("sigma"), cfg);
  const Vecd y0 = start_point(cfg, D);
  const std::vector<int> Ns = level_range(cfg);
  const Index samples = cfg.integer("samples");
  if (samples < 1) throw ConfigError("samples must be positive");
  const std::uint64_t seed = seed_of(cfg);
  const ConvergenceReport r = gap ? integral_gap_curve(sigma, D, y0, Ns, samples, seed, p, wz_options(cfg))
                                  : wz_error_curve(sigma, D, y0, Ns, samples, p, seed, wz_options(cfg));
  return with_provenance(report_table(r), cfg, {});
}

void write_diag(const std::string& out, const std::string& cmd, const Error& e) {
  std::ofstream f(out + ".diag", std::ios::binary | std::ios::trunc);
  f << kVersion << "\ncommand=" << cmd << "\nerror=" << e.what() << "\n";
  if (auto* c = dynamic_cast<const ContractionFailure*>(&e)) {
    f << "residuals=";
    for (double v : c->residuals()) f << format_real(v) << ' ';
    f << "\n";
  } else if (auto* g = dynamic_cast<const ConvergenceError*>(&e)) {
    f << "gaps=";
    for (double v : g->gaps()) f << format_real(v) << ' ';
    f << "\n";
  } else if (auto* r = dynamic_cast<const ResolutionError*>(&e)) {
    f << "step_omega=" << format_real(r->step_omega()) << "\nepsilon=" << format_real(r->epsilon()) << "\n";
  }
}

}  // namespace

VectorField parse_sigma(const std::string& spec, const Config& cfg) {
  std::string name;
  Config a;
  if (split_call(spec, name, a)) return sigma_from(name, a);
  if (name == "zero" || name == "identity" || name == "constant" || name == "smooth" || name == "affine")
    throw ConfigError("vector field '" + name + "' needs parameters, e.g. " + name + "(d=2)");
  const Config file = Config::load(cfg.resolve(spec));
  return sigma_from(file.get("kind"), file);
}

Domain parse_domain(const Config& c) {
  const std::string shape = c.get("shape");
  if (shape == "halfspace") return Domain::half_space(reals_vector(c.get("normal"), "normal"), c.number_or("offset", 0));
  if (shape == "orthant") return Domain::orthant(c.integer("dim"));
  if (shape == "ball") return Domain::ball(reals_vector(c.get("center"), "center"), c.number("radius"));
  if (shape == "ball-exterior")
    return Domain::ball_exterior(reals_vector(c.get("center"), "center"), c.number("radius"));
  if (shape == "polyhedron") {
    const std::vector<std::string> rows = c.all("constraint");
    if (rows.empty()) throw ConfigError("polyhedron needs constraint= lines");
    std::vector<std::vector<double>> v;
    for (const auto& r : rows) v.push_back(parse_reals(r));
    const Index d = static_cast<Index>(v[0].size()) - 1;
    if (d < 1) throw ConfigError("constraint needs a normal and an offset");
    Matd Nm(static_cast<Index>(v.size()), d);
    Vecd off(static_cast<Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (static_cast<Index>(v[i].size()) != d + 1) throw ConfigError("constraints differ in dimension");
      for (Index j = 0; j < d; ++j) Nm(static_cast<Index>(i), j) = v[i][j];
      off(static_cast<Index>(i)) = v[i][d];
    }
    return Domain::polyhedron(Nm, off);
  }
  throw ConfigError("unknown shape '" + shape + "'");
}

Domain load_domain(const std::string& path) { return parse_domain(Config::load(path)); }

GridPathd path_from_table(const Table& t) {
  if (t.header.size() < 2 || t.header[0] != "t") throw ConfigError("path csv: header must be t,v1,...");
  const Index d = static_cast<Index>(t.header.size()) - 1, N = static_cast<Index>(t.rows.size());
  std::vector<double> times;
  Matd v(d, N);
  for (Index k = 0; k < N; ++k) {
    times.push_back(t.rows[k][0]);
    for (Index i = 0; i < d; ++i) v(i, k) = t.rows[k][i + 1];
  }
  return GridPathd(std::move(times), std::move(v));
}

Table path_table(const GridPathd& x, const std::string& prefix) {
  Table t;
  t.header.push_back("t");
  for (Index i = 1; i <= x.dim(); ++i) t.header.push_back(prefix + std::to_string(i));
  for (Index k = 0; k < x.size(); ++k) {
    std::vector<double> r{x.time(k)};
    for (Index i = 0; i < x.dim(); ++i) r.push_back(x.values()(i, k));
    t.rows.push_back(std::move(r));
  }
  return t;
}

RoughPathd rough_from_table(const Table& t, double p) {
  const Index w = static_cast<Index>(t.header.size()) - 1;
  Index n = 0;
  while (n * (n + 1) < w) ++n;
  if (n < 1 || n * (n + 1) != w || t.header[0] != "t") throw ConfigError("rough csv: header must be t,x1..xn,A11..Ann");
  const Index N = static_cast<Index>(t.rows.size());
  std::vector<double> times;
  Matd x(n, N), A(n * n, N);
  for (Index k = 0; k < N; ++k) {
    times.push_back(t.rows[k][0]);
    for (Index i = 0; i < n; ++i) x(i, k) = t.rows[k][1 + i];
    for (Index r = 0; r < n * n; ++r) A(r, k) = t.rows[k][1 + n + r];
  }
  return RoughPathd(std::move(times), std::move(x), std::move(A), p);
}

Table rough_table(const RoughPathd& X) {
  const Index n = X.dim();
  Table t;
  t.header.push_back("t");
  for (Index i = 1; i <= n; ++i) t.header.push_back("x" + std::to_string(i));
  for (Index i = 1; i <= n; ++i)
    for (Index j = 1; j <= n; ++j) t.header.push_back("A" + std::to_string(i) + std::to_string(j));
  for (Index k = 0; k < X.size(); ++k) {
    std::vector<double> r{X.time(k)};
    for (Index i = 0; i < n; ++i) r.push_back(X.base().values()(i, k));
    for (Index q = 0; q < n * n; ++q) r.push_back(X.A()(q, k));
    t.rows.push_back(std::move(r));
  }
  return t;
}

int run(const Config& cfg, std::ostream& log) {
  std::string cmd, out;
  try {
    cmd = cfg.get("command");
    out = cfg.resolve(cfg.get("out"));
  } catch (const ConfigError& e) {
    log << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  static const std::map<std::string, Table (*)(const Config&)> table{
      {"skorohod", cmd_skorohod},
      {"solve-young", cmd_solve_young},
      {"solve-rough", cmd_solve_rough},
      {"lift", cmd_lift},
      {"defect-scan", cmd_defect_scan},
      {"wz-converge", [](const Config& c) { return cmd_wz(c, false); }},
      {"integral-gap", [](const Config& c) { return cmd_wz(c, true); }},
  };
  auto it = table.find(cmd);
  if (it == table.end()) {
    log << "usage error: unknown command '" << cmd << "'\n";
    return kUsage;
  }
  try {
    emit_csv(it->second(cfg), out);
    std::remove((out + ".diag").c_str());  // stale from an earlier failed run
    return kOk;
  } catch (const ConfigError& e) {
    log << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const RegimeError& e) {
    log << "regime error: " << e.what() << "\n";
    return kRegime;
  } catch (const Error& e) {
    log << "solver failure: " << e.what() << "\n";
    write_diag(out, cmd, e);
    return kSolverFailure;
  }
}

}  // namespace rrde
