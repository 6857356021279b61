#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rrde/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Reflected rough differential equations: solvers and convergence experiments"};
  app.set_version_flag("--version", rrde::kVersion);
  app.require_subcommand(0, 1);
  std::string config, out, seed;
  app.add_option("--config", config, "key=value configuration file");
  app.add_option("--out", out, "output CSV");
  app.add_option("--seed", seed, "random seed");

  const std::map<std::string, std::vector<std::string>> flags{
      {"skorohod", {"driver", "domain", "y0", "method", "grid-check"}},
      {"solve-young", {"driver", "sigma", "domain", "y0", "p", "eps", "tol"}},
      {"solve-rough", {"rough", "sigma", "domain", "y0", "p", "eps", "tol", "max-iter"}},
      {"lift", {"N", "n", "p", "T", "stats", "Nmin", "Nmax", "samples", "q"}},
      {"defect-scan", {"driver", "rough", "sigma", "domain", "y0", "p", "eps", "tol", "stride", "omega-cap"}},
      {"wz-converge", {"sigma", "domain", "y0", "p", "Nmin", "Nmax", "samples", "Nref", "Cbudget", "tol"}},
      {"integral-gap", {"sigma", "domain", "y0", "p", "Nmin", "Nmax", "samples", "Nref", "Cbudget", "tol"}},
  };
  const std::map<std::string, std::string> about{
      {"skorohod", "Skorohod map of a driver path"},
      {"solve-young", "reflected Young equation, Euler scheme"},
      {"solve-rough", "reflected rough equation, implicit Skorohod steps"},
      {"lift", "Brownian rough path lift and d_p statistics"},
      {"defect-scan", "remainders I and J at (partition node, grid node) pairs"},
      {"wz-converge", "Wong-Zakai error curve"},
      {"integral-gap", "integral gap curve"},
  };
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, keys] : flags) {
    CLI::App* sub = app.add_subcommand(name, about.at(name));
    sub->fallthrough();
    for (const auto& k : keys) sub->add_option("--" + k, values[name + "/" + k]);
    subs[name] = sub;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rrde::kUsage;
  }

  rrde::Config cfg;
  try {
    if (!config.empty()) cfg = rrde::Config::load(config);
  } catch (const rrde::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return rrde::kUsage;
  }
  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    cfg.set("command", name);
    for (const auto& k : flags.at(name)) {
      const std::string& v = values[name + "/" + k];
      if (sub->count("--" + k)) cfg.set(k, v);
    }
  }
  // --out is relative to the working directory; paths inside the config to the config file.
  if (!out.empty()) cfg.set("out", std::filesystem::absolute(out).string());
  if (!seed.empty()) cfg.set("seed", seed);
  return rrde::run(cfg, std::cerr);
}
