#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "nwlab.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nwlab: spectral approximation experiments on the circle, torus and sphere"};
  app.require_subcommand(1);
  app.fallthrough();

  // Every value is read as text so that "inf" and "1/32" are accepted
  // uniformly; nwlab::apply_config_entries does the parsing.
  const std::vector<std::pair<std::string, std::string>> value_flags = {
      {"model", "circle | torus2 | sphere2"},
      {"p", "integrability exponent of the source space (may be inf)"},
      {"q", "integrability exponent of the target space (may be inf)"},
      {"r", "Sobolev smoothness"},
      {"alpha", "Besov smoothness, or the kernel cross-section exponent"},
      {"omega-max", "largest omega (weyl) or frequency (nikolskii)"},
      {"m-min", "first level m (approx-rate) or first fitted band (band-norms)"},
      {"m-max", "last level m, band j, partition depth J or Besov j_max"},
      {"t-list", "comma separated kernel scales, e.g. 1,1/2,1/4"},
      {"resolution", "quadrature grid resolution"},
      {"seed", "random seed"},
      {"tol", "override the experiment's pass tolerance"},
      {"l-min", "first eigenvalue index fitted by growth"},
      {"l-max", "last eigenvalue index fitted by growth"},
      {"t-besov", "Besov fine index (may be inf)"},
      {"k", "power of L in the Nikolskii check"},
      {"d", "dimension used in the Nikolskii exponent"},
      {"degree", "largest monomial degree for poly-span"},
      {"samples", "sample or family size"},
      {"format", "csv | json"},
      {"out", "output path, - for stdout"},
  };
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  for (const auto& [name, help] : value_flags) {
    options[name] = app.add_option("--" + name, values[name], help);
  }
  bool timing = false;
  auto* timing_opt = app.add_flag("--timing", timing, "include the wall-clock duration in JSON");
  std::string config_path;
  app.add_option("--config", config_path, "key=value file; command-line flags take precedence");

  std::map<std::string, CLI::App*> subcommands;
  for (const auto& name : nwlab::experiment_names()) {
    subcommands[name] = app.add_subcommand(name, "run the " + name + " experiment");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  nwlab::RunConfig config;
  try {
    for (const auto& [name, sub] : subcommands) {
      if (sub->parsed()) config.experiment = nwlab::parse_experiment(name);
    }
    std::map<std::string, std::string> explicit_entries;
    std::set<std::string> explicit_keys;
    for (const auto& [name, opt] : options) {
      if (opt->count() > 0) {
        explicit_entries[name] = values[name];
        explicit_keys.insert(name);
      }
    }
    if (timing_opt->count() > 0) {
      explicit_entries["timing"] = timing ? "true" : "false";
      explicit_keys.insert("timing");
    }
    if (!config_path.empty()) {
      nwlab::apply_config_entries(config, nwlab::read_config_file(config_path), explicit_keys);
    }
    nwlab::apply_config_entries(config, explicit_entries, {});
  } catch (const nwlab::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  nwlab::Report report;
  try {
    report = nwlab::run(config);
  } catch (const nwlab::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    nwlab::emit(report, config.format, config.out, config.timing);
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << '\n';
    return kExitUsage;
  }
  std::fprintf(stderr, "%s: %s in %.3f s\n", report.experiment.c_str(),
               report.passed() ? "pass" : "FAIL", report.duration_seconds);
  return report.passed() ? kExitPass : kExitFail;
}
