#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "config.hpp"
#include "runner.hpp"

namespace {

using dann::cli::ConfigError;
using dann::cli::ExperimentConfig;
using dann::cli::Overrides;

struct CommonFlags {
  std::string config_path, preset;
  Overrides over;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "INI config file (see README for the schema)");
  cmd->add_option("--preset", f.preset, "named preset (see list-presets)");
  cmd->add_option_function<std::string>(
      "--problem", [&f](const std::string& v) { f.over.problem = v; },
      "problem id: ex1|ex2|ex3|ex4");
  cmd->add_option_function<int>(
      "--dim", [&f](int v) { f.over.dim = v; }, "spatial dimension (ex4)");
  cmd->add_option_function<std::string>(
      "--model", [&f](const std::string& v) { f.over.model = v; },
      "pinn|apinn|qres|isc|qsc|dann");
  cmd->add_option_function<std::string>(
      "--mode", [&f](const std::string& v) { f.over.mode = v; }, "global|piecewise");
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&f](std::uint64_t v) { f.over.seed = v; }, "master seed");
  cmd->add_option_function<int>(
      "--max-iter", [&f](int v) { f.over.max_iter = v; }, "optimizer iteration cap");
  cmd->add_option_function<std::string>(
      "--out", [&f](const std::string& v) { f.over.out = v; }, "output directory");
}

ExperimentConfig assemble(const CommonFlags& f) {
  if (!f.config_path.empty() && !f.preset.empty())
    throw ConfigError("--config and --preset are mutually exclusive");
  ExperimentConfig cfg;
  if (!f.preset.empty()) {
    const auto* p = dann::cli::find_preset(f.preset);
    if (!p) throw ConfigError("unknown preset '" + f.preset + "' (see list-presets)");
    cfg = dann::cli::parse_config_text(p->ini, "preset " + f.preset);
  } else if (!f.config_path.empty()) {
    cfg = dann::cli::load_config_file(f.config_path);
  } else {
    throw ConfigError("pass --config FILE or --preset NAME");
  }
  dann::cli::apply_overrides(cfg, f.over);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"delay-PDE neural solver: config-driven experiment runner"};
  app.require_subcommand(1);

  CommonFlags frun, fsweep, fcompare;
  auto* run = app.add_subcommand("run", "train one configuration, emit tables and plots");
  add_common(run, frun);
  auto* sweep = app.add_subcommand(
      "sweep", "grid over depth/width/N_f/N_I with repeats, emit sweep.csv");
  add_common(sweep, fsweep);
  auto* compare = app.add_subcommand(
      "compare", "all six models (x fitting modes), emit a combined error table");
  add_common(compare, fcompare);
  auto* list = app.add_subcommand("list-presets", "show the named preset table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion")
      return app.exit(e);
    (void)app.exit(e);
    return 2;  // bad flags are configuration errors
  }

  try {
    if (list->parsed()) {
      for (const auto& p : dann::cli::presets())
        std::printf("%-16s %s\n", p.name.c_str(), p.summary.c_str());
      return 0;
    }
    if (run->parsed()) return dann::cli::verb_run(dann::cli::resolve(assemble(frun)));
    if (sweep->parsed()) return dann::cli::verb_sweep(dann::cli::resolve(assemble(fsweep)));
    return dann::cli::verb_compare(dann::cli::resolve(assemble(fcompare)));
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
