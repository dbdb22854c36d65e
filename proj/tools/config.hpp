#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dann/network.hpp"
#include "dann/problem.hpp"
#include "dann/training.hpp"

namespace dann::cli {

// Anything wrong with user-supplied configuration; callers map it to exit 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SweepSpec {
  bool present = false;
  std::vector<std::string> axes;                    // 1 or 2 of depth|width|n_f|n_i
  std::map<std::string, std::vector<int>> values;   // one list per named axis
  int repeats = 1;
};

struct CompareSpec {
  bool present = false;
  std::vector<std::string> modes;  // subset of {global, piecewise}
};

// Flat key=value config with sections. dim = -1 means "the problem's natural
// spatial dimension" (ex1/ex2: 1, ex3: 0, ex4: 3).
struct ExperimentConfig {
  std::string problem = "ex1";  // [problem]
  int dim = -1;

  std::string variant = "dann";  // [model]
  int depth = 3;
  int width = 8;
  std::string sigma1 = "tanh";
  std::string sigma2 = "tanh";
  double apinn_n = 5.0;

  std::string mode = "global";  // [fit]
  int n_f = 400;
  int n_i = 150;
  int max_iter = 20000;
  std::uint64_t seed = 1;

  std::string out_dir;  // [output]

  SweepSpec sweep;
  CompareSpec compare;

  std::string origin;  // preset or file name, informational
};

// Parses INI-style text: [section] headers, key = value lines, full-line
// comments starting with '#' or ';'. Unknown sections, unknown keys,
// duplicate keys and malformed values are reported with <origin>:<line>.
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);
ExperimentConfig load_config_file(const std::string& path);

struct Preset {
  std::string name;
  std::string summary;
  std::string ini;
};
const std::vector<Preset>& presets();
const Preset* find_preset(const std::string& name);

// Command-line flag overrides; only engaged fields are applied.
struct Overrides {
  std::optional<std::string> problem, model, mode, out;
  std::optional<int> dim, max_iter;
  std::optional<std::uint64_t> seed;
};
void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

// Config materialized into core objects, after full validation.
struct ResolvedRun {
  ExperimentConfig cfg;  // with defaults resolved (dim, ...)
  DelayProblem prob;
  Architecture arch;
  Layout lay;
  TrainConfig tcfg;
  std::vector<double> breakpoints;  // piecewise mode only
};
ResolvedRun resolve(const ExperimentConfig& cfg);

// Canonical echo: a valid config file that reproduces the run, with resolved
// defaults inline and derived seed streams as comments.
std::string config_echo(const ResolvedRun& rr);

extern const char* kToolVersion;

}  // namespace dann::cli
