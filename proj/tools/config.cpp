#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "dann/piecewise.hpp"
#include "dann/rng.hpp"

namespace dann::cli {

const char* kToolVersion = "0.1.0";

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

long long parse_int(const std::string& origin, int line, const std::string& key,
                    const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (errno != 0 || end == v.c_str() || *end != '\0')
    fail(origin, line, "value of '" + key + "' is not an integer: '" + v + "'");
  return x;
}

std::uint64_t parse_u64(const std::string& origin, int line, const std::string& key,
                        const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (errno != 0 || end == v.c_str() || *end != '\0' || v.find('-') != std::string::npos)
    fail(origin, line, "value of '" + key + "' is not an unsigned integer: '" + v + "'");
  return x;
}

double parse_real(const std::string& origin, int line, const std::string& key,
                  const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (errno != 0 || end == v.c_str() || *end != '\0')
    fail(origin, line, "value of '" + key + "' is not a number: '" + v + "'");
  return x;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cur = trim(cur);
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

const std::set<std::string> kSweepAxes = {"depth", "width", "n_f", "n_i"};

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  cfg.origin = origin;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::set<std::string> seen;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(origin, line, "malformed section header: " + s);
      section = lower(trim(s.substr(1, s.size() - 2)));
      static const std::set<std::string> known = {"problem", "model", "fit",
                                                  "output",  "sweep", "compare"};
      if (!known.count(section)) fail(origin, line, "unknown section [" + section + "]");
      if (section == "sweep") cfg.sweep.present = true;
      if (section == "compare") cfg.compare.present = true;
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail(origin, line, "expected 'key = value', got: " + s);
    const std::string key = lower(trim(s.substr(0, eq)));
    const std::string val = trim(s.substr(eq + 1));
    if (section.empty()) fail(origin, line, "key '" + key + "' appears before any [section]");
    const std::string qual = section + "." + key;
    if (!seen.insert(qual).second) fail(origin, line, "duplicate key '" + key + "' in [" + section + "]");

    if (section == "problem") {
      if (key == "name") cfg.problem = lower(val);
      else if (key == "dim") cfg.dim = static_cast<int>(parse_int(origin, line, key, val));
      else fail(origin, line, "unknown key '" + key + "' in [problem]");
    } else if (section == "model") {
      if (key == "variant") cfg.variant = lower(val);
      else if (key == "depth") cfg.depth = static_cast<int>(parse_int(origin, line, key, val));
      else if (key == "width") cfg.width = static_cast<int>(parse_int(origin, line, key, val));
      else if (key == "sigma1") cfg.sigma1 = lower(val);
      else if (key == "sigma2") cfg.sigma2 = lower(val);
      else if (key == "apinn_n") cfg.apinn_n = parse_real(origin, line, key, val);
      else fail(origin, line, "unknown key '" + key + "' in [model]");
    } else if (section == "fit") {
      if (key == "mode") cfg.mode = lower(val);
      else if (key == "n_f") cfg.n_f = static_cast<int>(parse_int(origin, line, key, val));
      else if (key == "n_i") cfg.n_i = static_cast<int>(parse_int(origin, line, key, val));
      else if (key == "max_iter") cfg.max_iter = static_cast<int>(parse_int(origin, line, key, val));
      else if (key == "seed") cfg.seed = parse_u64(origin, line, key, val);
      else fail(origin, line, "unknown key '" + key + "' in [fit]");
    } else if (section == "output") {
      if (key == "dir") cfg.out_dir = val;
      else fail(origin, line, "unknown key '" + key + "' in [output]");
    } else if (section == "sweep") {
      if (key == "axes") {
        for (const auto& a : split_list(val)) {
          const std::string ax = lower(a);
          if (!kSweepAxes.count(ax)) fail(origin, line, "unknown sweep axis '" + a + "'");
          cfg.sweep.axes.push_back(ax);
        }
      } else if (kSweepAxes.count(key)) {
        std::vector<int> vals;
        for (const auto& v : split_list(val))
          vals.push_back(static_cast<int>(parse_int(origin, line, key, v)));
        cfg.sweep.values[key] = std::move(vals);
      } else if (key == "repeats") {
        cfg.sweep.repeats = static_cast<int>(parse_int(origin, line, key, val));
      } else {
        fail(origin, line, "unknown key '" + key + "' in [sweep]");
      }
    } else if (section == "compare") {
      if (key == "modes") {
        for (const auto& m : split_list(val)) cfg.compare.modes.push_back(lower(m));
      } else {
        fail(origin, line, "unknown key '" + key + "' in [compare]");
      }
    }
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

namespace {

struct Bundle {
  const char* tag;      // preset name prefix
  const char* problem;
  int dim;
  int depth, width;
  const char* s1;
  const char* s2;
  const char* mode;     // table's fitting mode
  int n_f, n_i, max_iter;
  const char* compare_modes;
};

// Benchmark hyperparameter table, one row per study configuration.
const Bundle kBundles[] = {
    {"ex1", "ex1", 1, 3, 8, "softplus", "tanh", "global", 400, 150, 20000, "global"},
    {"ex2", "ex2", 1, 3, 6, "sigmoid", "tanh", "global", 300, 100, 20000, "global, piecewise"},
    {"ex3", "ex3", 0, 3, 6, "sigmoid", "tanh", "global", 800, 500, 10000, "global"},
    {"ex4-d3", "ex4", 3, 4, 15, "tanh", "tanh", "piecewise", 6000, 2000, 50000, "piecewise"},
    {"ex4-d8", "ex4", 8, 4, 35, "tanh", "tanh", "piecewise", 8000, 3000, 50000, "piecewise"},
};

const char* kModels[] = {"pinn", "apinn", "qres", "isc", "qsc", "dann"};

std::string bundle_ini(const Bundle& b, const std::string& variant) {
  std::ostringstream o;
  o << "[problem]\nname = " << b.problem << "\ndim = " << b.dim << "\n\n";
  o << "[model]\nvariant = " << variant << "\ndepth = " << b.depth << "\nwidth = " << b.width
    << "\nsigma1 = " << b.s1 << "\nsigma2 = " << b.s2 << "\napinn_n = 5\n\n";
  o << "[fit]\nmode = " << b.mode << "\nn_f = " << b.n_f << "\nn_i = " << b.n_i
    << "\nmax_iter = " << b.max_iter << "\nseed = 1\n";
  return o.str();
}

std::vector<Preset> build_presets() {
  std::vector<Preset> out;
  for (const auto& b : kBundles) {
    for (const char* m : kModels) {
      std::ostringstream sum;
      sum << b.problem << " d=" << b.dim << ", " << m << " " << b.depth << "x" << b.width
          << " (" << b.s1 << (std::string(m) == "dann" ? std::string("+") + b.s2 : "")
          << "), " << b.mode << ", N_f=" << b.n_f << " N_I=" << b.n_i
          << ", max_iter=" << b.max_iter;
      out.push_back({std::string(b.tag) + "-" + m, sum.str(), bundle_ini(b, m)});
    }
    std::ostringstream sum;
    sum << b.problem << " d=" << b.dim << ", all 6 models x {" << b.compare_modes
        << "}, N_f=" << b.n_f << " N_I=" << b.n_i << ", max_iter=" << b.max_iter;
    std::string ini = bundle_ini(b, "dann");
    ini += "\n[compare]\nmodes = " + std::string(b.compare_modes) + "\n";
    out.push_back({std::string(b.tag) + "-compare", sum.str(), ini});
  }
  return out;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> p = build_presets();
  return p;
}

const Preset* find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return &p;
  return nullptr;
}

void apply_overrides(ExperimentConfig& cfg, const Overrides& o) {
  if (o.problem) cfg.problem = lower(*o.problem);
  if (o.model) cfg.variant = lower(*o.model);
  if (o.mode) cfg.mode = lower(*o.mode);
  if (o.out) cfg.out_dir = *o.out;
  if (o.dim) cfg.dim = *o.dim;
  if (o.max_iter) cfg.max_iter = *o.max_iter;
  if (o.seed) cfg.seed = *o.seed;
}

ResolvedRun resolve(const ExperimentConfig& cfg) {
  ResolvedRun rr;
  rr.cfg = cfg;

  static const std::set<std::string> problems = {"ex1", "ex2", "ex3", "ex4"};
  if (!problems.count(cfg.problem))
    throw ConfigError("unknown problem '" + cfg.problem + "' (expected ex1|ex2|ex3|ex4)");

  int dim = cfg.dim;
  if (dim < 0) dim = cfg.problem == "ex3" ? 0 : (cfg.problem == "ex4" ? 3 : 1);
  if (cfg.problem == "ex3" && dim != 0)
    throw ConfigError("ex3 is a pure delay ODE; dim must be 0");
  if ((cfg.problem == "ex1" || cfg.problem == "ex2") && dim != 1)
    throw ConfigError(cfg.problem + " is one-dimensional; dim must be 1");
  if (cfg.problem == "ex4" && dim < 1)
    throw ConfigError("ex4 requires dim >= 1");
  rr.cfg.dim = dim;

  try {
    rr.prob = make_benchmark(cfg.problem, dim);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }

  if (cfg.mode != "global" && cfg.mode != "piecewise")
    throw ConfigError("mode must be 'global' or 'piecewise', got '" + cfg.mode + "'");
  if (cfg.mode == "piecewise" && rr.prob.kind == DelayKind::StateDependent)
    throw ConfigError(
        "piecewise fitting is unavailable for state-dependent delays: the "
        "breakpoint cascade depends on the unknown solution (use mode = global)");

  if (cfg.depth < 1) throw ConfigError("depth must be >= 1");
  if (cfg.width < 1) throw ConfigError("width must be >= 1");
  if (cfg.n_f < 1) throw ConfigError("n_f must be >= 1");
  if (cfg.n_i < 1) throw ConfigError("n_i must be >= 1");
  if (cfg.max_iter < 0) throw ConfigError("max_iter must be >= 0");

  try {
    rr.arch.model = model_from_string(cfg.variant);
    rr.arch.sigma1 = act_from_string(cfg.sigma1);
    rr.arch.sigma2 = act_from_string(cfg.sigma2);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  rr.arch.input_dim = 1 + dim;
  rr.arch.widths.assign(static_cast<std::size_t>(cfg.depth), cfg.width);
  rr.arch.apinn_n = cfg.apinn_n;
  try {
    rr.arch.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  rr.lay = make_layout(rr.arch);

  rr.tcfg.n_f = cfg.n_f;
  rr.tcfg.n_i = cfg.n_i;
  rr.tcfg.max_iter = cfg.max_iter;
  rr.tcfg.seed = cfg.seed;

  if (cfg.mode == "piecewise") rr.breakpoints = compute_breakpoints(rr.prob);

  if (cfg.sweep.present) {
    const auto& sw = cfg.sweep;
    if (sw.axes.empty() || sw.axes.size() > 2)
      throw ConfigError("[sweep] axes must name one or two of depth|width|n_f|n_i");
    std::set<std::string> uniq(sw.axes.begin(), sw.axes.end());
    if (uniq.size() != sw.axes.size()) throw ConfigError("[sweep] axes repeat an axis");
    for (const auto& ax : sw.axes) {
      auto it = sw.values.find(ax);
      if (it == sw.values.end() || it->second.empty())
        throw ConfigError("[sweep] axis '" + ax + "' has no value list");
      for (int v : it->second)
        if (v < 1) throw ConfigError("[sweep] values for '" + ax + "' must be >= 1");
    }
    for (const auto& kv : sw.values)
      if (std::find(sw.axes.begin(), sw.axes.end(), kv.first) == sw.axes.end())
        throw ConfigError("[sweep] value list for '" + kv.first + "' without naming it in axes");
    if (sw.repeats < 1) throw ConfigError("[sweep] repeats must be >= 1");
  }

  if (cfg.compare.present) {
    if (cfg.compare.modes.empty())
      throw ConfigError("[compare] requires a non-empty modes list");
    std::set<std::string> uniq;
    for (const auto& m : cfg.compare.modes) {
      if (m != "global" && m != "piecewise")
        throw ConfigError("[compare] unknown mode '" + m + "'");
      if (!uniq.insert(m).second) throw ConfigError("[compare] duplicate mode '" + m + "'");
      if (m == "piecewise" && rr.prob.kind == DelayKind::StateDependent)
        throw ConfigError("[compare] piecewise mode is unavailable for state-dependent delays");
    }
  }

  return rr;
}

std::string config_echo(const ResolvedRun& rr) {
  const ExperimentConfig& c = rr.cfg;
  std::ostringstream o;
  o << "# resolved experiment configuration (re-runnable)\n";
  o << "# tool version " << kToolVersion << "\n";
  if (!c.origin.empty()) o << "# origin: " << c.origin << "\n";
  o << "\n[problem]\nname = " << c.problem << "\ndim = " << c.dim << "\n";
  o << "# t in [" << rr.prob.t0 << ", " << rr.prob.T << "], delay kind "
    << to_string(rr.prob.kind) << ", alpha " << rr.prob.alpha << "\n";
  o << "\n[model]\nvariant = " << to_string(rr.arch.model) << "\ndepth = " << c.depth
    << "\nwidth = " << c.width << "\nsigma1 = " << to_string(rr.arch.sigma1)
    << "\nsigma2 = " << to_string(rr.arch.sigma2) << "\napinn_n = " << c.apinn_n << "\n";
  o << "# trainable parameters: " << rr.lay.total << "\n";
  o << "\n[fit]\nmode = " << c.mode << "\nn_f = " << c.n_f << "\nn_i = " << c.n_i
    << "\nmax_iter = " << c.max_iter << "\nseed = " << c.seed << "\n";
  o << "# derived streams: interior " << mix_seed(c.seed, 11) << ", data "
    << mix_seed(c.seed, 12) << ", parameter init " << c.seed << "\n";
  if (!rr.breakpoints.empty()) {
    o << "# breakpoints:";
    for (double b : rr.breakpoints) o << " " << b;
    o << "\n# subdomain seed masters:";
    for (std::size_t k = 0; k + 1 < rr.breakpoints.size(); ++k)
      o << " " << mix_seed(c.seed, 1000 + k);
    o << "\n";
  }
  if (c.sweep.present) {
    o << "\n[sweep]\naxes = ";
    for (std::size_t i = 0; i < c.sweep.axes.size(); ++i)
      o << (i ? ", " : "") << c.sweep.axes[i];
    o << "\n";
    for (const auto& ax : c.sweep.axes) {
      o << ax << " = ";
      const auto& vals = c.sweep.values.at(ax);
      for (std::size_t i = 0; i < vals.size(); ++i) o << (i ? ", " : "") << vals[i];
      o << "\n";
    }
    o << "repeats = " << c.sweep.repeats << "\n";
    o << "# repeat r uses seed " << c.seed << " + r\n";
  }
  if (c.compare.present) {
    o << "\n[compare]\nmodes = ";
    for (std::size_t i = 0; i < c.compare.modes.size(); ++i)
      o << (i ? ", " : "") << c.compare.modes[i];
    o << "\n";
  }
  if (!c.out_dir.empty()) o << "\n[output]\ndir = " << c.out_dir << "\n";
  return o.str();
}

}  // namespace dann::cli
