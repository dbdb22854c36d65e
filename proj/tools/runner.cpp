#include "runner.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "dann/metrics.hpp"
#include "dann/piecewise.hpp"
#include "dann/problem.hpp"
#include "dann/training.hpp"
#include "plots.hpp"

namespace fs = std::filesystem;

namespace dann::cli {

namespace {

using FieldFn = std::function<double(double, std::span<const double>)>;

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

void write_loss_csv(const fs::path& p, const std::vector<TraceRow>& trace) {
  auto f = open_out(p);
  f << "iter,total,residual_term,initial_term,wall_ms\n";
  char buf[200];
  for (const auto& r : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.3f\n", r.iter, r.total,
                  r.residual_term, r.initial_term, r.wall_ms);
    f << buf;
  }
}

void write_theta_csv(const fs::path& p, std::span<const double> theta) {
  auto f = open_out(p);
  for (double v : theta) f << num17(v) << "\n";
}

void write_error_row(std::ostream& f, const ResolvedRun& rr, const std::string& mode,
                     const ErrorStats& es) {
  f << to_string(rr.arch.model) << "," << mode << "," << rr.cfg.problem << "," << rr.cfg.dim
    << "," << num17(es.rel_l2) << "," << num17(es.max_abs) << "," << rr.cfg.seed << "\n";
}

const char* kErrorHeader = "model,fitting_mode,problem,dim,rel_l2,max_abs,seed\n";

void write_field_csv(const fs::path& path, const DelayProblem& p, const FieldFn& field,
                     const PointSet& pts) {
  auto f = open_out(path);
  f << "t";
  for (int k = 1; k <= p.dim; ++k) f << ",x" << k;
  f << ",u_hat,exact,abs_err\n";
  for (int i = 0; i < pts.n; ++i) {
    const auto row = pts.row(i);
    const double t = row[0];
    const auto x = row.subspan(1);
    const double uh = field(t, x);
    const double ue = p.exact_d(t, x);
    f << num17(t);
    for (int k = 0; k < p.dim; ++k) f << "," << num17(x[static_cast<std::size_t>(k)]);
    f << "," << num17(uh) << "," << num17(ue) << "," << num17(std::abs(uh - ue)) << "\n";
  }
}

// Loss curves, one series per training run, log-scale ordinate.
void write_loss_plot(const fs::path& path, const std::vector<const TrainRun*>& runs,
                     const std::vector<std::string>& names) {
  std::vector<plot::Series> ss;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    plot::Series s;
    s.color = plot::series_color(static_cast<int>(i));
    s.name = runs.size() > 1 ? names[i] : std::string();
    for (const auto& r : runs[i]->trace) {
      s.x.push_back(r.iter);
      s.y.push_back(r.total);
    }
    ss.push_back(std::move(s));
  }
  plot::AxesOpts o;
  o.title = "training loss";
  o.xlabel = "iteration";
  o.ylabel = "loss";
  o.logy = true;
  plot::line_chart(path.string(), 960, 600, ss, o);
}

void write_slices_plot(const fs::path& path, const DelayProblem& p, const FieldFn& field) {
  const int n = 201;
  if (p.dim == 0) {
    plot::Series uh, ue;
    uh.color = plot::series_color(0);
    uh.name = "computed";
    ue.color = {0, 0, 0};
    ue.name = "exact";
    for (int i = 0; i < n; ++i) {
      const double t = p.t0 + (p.T - p.t0) * i / (n - 1);
      uh.x.push_back(t);
      uh.y.push_back(field(t, {}));
      ue.x.push_back(t);
      ue.y.push_back(p.exact_d(t, {}));
    }
    plot::AxesOpts o;
    o.title = "solution over time";
    o.xlabel = "t";
    o.ylabel = "u";
    plot::panel_chart(path.string(), 640, 440, {{{uh, ue}, o}});
    return;
  }
  std::vector<double> x(static_cast<std::size_t>(p.dim));
  for (int k = 1; k < p.dim; ++k)
    x[static_cast<std::size_t>(k)] = 0.5 * (p.space[static_cast<std::size_t>(k)].first +
                                            p.space[static_cast<std::size_t>(k)].second);
  const double ts[3] = {p.t0 + 0.25 * (p.T - p.t0), p.t0 + 0.5 * (p.T - p.t0), p.T};
  std::vector<plot::Panel> panels;
  for (double t : ts) {
    plot::Series uh, ue;
    uh.color = plot::series_color(0);
    uh.name = "computed";
    ue.color = {0, 0, 0};
    ue.name = "exact";
    for (int i = 0; i < n; ++i) {
      x[0] = p.space[0].first + (p.space[0].second - p.space[0].first) * i / (n - 1);
      uh.x.push_back(x[0]);
      uh.y.push_back(field(t, x));
      ue.x.push_back(x[0]);
      ue.y.push_back(p.exact_d(t, x));
    }
    plot::AxesOpts o;
    char buf[48];
    std::snprintf(buf, sizeof buf, "t = %.4g", t);
    o.title = buf;
    o.xlabel = "x1";
    o.ylabel = "u";
    o.legend = (t == ts[0]);
    panels.push_back({{uh, ue}, o});
  }
  plot::panel_chart(path.string(), 440, 420, panels);
}

void write_heatmap_plot(const fs::path& path, const DelayProblem& p, const FieldFn& field) {
  const int nt = 101, nx = 101;
  std::vector<double> x(static_cast<std::size_t>(p.dim));
  for (int k = 1; k < p.dim; ++k)
    x[static_cast<std::size_t>(k)] = 0.5 * (p.space[static_cast<std::size_t>(k)].first +
                                            p.space[static_cast<std::size_t>(k)].second);
  std::vector<double> v(static_cast<std::size_t>(nt) * nx);
  for (int iy = 0; iy < nx; ++iy) {
    x[0] = p.space[0].first + (p.space[0].second - p.space[0].first) * iy / (nx - 1);
    for (int it = 0; it < nt; ++it) {
      const double t = p.t0 + (p.T - p.t0) * it / (nt - 1);
      v[static_cast<std::size_t>(iy) * nt + it] = std::abs(field(t, x) - p.exact_d(t, x));
    }
  }
  const std::string title =
      p.dim > 1 ? "absolute error (x2..xd at midpoints)" : "absolute error";
  plot::heat_chart(path.string(), 980, 600, nt, nx, v, p.t0, p.T, p.space[0].first,
                   p.space[0].second, title, "t", "x1");
}

std::uint32_t file_crc32(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + p.string());
  uLong crc = crc32(0L, Z_NULL, 0);
  char buf[1 << 16];
  while (f) {
    f.read(buf, sizeof buf);
    const std::streamsize n = f.gcount();
    if (n > 0) crc = crc32(crc, reinterpret_cast<const Bytef*>(buf), static_cast<uInt>(n));
  }
  return static_cast<std::uint32_t>(crc);
}

// Manifest of every file under `dir` (excluding itself), with size and CRC.
void write_manifest(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() != "manifest.json")
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  nlohmann::json j;
  j["version"] = kToolVersion;
  j["files"] = nlohmann::json::array();
  for (const auto& p : files) {
    char crc[16];
    std::snprintf(crc, sizeof crc, "%08x", file_crc32(p));
    j["files"].push_back({{"name", fs::relative(p, dir).generic_string()},
                          {"bytes", static_cast<std::uint64_t>(fs::file_size(p))},
                          {"crc32", crc}});
  }
  auto f = open_out(dir / "manifest.json");
  f << j.dump(2) << "\n";
}

struct RunOutcome {
  ErrorStats grid;
  std::optional<ErrorStats> lhs;
  double final_loss = 0.0;
  std::string stop;
  bool dead_line_search = false;  // line search failed with zero accepted steps
};

// One full training run with its artifact set. `full` adds the field table
// and the plots; sweeps skip them to keep cell directories light.
RunOutcome run_one(const ResolvedRun& rr, const fs::path& dir, bool full) {
  fs::create_directories(dir);
  {
    auto f = open_out(dir / "config.echo");
    f << config_echo(rr);
  }

  RunOutcome out;
  FieldFn field;
  std::vector<double> theta_keep;
  TrainRun grun;         // global-mode run; outlives every use of `runs`
  PiecewiseSolution pw;  // keeps subnet parameters alive for `field`
  std::vector<const TrainRun*> runs;
  std::vector<std::string> run_names;

  if (rr.cfg.mode == "global") {
    grun = train(rr.prob, rr.arch, rr.tcfg);
    write_loss_csv(dir / "loss.csv", grun.trace);
    write_theta_csv(dir / "theta.csv", grun.theta);
    out.final_loss = grun.final_loss;
    out.stop = to_string(grun.reason);
    out.dead_line_search = grun.reason == StopReason::LineSearchFailed && grun.iters == 0;
    theta_keep = grun.theta;
    const AnsatzEval eval{&rr.prob, &rr.arch, &rr.lay, theta_keep};
    field = [eval](double t, std::span<const double> x) { return eval.value(t, x); };
    runs.push_back(&grun);
    run_names.push_back("global");
  } else {
    pw = train_piecewise(rr.prob, rr.arch, rr.tcfg);
    {
      auto f = open_out(dir / "breakpoints.csv");
      f << "xi\n";
      for (double b : pw.breakpoints) f << num17(b) << "\n";
    }
    for (int k = 0; k < pw.subs(); ++k) {
      const std::string suffix = "_sub" + std::to_string(k);
      write_loss_csv(dir / ("loss" + suffix + ".csv"), pw.runs[static_cast<std::size_t>(k)].trace);
      write_theta_csv(dir / ("theta" + suffix + ".csv"), pw.thetas[static_cast<std::size_t>(k)]);
      runs.push_back(&pw.runs[static_cast<std::size_t>(k)]);
      run_names.push_back("sub " + std::to_string(k));
      const auto& r = pw.runs[static_cast<std::size_t>(k)];
      if (r.reason == StopReason::LineSearchFailed && r.iters == 0) out.dead_line_search = true;
    }
    out.final_loss = pw.runs.back().final_loss;
    out.stop = to_string(pw.runs.back().reason);
    field = [&pw](double t, std::span<const double> x) { return pw.value(t, x); };
  }

  const PointSet grid = default_grid(rr.prob);
  out.grid = field_errors(rr.prob, field, grid);
  {
    auto f = open_out(dir / "errors.csv");
    f << kErrorHeader;
    write_error_row(f, rr, rr.cfg.mode, out.grid);
  }
  if (rr.cfg.dim == 3) {
    // tensor grid in errors.csv, independent low-discrepancy cloud alongside
    out.lhs = field_errors(rr.prob, field, lhs_cloud(rr.prob, 10000));
    auto f = open_out(dir / "errors_lhs.csv");
    f << kErrorHeader;
    write_error_row(f, rr, rr.cfg.mode, *out.lhs);
  }

  if (full) {
    write_field_csv(dir / "field.csv", rr.prob, field, grid);
    write_loss_plot(dir / "loss.png", runs, run_names);
    write_slices_plot(dir / "slices.png", rr.prob, field);
    if (rr.prob.dim >= 1) write_heatmap_plot(dir / "heatmap.png", rr.prob, field);
  }
  return out;
}

fs::path require_out_dir(const ResolvedRun& rr) {
  if (rr.cfg.out_dir.empty())
    throw ConfigError("no output directory: set [output] dir or pass --out");
  return fs::path(rr.cfg.out_dir);
}

}  // namespace

int verb_run(const ResolvedRun& rr) {
  const fs::path dir = require_out_dir(rr);
  const RunOutcome out = run_one(rr, dir, /*full=*/true);
  write_manifest(dir);
  std::printf("run %s: model %s, mode %s, seed %llu\n", rr.cfg.problem.c_str(),
              to_string(rr.arch.model), rr.cfg.mode.c_str(),
              static_cast<unsigned long long>(rr.cfg.seed));
  std::printf("  final loss %.6e, stop %s\n", out.final_loss, out.stop.c_str());
  std::printf("  rel_l2 %.6e, max_abs %.6e (%d grid points)\n", out.grid.rel_l2,
              out.grid.max_abs, out.grid.n);
  if (out.lhs)
    std::printf("  rel_l2 %.6e, max_abs %.6e (lhs cloud, %d points)\n", out.lhs->rel_l2,
                out.lhs->max_abs, out.lhs->n);
  std::printf("  artifacts in %s\n", dir.string().c_str());
  return out.dead_line_search ? 3 : 0;
}

int verb_compare(const ResolvedRun& rr) {
  const fs::path dir = require_out_dir(rr);
  if (!rr.cfg.compare.present)
    throw ConfigError("compare needs a [compare] section (or a *-compare preset)");
  fs::create_directories(dir);
  {
    auto f = open_out(dir / "config.echo");
    f << config_echo(rr);
  }

  static const char* models[] = {"pinn", "apinn", "qres", "isc", "qsc", "dann"};
  auto table = open_out(dir / "errors.csv");
  table << kErrorHeader;
  int code = 0;
  for (const char* m : models) {
    for (const std::string& mode : rr.cfg.compare.modes) {
      ExperimentConfig sub = rr.cfg;
      sub.variant = m;
      sub.mode = mode;
      sub.compare = {};
      sub.out_dir = (dir / (std::string(m) + "-" + mode)).string();
      const ResolvedRun srr = resolve(sub);
      const RunOutcome out = run_one(srr, sub.out_dir, /*full=*/true);
      write_error_row(table, srr, mode, out.grid);
      table.flush();
      if (out.dead_line_search) code = 3;
      std::printf("compare %-6s %-9s rel_l2 %.6e, final loss %.6e\n", m, mode.c_str(),
                  out.grid.rel_l2, out.final_loss);
      std::fflush(stdout);
    }
  }
  table.close();
  write_manifest(dir);
  std::printf("  combined table and artifacts in %s\n", dir.string().c_str());
  return code;
}

int verb_sweep(const ResolvedRun& rr) {
  const fs::path dir = require_out_dir(rr);
  if (!rr.cfg.sweep.present)
    throw ConfigError("sweep needs a [sweep] section in the config");
  fs::create_directories(dir);
  {
    auto f = open_out(dir / "config.echo");
    f << config_echo(rr);
  }

  const SweepSpec& sw = rr.cfg.sweep;
  // Cells: the cross product over one or two axes.
  struct Cell {
    std::vector<std::pair<std::string, int>> coords;
  };
  std::vector<Cell> cells;
  const auto& v0 = sw.values.at(sw.axes[0]);
  if (sw.axes.size() == 1) {
    for (int a : v0) cells.push_back({{{sw.axes[0], a}}});
  } else {
    const auto& v1 = sw.values.at(sw.axes[1]);
    for (int a : v0)
      for (int b : v1) cells.push_back({{{sw.axes[0], a}, {sw.axes[1], b}}});
  }

  auto csv = open_out(dir / "sweep.csv");
  csv << "axis,value,mean_rel_l2,var_rel_l2,n_repeats\n";
  int code = 0;
  for (const auto& cell : cells) {
    std::vector<double> rels;
    for (int r = 0; r < sw.repeats; ++r) {
      ExperimentConfig sub = rr.cfg;
      sub.sweep = {};
      sub.seed = rr.cfg.seed + static_cast<std::uint64_t>(r);
      std::string tag;
      for (const auto& [ax, val] : cell.coords) {
        if (ax == "depth") sub.depth = val;
        else if (ax == "width") sub.width = val;
        else if (ax == "n_f") sub.n_f = val;
        else sub.n_i = val;
        tag += (tag.empty() ? "" : "-") + ax + std::to_string(val);
      }
      sub.out_dir = (dir / (tag + "-r" + std::to_string(r))).string();
      const ResolvedRun srr = resolve(sub);
      const RunOutcome out = run_one(srr, sub.out_dir, /*full=*/false);
      if (out.dead_line_search) code = 3;
      rels.push_back(out.grid.rel_l2);
      std::printf("sweep %s r%d: rel_l2 %.6e\n", tag.c_str(), r, out.grid.rel_l2);
      std::fflush(stdout);
    }
    double mean = 0.0;
    for (double v : rels) mean += v;
    mean /= static_cast<double>(rels.size());
    double var = 0.0;
    if (rels.size() > 1) {
      for (double v : rels) var += (v - mean) * (v - mean);
      var /= static_cast<double>(rels.size() - 1);
    }
    std::string axis = sw.axes[0], value = std::to_string(cell.coords[0].second);
    if (cell.coords.size() == 2) {
      axis += " x " + sw.axes[1];
      value += " x " + std::to_string(cell.coords[1].second);
    }
    csv << axis << "," << value << "," << num17(mean) << "," << num17(var) << ","
        << sw.repeats << "\n";
    csv.flush();
  }
  csv.close();
  write_manifest(dir);
  std::printf("  sweep table and cells in %s\n", dir.string().c_str());
  return code;
}

}  // namespace dann::cli
