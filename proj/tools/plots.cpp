#include "plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace dann::plot {

namespace {

const Color kBlack{0, 0, 0};
const Color kGrid{225, 225, 225};
const Color kGrayText{90, 90, 90};

struct Rect {
  int x0, y0, x1, y1;  // inclusive pixel bounds, y grows downward
  int w() const { return x1 - x0; }
  int h() const { return y1 - y0; }
};

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// 1-2-5 ladder step covering roughly `target` intervals.
double nice_step(double range, int target) {
  if (!(range > 0.0)) return 1.0;
  const double raw = range / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) return m * mag;
  return 10.0 * mag;
}

struct Range {
  double lo = 0.0, hi = 1.0;
};

Range x_range(const std::vector<Series>& series) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series)
    for (double v : s.x) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!(lo <= hi)) return {0.0, 1.0};
  if (lo == hi) return {lo - 0.5, hi + 0.5};
  return {lo, hi};
}

Range y_range(const std::vector<Series>& series, bool logy) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series)
    for (double v : s.y) {
      if (logy && !(v > 0.0)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!(lo <= hi)) return logy ? Range{1e-1, 1e1} : Range{0.0, 1.0};
  if (logy) {
    if (lo == hi) return {lo / 10.0, hi * 10.0};
    return {lo, hi};
  }
  if (lo == hi) return {lo - 0.5, hi + 0.5};
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

class Axes {
 public:
  Axes(Canvas& c, Rect plot, Range xr, Range yr, bool logy)
      : c_(c), p_(plot), xr_(xr), logy_(logy) {
    ylo_ = logy ? std::log10(yr.lo) : yr.lo;
    yhi_ = logy ? std::log10(yr.hi) : yr.hi;
    if (ylo_ == yhi_) {
      ylo_ -= 0.5;
      yhi_ += 0.5;
    }
  }

  int px(double x) const {
    return p_.x0 + static_cast<int>(std::lround((x - xr_.lo) / (xr_.hi - xr_.lo) * p_.w()));
  }
  int py(double y) const {
    const double t = logy_ ? std::log10(y) : y;
    return p_.y1 - static_cast<int>(std::lround((t - ylo_) / (yhi_ - ylo_) * p_.h()));
  }
  int py_raw(double t) const {
    return p_.y1 - static_cast<int>(std::lround((t - ylo_) / (yhi_ - ylo_) * p_.h()));
  }

  void frame_and_ticks() {
    // x ticks
    const double step = nice_step(xr_.hi - xr_.lo, 5);
    for (double v = std::ceil(xr_.lo / step) * step; v <= xr_.hi + 1e-9 * step; v += step) {
      const int x = px(v);
      c_.vline(x, p_.y0, p_.y1, kGrid);
      c_.vline(x, p_.y1, p_.y1 + 4, kBlack);
      const std::string s = fmt_num(v == 0.0 ? 0.0 : v);
      c_.text(x - Canvas::text_width(s) / 2, p_.y1 + 8, s, kGrayText);
    }
    // y ticks
    if (logy_) {
      const int d0 = static_cast<int>(std::floor(ylo_));
      const int d1 = static_cast<int>(std::ceil(yhi_));
      const int span = std::max(1, d1 - d0);
      const int dstep = (span + 7) / 8;
      for (int d = d0; d <= d1; d += dstep) {
        if (d < ylo_ - 1e-9 || d > yhi_ + 1e-9) continue;
        const int y = py_raw(d);
        c_.hline(p_.x0, p_.x1, y, kGrid);
        c_.hline(p_.x0 - 4, p_.x0, y, kBlack);
        char buf[24];
        std::snprintf(buf, sizeof buf, "1e%d", d);
        c_.text(p_.x0 - 8 - Canvas::text_width(buf), y - Canvas::text_height() / 2, buf,
                kGrayText);
      }
    } else {
      const double step = nice_step(yhi_ - ylo_, 5);
      for (double v = std::ceil(ylo_ / step) * step; v <= yhi_ + 1e-9 * step; v += step) {
        const int y = py_raw(v);
        c_.hline(p_.x0, p_.x1, y, kGrid);
        c_.hline(p_.x0 - 4, p_.x0, y, kBlack);
        const std::string s = fmt_num(v == 0.0 ? 0.0 : v);
        c_.text(p_.x0 - 8 - Canvas::text_width(s), y - Canvas::text_height() / 2, s, kGrayText);
      }
    }
    // frame on top of gridlines
    c_.hline(p_.x0, p_.x1, p_.y0, kBlack);
    c_.hline(p_.x0, p_.x1, p_.y1, kBlack);
    c_.vline(p_.x0, p_.y0, p_.y1, kBlack);
    c_.vline(p_.x1, p_.y0, p_.y1, kBlack);
  }

  void polyline(const Series& s) {
    int lx = 0, ly = 0;
    bool have = false;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (logy_ && !(s.y[i] > 0.0)) {
        have = false;
        continue;
      }
      const int x = px(s.x[i]), y = py(s.y[i]);
      if (have) c_.thick_line(lx, ly, x, y, s.color, 1);
      lx = x;
      ly = y;
      have = true;
    }
    if (s.x.size() == 1 && (!logy_ || s.y[0] > 0.0))
      c_.fill_rect(px(s.x[0]) - 2, py(s.y[0]) - 2, px(s.x[0]) + 2, py(s.y[0]) + 2, s.color);
  }

  Rect plot() const { return p_; }

 private:
  Canvas& c_;
  Rect p_;
  Range xr_;
  bool logy_;
  double ylo_ = 0.0, yhi_ = 1.0;
};

void draw_panel(Canvas& c, Rect outer, const std::vector<Series>& series,
                const AxesOpts& opts) {
  const Rect plot{outer.x0 + 78, outer.y0 + 30, outer.x1 - 16, outer.y1 - 50};
  Axes ax(c, plot, x_range(series), y_range(series, opts.logy), opts.logy);
  ax.frame_and_ticks();
  for (const auto& s : series) ax.polyline(s);

  c.text(outer.x0 + (outer.w() - Canvas::text_width(opts.title)) / 2, outer.y0 + 6, opts.title,
         kBlack);
  c.text(plot.x0 + (plot.w() - Canvas::text_width(opts.xlabel)) / 2, outer.y1 - 24, opts.xlabel,
         kGrayText);
  // y label, horizontal at the top-left of the plot frame
  c.text(outer.x0 + 6, plot.y0 - 22, opts.ylabel, kGrayText);

  if (opts.legend) {
    int entries = 0, wmax = 0;
    for (const auto& s : series)
      if (!s.name.empty()) {
        ++entries;
        wmax = std::max(wmax, Canvas::text_width(s.name));
      }
    if (entries) {
      const int lh = Canvas::text_height() + 6;
      const int bw = wmax + 34, bh = entries * lh + 8;
      const int bx = plot.x1 - bw - 8, by = plot.y0 + 8;
      c.fill_rect(bx, by, bx + bw, by + bh, {252, 252, 252});
      c.hline(bx, bx + bw, by, kBlack);
      c.hline(bx, bx + bw, by + bh, kBlack);
      c.vline(bx, by, by + bh, kBlack);
      c.vline(bx + bw, by, by + bh, kBlack);
      int row = 0;
      for (const auto& s : series) {
        if (s.name.empty()) continue;
        const int y = by + 6 + row * lh;
        c.thick_line(bx + 6, y + Canvas::text_height() / 2, bx + 22,
                     y + Canvas::text_height() / 2, s.color, 1);
        c.text(bx + 28, y, s.name, kBlack);
        ++row;
      }
    }
  }
}

}  // namespace

void line_chart(const std::string& path, int w, int h,
                const std::vector<Series>& series, const AxesOpts& opts) {
  Canvas c(w, h);
  draw_panel(c, {0, 0, w - 1, h - 1}, series, opts);
  c.write_png(path);
}

void panel_chart(const std::string& path, int panel_w, int h,
                 const std::vector<Panel>& panels) {
  const int n = std::max<std::size_t>(1, panels.size());
  Canvas c(panel_w * n, h);
  for (std::size_t i = 0; i < panels.size(); ++i)
    draw_panel(c, {static_cast<int>(i) * panel_w, 0, static_cast<int>(i + 1) * panel_w - 1, h - 1},
               panels[i].series, panels[i].opts);
  c.write_png(path);
}

void heat_chart(const std::string& path, int w, int h, int nx, int ny,
                const std::vector<double>& v, double x_lo, double x_hi,
                double y_lo, double y_hi, const std::string& title,
                const std::string& xlabel, const std::string& ylabel) {
  Canvas c(w, h);
  const Rect plot{78, 30, w - 110, h - 50};

  double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
  for (double t : v) {
    vmin = std::min(vmin, t);
    vmax = std::max(vmax, t);
  }
  if (!(vmin <= vmax)) {
    vmin = 0.0;
    vmax = 1.0;
  }
  const double span = vmax > vmin ? vmax - vmin : 1.0;

  for (int py = plot.y0; py <= plot.y1; ++py) {
    // pixel row -> grid row; y grows upward in data space
    const double fy = static_cast<double>(plot.y1 - py) / std::max(1, plot.h());
    const int iy = std::min(ny - 1, static_cast<int>(fy * ny));
    for (int px = plot.x0; px <= plot.x1; ++px) {
      const double fx = static_cast<double>(px - plot.x0) / std::max(1, plot.w());
      const int ix = std::min(nx - 1, static_cast<int>(fx * nx));
      c.set(px, py, heat_color((v[static_cast<std::size_t>(iy) * nx + ix] - vmin) / span));
    }
  }

  // frame and ticks
  c.hline(plot.x0, plot.x1, plot.y0, kBlack);
  c.hline(plot.x0, plot.x1, plot.y1, kBlack);
  c.vline(plot.x0, plot.y0, plot.y1, kBlack);
  c.vline(plot.x1, plot.y0, plot.y1, kBlack);
  const double xstep = nice_step(x_hi - x_lo, 5);
  for (double t = std::ceil(x_lo / xstep) * xstep; t <= x_hi + 1e-9 * xstep; t += xstep) {
    const int x =
        plot.x0 + static_cast<int>(std::lround((t - x_lo) / (x_hi - x_lo) * plot.w()));
    c.vline(x, plot.y1, plot.y1 + 4, kBlack);
    const std::string s = fmt_num(t == 0.0 ? 0.0 : t);
    c.text(x - Canvas::text_width(s) / 2, plot.y1 + 8, s, kGrayText);
  }
  const double ystep = nice_step(y_hi - y_lo, 5);
  for (double t = std::ceil(y_lo / ystep) * ystep; t <= y_hi + 1e-9 * ystep; t += ystep) {
    const int y =
        plot.y1 - static_cast<int>(std::lround((t - y_lo) / (y_hi - y_lo) * plot.h()));
    c.hline(plot.x0 - 4, plot.x0, y, kBlack);
    const std::string s = fmt_num(t == 0.0 ? 0.0 : t);
    c.text(plot.x0 - 8 - Canvas::text_width(s), y - Canvas::text_height() / 2, s, kGrayText);
  }

  // color bar
  const int bx0 = w - 92, bx1 = w - 72;
  for (int py = plot.y0; py <= plot.y1; ++py) {
    const double f = static_cast<double>(plot.y1 - py) / std::max(1, plot.h());
    for (int px = bx0; px <= bx1; ++px) c.set(px, py, heat_color(f));
  }
  c.hline(bx0, bx1, plot.y0, kBlack);
  c.hline(bx0, bx1, plot.y1, kBlack);
  c.vline(bx0, plot.y0, plot.y1, kBlack);
  c.vline(bx1, plot.y0, plot.y1, kBlack);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2e", vmax);
  c.text(bx0 - 10, plot.y0 - Canvas::text_height() - 4, buf, kGrayText);
  std::snprintf(buf, sizeof buf, "%.2e", vmin);
  c.text(bx0 - 10, plot.y1 + 8, buf, kGrayText);

  c.text((w - Canvas::text_width(title)) / 2, 6, title, kBlack);
  c.text(plot.x0 + (plot.w() - Canvas::text_width(xlabel)) / 2, h - 24, xlabel, kGrayText);
  c.text(6, plot.y0 - 22, ylabel, kGrayText);

  c.write_png(path);
}

}  // namespace dann::plot
