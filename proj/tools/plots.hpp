#pragma once

#include <string>
#include <vector>

#include "png.hpp"

namespace dann::plot {

struct Series {
  std::vector<double> x, y;
  Color color;
  std::string name;  // legend entry; empty = not listed
};

struct AxesOpts {
  std::string title, xlabel, ylabel;
  bool logy = false;
  bool legend = true;
};

// One chart per file.
void line_chart(const std::string& path, int w, int h,
                const std::vector<Series>& series, const AxesOpts& opts);

// Horizontal row of independent line panels sharing the canvas.
struct Panel {
  std::vector<Series> series;
  AxesOpts opts;
};
void panel_chart(const std::string& path, int panel_w, int h,
                 const std::vector<Panel>& panels);

// Color map of v over a regular grid: v[iy*nx+ix], ix along x in [x_lo, x_hi],
// iy along y in [y_lo, y_hi] (iy = 0 at y_lo). A labeled color bar shows the
// value range.
void heat_chart(const std::string& path, int w, int h, int nx, int ny,
                const std::vector<double>& v, double x_lo, double x_hi,
                double y_lo, double y_hi, const std::string& title,
                const std::string& xlabel, const std::string& ylabel);

}  // namespace dann::plot
