#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dann::plot {

struct Color {
  std::uint8_t r = 0, g = 0, b = 0;
};

// Fixed palette used for data series, in a stable order.
Color series_color(int i);

// Perceptually ordered dark-to-bright colormap for magnitude fields.
Color heat_color(double t);  // t in [0, 1]

// Plain RGB raster with integer pixel coordinates, (0,0) top-left.
class Canvas {
 public:
  Canvas(int w, int h, Color bg = {255, 255, 255});

  int width() const { return w_; }
  int height() const { return h_; }

  void set(int x, int y, Color c);
  void fill_rect(int x0, int y0, int x1, int y1, Color c);  // inclusive corners
  void hline(int x0, int x1, int y, Color c);
  void vline(int x, int y0, int y1, Color c);
  void line(int x0, int y0, int x1, int y1, Color c);
  // Line of the given half-thickness (0 = single pixel).
  void thick_line(int x0, int y0, int x1, int y1, Color c, int half);

  // 5x7 bitmap font scaled by an integer factor; returns the advance width.
  // Unknown characters render as a hollow box.
  int text(int x, int y, const std::string& s, Color c, int scale = 2);
  static int text_width(const std::string& s, int scale = 2);
  static int text_height(int scale = 2);

  // Truecolor 8-bit PNG via zlib. Throws std::runtime_error on I/O failure.
  void write_png(const std::string& path) const;

 private:
  int w_, h_;
  std::vector<std::uint8_t> px_;
};

}  // namespace dann::plot
