#include "png.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace dann::plot {

Color series_color(int i) {
  static const Color pal[] = {
      {31, 119, 180},   // blue
      {255, 127, 14},   // orange
      {44, 160, 44},    // green
      {214, 39, 40},    // red
      {148, 103, 189},  // purple
      {140, 86, 75},    // brown
      {227, 119, 194},  // pink
      {127, 127, 127},  // gray
  };
  return pal[static_cast<unsigned>(i) % (sizeof(pal) / sizeof(pal[0]))];
}

Color heat_color(double t) {
  // Piecewise-linear ramp through viridis-like anchors.
  static const double stops[][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  const int n = 5;
  t = std::clamp(t, 0.0, 1.0);
  const double s = t * (n - 1);
  const int k = std::min(static_cast<int>(s), n - 2);
  const double f = s - k;
  auto mix = [&](int c) {
    return static_cast<std::uint8_t>(std::lround(stops[k][c] + f * (stops[k + 1][c] - stops[k][c])));
  };
  return {mix(0), mix(1), mix(2)};
}

Canvas::Canvas(int w, int h, Color bg) : w_(w), h_(h), px_(static_cast<std::size_t>(w) * h * 3) {
  for (std::size_t i = 0; i < px_.size(); i += 3) {
    px_[i] = bg.r;
    px_[i + 1] = bg.g;
    px_[i + 2] = bg.b;
  }
}

void Canvas::set(int x, int y, Color c) {
  if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
  const std::size_t i = 3 * (static_cast<std::size_t>(y) * w_ + x);
  px_[i] = c.r;
  px_[i + 1] = c.g;
  px_[i + 2] = c.b;
}

void Canvas::fill_rect(int x0, int y0, int x1, int y1, Color c) {
  if (x0 > x1) std::swap(x0, x1);
  if (y0 > y1) std::swap(y0, y1);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) set(x, y, c);
}

void Canvas::hline(int x0, int x1, int y, Color c) { fill_rect(x0, y, x1, y, c); }
void Canvas::vline(int x, int y0, int y1, Color c) { fill_rect(x, y0, x, y1, c); }

void Canvas::line(int x0, int y0, int x1, int y1, Color c) {
  // Bresenham over the longer axis.
  const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    set(x0, y0, c);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void Canvas::thick_line(int x0, int y0, int x1, int y1, Color c, int half) {
  if (half <= 0) {
    line(x0, y0, x1, y1, c);
    return;
  }
  // Offset perpendicular to the dominant direction.
  if (std::abs(x1 - x0) >= std::abs(y1 - y0)) {
    for (int o = -half; o <= half; ++o) line(x0, y0 + o, x1, y1 + o, c);
  } else {
    for (int o = -half; o <= half; ++o) line(x0 + o, y0, x1 + o, y1, c);
  }
}

namespace {

// 5x7 glyphs, 35 cells row-major, 'X' marks an inked pixel.
struct Glyph {
  char ch;
  const char* rows;  // 7 rows x 5 columns
};

const Glyph kFont[] = {
    {'0',
     ".XXX."
     "X...X"
     "X..XX"
     "X.X.X"
     "XX..X"
     "X...X"
     ".XXX."},
    {'1',
     "..X.."
     ".XX.."
     "..X.."
     "..X.."
     "..X.."
     "..X.."
     ".XXX."},
    {'2',
     ".XXX."
     "X...X"
     "....X"
     "...X."
     "..X.."
     ".X..."
     "XXXXX"},
    {'3',
     ".XXX."
     "X...X"
     "....X"
     "..XX."
     "....X"
     "X...X"
     ".XXX."},
    {'4',
     "...X."
     "..XX."
     ".X.X."
     "X..X."
     "XXXXX"
     "...X."
     "...X."},
    {'5',
     "XXXXX"
     "X...."
     "XXXX."
     "....X"
     "....X"
     "X...X"
     ".XXX."},
    {'6',
     ".XXX."
     "X...."
     "X...."
     "XXXX."
     "X...X"
     "X...X"
     ".XXX."},
    {'7',
     "XXXXX"
     "....X"
     "...X."
     "..X.."
     ".X..."
     ".X..."
     ".X..."},
    {'8',
     ".XXX."
     "X...X"
     "X...X"
     ".XXX."
     "X...X"
     "X...X"
     ".XXX."},
    {'9',
     ".XXX."
     "X...X"
     "X...X"
     ".XXXX"
     "....X"
     "....X"
     ".XXX."},
    {'A',
     "..X.."
     ".X.X."
     "X...X"
     "X...X"
     "XXXXX"
     "X...X"
     "X...X"},
    {'B',
     "XXXX."
     "X...X"
     "X...X"
     "XXXX."
     "X...X"
     "X...X"
     "XXXX."},
    {'C',
     ".XXX."
     "X...X"
     "X...."
     "X...."
     "X...."
     "X...X"
     ".XXX."},
    {'D',
     "XXXX."
     "X...X"
     "X...X"
     "X...X"
     "X...X"
     "X...X"
     "XXXX."},
    {'E',
     "XXXXX"
     "X...."
     "X...."
     "XXXX."
     "X...."
     "X...."
     "XXXXX"},
    {'F',
     "XXXXX"
     "X...."
     "X...."
     "XXXX."
     "X...."
     "X...."
     "X...."},
    {'G',
     ".XXX."
     "X...X"
     "X...."
     "X.XXX"
     "X...X"
     "X...X"
     ".XXXX"},
    {'H',
     "X...X"
     "X...X"
     "X...X"
     "XXXXX"
     "X...X"
     "X...X"
     "X...X"},
    {'I',
     ".XXX."
     "..X.."
     "..X.."
     "..X.."
     "..X.."
     "..X.."
     ".XXX."},
    {'J',
     "..XXX"
     "...X."
     "...X."
     "...X."
     "...X."
     "X..X."
     ".XX.."},
    {'K',
     "X...X"
     "X..X."
     "X.X.."
     "XX..."
     "X.X.."
     "X..X."
     "X...X"},
    {'L',
     "X...."
     "X...."
     "X...."
     "X...."
     "X...."
     "X...."
     "XXXXX"},
    {'M',
     "X...X"
     "XX.XX"
     "X.X.X"
     "X.X.X"
     "X...X"
     "X...X"
     "X...X"},
    {'N',
     "X...X"
     "XX..X"
     "X.X.X"
     "X..XX"
     "X...X"
     "X...X"
     "X...X"},
    {'O',
     ".XXX."
     "X...X"
     "X...X"
     "X...X"
     "X...X"
     "X...X"
     ".XXX."},
    {'P',
     "XXXX."
     "X...X"
     "X...X"
     "XXXX."
     "X...."
     "X...."
     "X...."},
    {'Q',
     ".XXX."
     "X...X"
     "X...X"
     "X...X"
     "X.X.X"
     "X..X."
     ".XX.X"},
    {'R',
     "XXXX."
     "X...X"
     "X...X"
     "XXXX."
     "X.X.."
     "X..X."
     "X...X"},
    {'S',
     ".XXXX"
     "X...."
     "X...."
     ".XXX."
     "....X"
     "....X"
     "XXXX."},
    {'T',
     "XXXXX"
     "..X.."
     "..X.."
     "..X.."
     "..X.."
     "..X.."
     "..X.."},
    {'U',
     "X...X"
     "X...X"
     "X...X"
     "X...X"
     "X...X"
     "X...X"
     ".XXX."},
    {'V',
     "X...X"
     "X...X"
     "X...X"
     "X...X"
     "X...X"
     ".X.X."
     "..X.."},
    {'W',
     "X...X"
     "X...X"
     "X...X"
     "X.X.X"
     "X.X.X"
     "XX.XX"
     "X...X"},
    {'X',
     "X...X"
     "X...X"
     ".X.X."
     "..X.."
     ".X.X."
     "X...X"
     "X...X"},
    {'Y',
     "X...X"
     "X...X"
     ".X.X."
     "..X.."
     "..X.."
     "..X.."
     "..X.."},
    {'Z',
     "XXXXX"
     "....X"
     "...X."
     "..X.."
     ".X..."
     "X...."
     "XXXXX"},
    {'a',
     "....."
     "....."
     ".XXX."
     "....X"
     ".XXXX"
     "X...X"
     ".XXXX"},
    {'b',
     "X...."
     "X...."
     "XXXX."
     "X...X"
     "X...X"
     "X...X"
     "XXXX."},
    {'c',
     "....."
     "....."
     ".XXX."
     "X...."
     "X...."
     "X...X"
     ".XXX."},
    {'d',
     "....X"
     "....X"
     ".XXXX"
     "X...X"
     "X...X"
     "X...X"
     ".XXXX"},
    {'e',
     "....."
     "....."
     ".XXX."
     "X...X"
     "XXXXX"
     "X...."
     ".XXX."},
    {'f',
     "..XX."
     ".X..X"
     ".X..."
     "XXX.."
     ".X..."
     ".X..."
     ".X..."},
    {'g',
     "....."
     ".XXXX"
     "X...X"
     "X...X"
     ".XXXX"
     "....X"
     ".XXX."},
    {'h',
     "X...."
     "X...."
     "XXXX."
     "X...X"
     "X...X"
     "X...X"
     "X...X"},
    {'i',
     "..X.."
     "....."
     ".XX.."
     "..X.."
     "..X.."
     "..X.."
     ".XXX."},
    {'j',
     "...X."
     "....."
     "..XX."
     "...X."
     "...X."
     "X..X."
     ".XX.."},
    {'k',
     "X...."
     "X...."
     "X..X."
     "X.X.."
     "XX..."
     "X.X.."
     "X..X."},
    {'l',
     ".XX.."
     "..X.."
     "..X.."
     "..X.."
     "..X.."
     "..X.."
     ".XXX."},
    {'m',
     "....."
     "....."
     "XX.X."
     "X.X.X"
     "X.X.X"
     "X.X.X"
     "X.X.X"},
    {'n',
     "....."
     "....."
     "XXXX."
     "X...X"
     "X...X"
     "X...X"
     "X...X"},
    {'o',
     "....."
     "....."
     ".XXX."
     "X...X"
     "X...X"
     "X...X"
     ".XXX."},
    {'p',
     "....."
     "XXXX."
     "X...X"
     "X...X"
     "XXXX."
     "X...."
     "X...."},
    {'q',
     "....."
     ".XXXX"
     "X...X"
     "X...X"
     ".XXXX"
     "....X"
     "....X"},
    {'r',
     "....."
     "....."
     "X.XX."
     "XX..X"
     "X...."
     "X...."
     "X...."},
    {'s',
     "....."
     "....."
     ".XXXX"
     "X...."
     ".XXX."
     "....X"
     "XXXX."},
    {'t',
     ".X..."
     ".X..."
     "XXX.."
     ".X..."
     ".X..."
     ".X..X"
     "..XX."},
    {'u',
     "....."
     "....."
     "X...X"
     "X...X"
     "X...X"
     "X...X"
     ".XXXX"},
    {'v',
     "....."
     "....."
     "X...X"
     "X...X"
     "X...X"
     ".X.X."
     "..X.."},
    {'w',
     "....."
     "....."
     "X...X"
     "X...X"
     "X.X.X"
     "X.X.X"
     ".X.X."},
    {'x',
     "....."
     "....."
     "X...X"
     ".X.X."
     "..X.."
     ".X.X."
     "X...X"},
    {'y',
     "....."
     "X...X"
     "X...X"
     "X...X"
     ".XXXX"
     "....X"
     ".XXX."},
    {'z',
     "....."
     "....."
     "XXXXX"
     "...X."
     "..X.."
     ".X..."
     "XXXXX"},
    {'.',
     "....."
     "....."
     "....."
     "....."
     "....."
     ".XX.."
     ".XX.."},
    {',',
     "....."
     "....."
     "....."
     "....."
     ".XX.."
     "..X.."
     ".X..."},
    {':',
     "....."
     ".XX.."
     ".XX.."
     "....."
     ".XX.."
     ".XX.."
     "....."},
    {'-',
     "....."
     "....."
     "....."
     "XXXXX"
     "....."
     "....."
     "....."},
    {'+',
     "....."
     "..X.."
     "..X.."
     "XXXXX"
     "..X.."
     "..X.."
     "....."},
    {'=',
     "....."
     "....."
     "XXXXX"
     "....."
     "XXXXX"
     "....."
     "....."},
    {'_',
     "....."
     "....."
     "....."
     "....."
     "....."
     "....."
     "XXXXX"},
    {'(',
     "...X."
     "..X.."
     ".X..."
     ".X..."
     ".X..."
     "..X.."
     "...X."},
    {')',
     ".X..."
     "..X.."
     "...X."
     "...X."
     "...X."
     "..X.."
     ".X..."},
    {'[',
     ".XXX."
     ".X..."
     ".X..."
     ".X..."
     ".X..."
     ".X..."
     ".XXX."},
    {']',
     ".XXX."
     "...X."
     "...X."
     "...X."
     "...X."
     "...X."
     ".XXX."},
    {'/',
     "....X"
     "....X"
     "...X."
     "..X.."
     ".X..."
     "X...."
     "X...."},
    {'%',
     "XX..X"
     "XX..X"
     "...X."
     "..X.."
     ".X..."
     "X..XX"
     "X..XX"},
    {'*',
     "....."
     "X.X.X"
     ".XXX."
     "XXXXX"
     ".XXX."
     "X.X.X"
     "....."},
    {'^',
     "..X.."
     ".X.X."
     "X...X"
     "....."
     "....."
     "....."
     "....."},
    {'<',
     "...X."
     "..X.."
     ".X..."
     "X...."
     ".X..."
     "..X.."
     "...X."},
    {'>',
     ".X..."
     "..X.."
     "...X."
     "....X"
     "...X."
     "..X.."
     ".X..."},
    {'|',
     "..X.."
     "..X.."
     "..X.."
     "..X.."
     "..X.."
     "..X.."
     "..X.."},
    {'\'',
     "..X.."
     "..X.."
     ".X..."
     "....."
     "....."
     "....."
     "....."},
};

const char* glyph_rows(char c) {
  for (const auto& g : kFont)
    if (g.ch == c) return g.rows;
  return nullptr;
}

void put_be32(std::vector<std::uint8_t>& v, std::uint32_t x) {
  v.push_back(static_cast<std::uint8_t>(x >> 24));
  v.push_back(static_cast<std::uint8_t>(x >> 16));
  v.push_back(static_cast<std::uint8_t>(x >> 8));
  v.push_back(static_cast<std::uint8_t>(x));
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::uint8_t* data, std::size_t len) {
  put_be32(out, static_cast<std::uint32_t>(len));
  const std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  if (len) out.insert(out.end(), data, data + len);
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, out.data() + start, static_cast<uInt>(4 + len));
  put_be32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

int Canvas::text(int x, int y, const std::string& s, Color c, int scale) {
  int cx = x;
  for (char ch : s) {
    if (ch == ' ') {
      cx += 6 * scale;
      continue;
    }
    const char* rows = glyph_rows(ch);
    if (!rows) {  // hollow placeholder box
      for (int r = 0; r < 7; ++r)
        for (int k = 0; k < 5; ++k)
          if (r == 0 || r == 6 || k == 0 || k == 4)
            fill_rect(cx + k * scale, y + r * scale, cx + k * scale + scale - 1,
                      y + r * scale + scale - 1, c);
      cx += 6 * scale;
      continue;
    }
    for (int r = 0; r < 7; ++r)
      for (int k = 0; k < 5; ++k)
        if (rows[r * 5 + k] == 'X')
          fill_rect(cx + k * scale, y + r * scale, cx + k * scale + scale - 1,
                    y + r * scale + scale - 1, c);
    cx += 6 * scale;
  }
  return cx - x;
}

int Canvas::text_width(const std::string& s, int scale) {
  return static_cast<int>(s.size()) * 6 * scale;
}

int Canvas::text_height(int scale) { return 7 * scale; }

void Canvas::write_png(const std::string& path) const {
  // One filter byte (0 = none) per scanline, then raw RGB.
  const std::size_t stride = static_cast<std::size_t>(w_) * 3;
  std::vector<std::uint8_t> raw((stride + 1) * h_);
  for (int y = 0; y < h_; ++y) {
    raw[(stride + 1) * y] = 0;
    std::memcpy(&raw[(stride + 1) * y + 1], &px_[stride * y], stride);
  }

  uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> comp(comp_len);
  if (compress2(comp.data(), &comp_len, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK)
    throw std::runtime_error("png: deflate failed");
  comp.resize(comp_len);

  std::vector<std::uint8_t> out;
  static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  out.insert(out.end(), sig, sig + 8);

  std::vector<std::uint8_t> ihdr;
  put_be32(ihdr, static_cast<std::uint32_t>(w_));
  put_be32(ihdr, static_cast<std::uint32_t>(h_));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(2);  // truecolor
  ihdr.push_back(0);  // deflate
  ihdr.push_back(0);  // adaptive filtering
  ihdr.push_back(0);  // no interlace
  append_chunk(out, "IHDR", ihdr.data(), ihdr.size());
  append_chunk(out, "IDAT", comp.data(), comp.size());
  append_chunk(out, "IEND", nullptr, 0);

  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("png: cannot open " + path);
  const std::size_t n = std::fwrite(out.data(), 1, out.size(), f);
  std::fclose(f);
  if (n != out.size()) throw std::runtime_error("png: short write to " + path);
}

}  // namespace dann::plot
