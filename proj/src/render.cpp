#include "specbench/render.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "specbench/errors.hpp"
#include "specbench/format.hpp"

namespace specbench {

Image::Image(int w, int h, Rgb fill) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3) {
  for (std::size_t i = 0; i < rgb.size(); i += 3) {
    rgb[i] = fill.r;
    rgb[i + 1] = fill.g;
    rgb[i + 2] = fill.b;
  }
}

Rgb Image::at(int x, int y) const {
  const auto i = (static_cast<std::size_t>(y) * width + x) * 3;
  return {rgb[i], rgb[i + 1], rgb[i + 2]};
}

// ---------------------------------------------------------------------------
// PNG

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void put_chunk(std::vector<std::uint8_t>& out, const char* type, const std::vector<std::uint8_t>& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t type_at = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const uLong crc = crc32(0L, out.data() + type_at, static_cast<uInt>(4 + data.size()));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

std::vector<std::uint8_t> encode_png(const Image& image) {
  if (image.width <= 0 || image.height <= 0 ||
      image.rgb.size() != static_cast<std::size_t>(image.width) * image.height * 3) {
    throw RenderFailure("image buffer does not match its dimensions");
  }
  const std::size_t stride = static_cast<std::size_t>(image.width) * 3;
  std::vector<std::uint8_t> raw;
  raw.reserve((stride + 1) * image.height);
  for (int y = 0; y < image.height; ++y) {
    // Sub filter: each byte minus the byte one pixel to the left.
    raw.push_back(1);
    const std::uint8_t* row = image.rgb.data() + y * stride;
    for (std::size_t i = 0; i < stride; ++i)
      raw.push_back(static_cast<std::uint8_t>(row[i] - (i >= 3 ? row[i - 3] : 0)));
  }

  uLongf packed_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> packed(packed_len);
  if (compress2(packed.data(), &packed_len, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw RenderFailure("zlib compression failed");
  packed.resize(packed_len);

  std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(image.width));
  put_u32(ihdr, static_cast<std::uint32_t>(image.height));
  ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0});  // 8-bit, truecolour, deflate, adaptive, no interlace
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", packed);
  put_chunk(out, "IEND", {});
  return out;
}

// ---------------------------------------------------------------------------
// Canvas

namespace {

// 5x7 glyphs, one byte per row, bit 4 is the leftmost column.
const std::map<char, std::array<std::uint8_t, 7>>& font() {
  static const std::map<char, std::array<std::uint8_t, 7>> f = {
      {' ', {0, 0, 0, 0, 0, 0, 0}},
      {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
      {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
      {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
      {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
      {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
      {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
      {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
      {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
      {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
      {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
      {'A', {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
      {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
      {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}},
      {'D', {0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C}},
      {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}},
      {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
      {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}},
      {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
      {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
      {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
      {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}},
      {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
      {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}},
      {'N', {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11}},
      {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
      {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
      {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}},
      {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
      {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}},
      {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
      {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
      {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
      {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}},
      {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
      {'Y', {0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04}},
      {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
      {'.', {0, 0, 0, 0, 0, 0x0C, 0x0C}},
      {',', {0, 0, 0, 0, 0x0C, 0x04, 0x08}},
      {':', {0, 0x0C, 0x0C, 0, 0x0C, 0x0C, 0}},
      {'-', {0, 0, 0, 0x1F, 0, 0, 0}},
      {'+', {0, 0x04, 0x04, 0x1F, 0x04, 0x04, 0}},
      {'_', {0, 0, 0, 0, 0, 0, 0x1F}},
      {'=', {0, 0, 0x1F, 0, 0x1F, 0, 0}},
      {'/', {0, 0x01, 0x02, 0x04, 0x08, 0x10, 0}},
      {'(', {0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02}},
      {')', {0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08}},
      {'%', {0x18, 0x19, 0x02, 0x04, 0x08, 0x13, 0x03}},
      {'?', {0x0E, 0x11, 0x01, 0x02, 0x04, 0, 0x04}},
  };
  return f;
}

constexpr Rgb kBlack{0, 0, 0};
constexpr Rgb kAxis{60, 60, 60};
constexpr Rgb kTrace{31, 119, 180};
constexpr Rgb kPeak{128, 128, 128};
constexpr Rgb kRidge{20, 20, 20};
constexpr Rgb kVein{214, 39, 40};
constexpr Rgb kPairLine{90, 90, 90};
constexpr Rgb kBest{220, 30, 30};

/// Colour of a selection as a pure function of its order.
Rgb selection_colour(int order) {
  static constexpr Rgb palette[] = {{228, 26, 28},  {55, 126, 184}, {77, 175, 74},  {152, 78, 163},
                                    {255, 127, 0},  {166, 86, 40},  {247, 129, 191}, {0, 160, 160},
                                    {188, 189, 34}, {23, 190, 207}};
  const int n = static_cast<int>(std::size(palette));
  return palette[((order - 1) % n + n) % n];
}

Rgb colormap(double t) {
  static constexpr std::array<Rgb, 5> anchors = {
      Rgb{68, 1, 84}, Rgb{59, 82, 139}, Rgb{33, 145, 140}, Rgb{94, 201, 98}, Rgb{253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * (anchors.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), anchors.size() - 2);
  const double f = t - static_cast<double>(i);
  auto mix = [&](std::uint8_t a, std::uint8_t b) {
    return static_cast<std::uint8_t>(std::lround(a + (b - a) * f));
  };
  return {mix(anchors[i].r, anchors[i + 1].r), mix(anchors[i].g, anchors[i + 1].g),
          mix(anchors[i].b, anchors[i + 1].b)};
}

class Canvas {
 public:
  explicit Canvas(Image& img) : img_(img) {}

  void set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= img_.width || y >= img_.height) return;
    auto* p = &img_.rgb[(static_cast<std::size_t>(y) * img_.width + x) * 3];
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }

  /// alpha in 1/256 steps so blending stays in integers.
  void blend(int x, int y, Rgb c, int alpha) {
    if (x < 0 || y < 0 || x >= img_.width || y >= img_.height) return;
    auto* p = &img_.rgb[(static_cast<std::size_t>(y) * img_.width + x) * 3];
    p[0] = static_cast<std::uint8_t>((c.r * alpha + p[0] * (256 - alpha)) >> 8);
    p[1] = static_cast<std::uint8_t>((c.g * alpha + p[1] * (256 - alpha)) >> 8);
    p[2] = static_cast<std::uint8_t>((c.b * alpha + p[2] * (256 - alpha)) >> 8);
  }

  void fill_rect(int x, int y, int w, int h, Rgb c) {
    for (int j = y; j < y + h; ++j)
      for (int i = x; i < x + w; ++i) set(i, j, c);
  }

  void rect(int x, int y, int w, int h, Rgb c, int thickness = 1) {
    for (int t = 0; t < thickness; ++t) {
      fill_rect(x + t, y + t, w - 2 * t, 1, c);
      fill_rect(x + t, y + h - 1 - t, w - 2 * t, 1, c);
      fill_rect(x + t, y + t, 1, h - 2 * t, c);
      fill_rect(x + w - 1 - t, y + t, 1, h - 2 * t, c);
    }
  }

  /// Bresenham; dash > 0 draws `dash` pixels on, `dash` off.
  void line(int x0, int y0, int x1, int y1, Rgb c, int thickness = 1, int dash = 0) {
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    int step = 0;
    for (;;) {
      if (dash <= 0 || (step / dash) % 2 == 0) dot(x0, y0, c, thickness);
      ++step;
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) { err += dy; x0 += sx; }
      if (e2 <= dx) { err += dx; y0 += sy; }
    }
  }

  void circle(int cx, int cy, int r, Rgb c, bool filled) {
    for (int y = -r; y <= r; ++y) {
      for (int x = -r; x <= r; ++x) {
        const int d2 = x * x + y * y;
        if (filled ? d2 <= r * r : (d2 <= r * r && d2 > (r - 2) * (r - 2))) set(cx + x, cy + y, c);
      }
    }
  }

  void text(int x, int y, const std::string& s, Rgb c, int scale = 2) {
    for (char ch : s) {
      const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      auto it = font().find(up);
      const auto& glyph = it != font().end() ? it->second : font().at('?');
      for (int row = 0; row < 7; ++row)
        for (int col = 0; col < 5; ++col)
          if (glyph[row] & (0x10 >> col)) fill_rect(x + col * scale, y + row * scale, scale, scale, c);
      x += 6 * scale;
    }
  }

  static int text_width(const std::string& s, int scale = 2) { return static_cast<int>(s.size()) * 6 * scale; }

 private:
  void dot(int x, int y, Rgb c, int thickness) {
    const int lo = -(thickness - 1) / 2;
    for (int j = lo; j < lo + thickness; ++j)
      for (int i = lo; i < lo + thickness; ++i) set(x + i, y + j, c);
  }

  Image& img_;
};

struct Extent {
  double lo = 0.0, hi = 1.0;
};

Extent padded_extent(const std::vector<double>& v) {
  if (v.empty()) return {};
  auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  double lo = *mn, hi = *mx;
  if (hi - lo <= 0.0) {
    const double pad = std::max(std::abs(lo) * 0.05, 1.0);
    return {lo - pad, hi + pad};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

struct Mapper {
  const AxesLayout& a;
  int px(double x) const {
    return a.x + static_cast<int>(std::lround((x - a.x_min) / (a.x_max - a.x_min) * (a.w - 1)));
  }
  int py(double y) const {
    return a.y + a.h - 1 - static_cast<int>(std::lround((y - a.y_min) / (a.y_max - a.y_min) * (a.h - 1)));
  }
};

constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 16;
constexpr int kMarginTop = 30;
constexpr int kMarginBottom = 40;

void draw_frame(Canvas& cv, const AxesLayout& a, const std::string& title) {
  cv.rect(a.x - 1, a.y - 1, a.w + 2, a.h + 2, kAxis);
  cv.text(a.x, a.y - 22, title, kBlack);
  cv.text(a.x, a.y + a.h + 8, fmt_sig6(a.x_min), kAxis, 1);
  const std::string xmax = fmt_sig6(a.x_max);
  cv.text(a.x + a.w - Canvas::text_width(xmax, 1), a.y + a.h + 8, xmax, kAxis, 1);
  cv.text(a.x + a.w / 2 - Canvas::text_width(a.x_label, 1) / 2, a.y + a.h + 22, a.x_label, kAxis, 1);
  cv.text(a.x - kMarginLeft + 4, a.y, fmt_sig6(a.y_max), kAxis, 1);
  cv.text(a.x - kMarginLeft + 4, a.y + a.h - 8, fmt_sig6(a.y_min), kAxis, 1);
  cv.text(a.x - kMarginLeft + 4, a.y + a.h / 2, a.y_label, kAxis, 1);
}

/// Heatmap with x = frequency and y = time (earliest at the top), blended.
void draw_spectrogram_underlay(Canvas& cv, const AxesLayout& a, const Spectrogram& s, int alpha) {
  const auto& m = s.magnitude;
  if (m.rows == 0 || m.cols < 2) return;
  const auto db = to_db(m.data);
  auto [mn, mx] = std::minmax_element(db.begin(), db.end());
  const double span = std::max(*mx - *mn, 1e-9);
  const double f0 = s.freqs_hz.front();
  const double df = (s.freqs_hz.back() - f0) / static_cast<double>(m.cols - 1);
  for (int py = 0; py < a.h; ++py) {
    const auto t = std::min<std::size_t>(m.rows - 1, static_cast<std::size_t>(py) * m.rows / a.h);
    for (int px = 0; px < a.w; ++px) {
      const double f = a.x_min + (a.x_max - a.x_min) * px / std::max(1, a.w - 1);
      const double bin = std::round((f - f0) / df);
      if (bin < 0 || bin > static_cast<double>(m.cols - 1)) continue;
      const double v = db[t * m.cols + static_cast<std::size_t>(bin)];
      cv.blend(a.x + px, a.y + py, colormap((v - *mn) / span), alpha);
    }
  }
}

int time_to_py(const AxesLayout& a, const Spectrogram& s, double t) {
  const double t0 = s.times_s.front(), t1 = s.times_s.back();
  const double frac = t1 > t0 ? (t - t0) / (t1 - t0) : 0.5;
  return a.y + static_cast<int>(std::lround(frac * (a.h - 1)));
}

}  // namespace

nlohmann::json to_json(const FigureLayout& layout) {
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& a : layout.axes) {
    axes.push_back({{"plot_id", a.plot_id}, {"clip_id", a.clip_id}, {"method", a.method},
                    {"x", a.x},             {"y", a.y},             {"w", a.w},
                    {"h", a.h},             {"x_min", a.x_min},     {"x_max", a.x_max},
                    {"y_min", a.y_min},     {"y_max", a.y_max},     {"x_label", a.x_label},
                    {"y_label", a.y_label}});
  }
  return {{"width", layout.width}, {"height", layout.height}, {"rows", layout.rows},
          {"cols", layout.cols},   {"axes", std::move(axes)}};
}

RenderedFigure export_image(const SessionSnapshot& s, const RenderOptions& opts) {
  std::vector<std::string> clips, methods;
  for (const auto& p : s.plots)
    if (std::find(clips.begin(), clips.end(), p.clip_id) == clips.end()) clips.push_back(p.clip_id);
  for (Method m : kAllMethods) {
    const bool used = std::any_of(s.plots.begin(), s.plots.end(), [&](const PlotData& p) { return p.result.method == m; });
    if (used) methods.emplace_back(to_string(m));
  }
  const int rows = std::max<int>(1, static_cast<int>(clips.size()));
  const int cols = std::max<int>(1, static_cast<int>(methods.size()));

  RenderedFigure fig;
  fig.layout.width = std::max(opts.min_width, cols * 420);
  fig.layout.height = std::max(opts.min_height, rows * 320);
  fig.layout.rows = rows;
  fig.layout.cols = cols;
  const int cell_w = fig.layout.width / cols;
  const int cell_h = fig.layout.height / rows;
  if (cell_w <= kMarginLeft + kMarginRight + 8 || cell_h <= kMarginTop + kMarginBottom + 8)
    throw RenderFailure("figure too small for its grid");
  fig.image = Image(fig.layout.width, fig.layout.height);
  Canvas cv(fig.image);

  auto rect_for = [&](int r, int c) {
    AxesLayout a;
    a.x = c * cell_w + kMarginLeft;
    a.y = r * cell_h + kMarginTop;
    a.w = cell_w - kMarginLeft - kMarginRight;
    a.h = cell_h - kMarginTop - kMarginBottom;
    a.x_label = "frequency (Hz)";
    a.y_label = opts.db_scale ? "dB" : "power";
    return a;
  };

  if (s.plots.empty()) {
    AxesLayout a = rect_for(0, 0);
    fig.layout.axes.push_back(a);
    draw_frame(cv, a, "no plots");
    fig.png = encode_png(fig.image);
    return fig;
  }

  std::map<int, std::pair<int, int>> selection_px;  // order -> pixel
  for (const auto& plot : s.plots) {
    const int r = static_cast<int>(std::find(clips.begin(), clips.end(), plot.clip_id) - clips.begin());
    const std::string method(to_string(plot.result.method));
    const int c = static_cast<int>(std::find(methods.begin(), methods.end(), method) - methods.begin());
    AxesLayout a = rect_for(r, c);
    a.plot_id = plot.plot_id;
    a.clip_id = plot.clip_id;
    a.method = method;
    const auto& values = opts.db_scale ? plot.result.psd_db : plot.result.psd_linear;
    const Extent fx = padded_extent(plot.result.freqs_hz);
    const Extent vy = padded_extent(values);
    a.x_min = fx.lo;
    a.x_max = fx.hi;
    a.y_min = vy.lo;
    a.y_max = vy.hi;
    const Mapper map{a};

    if (opts.show_spectrogram && plot.spectrogram) draw_spectrogram_underlay(cv, a, *plot.spectrogram, 90);
    if (plot.spectrogram && !plot.spectrogram->times_s.empty()) {
      if (opts.show_veins) {
        for (const auto& v : plot.veins) {
          for (std::size_t i = 1; i < v.points.size(); ++i) {
            cv.line(map.px(v.points[i - 1].freq_hz), time_to_py(a, *plot.spectrogram, v.points[i - 1].time_s),
                    map.px(v.points[i].freq_hz), time_to_py(a, *plot.spectrogram, v.points[i].time_s), kVein, 2, 4);
          }
        }
      }
      if (opts.show_ridge && plot.ridge) {
        const auto& pts = plot.ridge->points;
        for (std::size_t i = 1; i < pts.size(); ++i) {
          cv.line(map.px(pts[i - 1].freq_hz), time_to_py(a, *plot.spectrogram, pts[i - 1].time_s),
                  map.px(pts[i].freq_hz), time_to_py(a, *plot.spectrogram, pts[i].time_s), kRidge, 2);
        }
      }
    }

    const auto& f = plot.result.freqs_hz;
    for (std::size_t i = 1; i < f.size(); ++i)
      cv.line(map.px(f[i - 1]), map.py(values[i - 1]), map.px(f[i]), map.py(values[i]), kTrace, 2);

    for (const auto& p : plot.peaks) {
      if (s.selection.is_removed(plot.plot_id, p.bin_index)) continue;
      cv.circle(map.px(p.freq_hz), map.py(opts.db_scale ? p.power_db : p.power_linear), 6, kPeak, false);
    }
    for (const auto& sel : s.selection.selections) {
      if (sel.plot_id != plot.plot_id) continue;
      const int x = map.px(sel.peak.freq_hz);
      const int y = map.py(opts.db_scale ? sel.peak.power_db : sel.peak.power_linear);
      cv.circle(x, y, 5, selection_colour(sel.selection_order), true);
      selection_px[sel.selection_order] = {x, y};
    }
    draw_frame(cv, a, plot.plot_id);
    fig.layout.axes.push_back(std::move(a));
  }

  for (const auto& p : s.selection.pairs) {
    auto a = selection_px.find(p.order_a);
    auto b = selection_px.find(p.order_b);
    if (a == selection_px.end() || b == selection_px.end()) continue;
    cv.line(a->second.first, a->second.second, b->second.first, b->second.second, kPairLine, 2);
    const int mx = (a->second.first + b->second.first) / 2;
    const int my = (a->second.second + b->second.second) / 2;
    cv.text(mx + 4, my - 18, fmt_fixed(p.ratio, 3), kBlack);
  }

  fig.png = encode_png(fig.image);
  return fig;
}

RenderedFigure render_grid_figure(const GridResult& grid, const RenderOptions& opts) {
  const int rows = std::max<int>(1, static_cast<int>(grid.rows));
  const int cols = std::max<int>(1, static_cast<int>(grid.cols));
  RenderedFigure fig;
  fig.layout.width = std::max(opts.min_width, cols * 420);
  fig.layout.height = std::max(opts.min_height, rows * 320);
  fig.layout.rows = rows;
  fig.layout.cols = cols;
  fig.image = Image(fig.layout.width, fig.layout.height);
  Canvas cv(fig.image);
  const int cell_w = fig.layout.width / cols;
  const int cell_h = fig.layout.height / rows;

  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const auto& cell = grid.cells[i];
    const int r = static_cast<int>(i / grid.cols), c = static_cast<int>(i % grid.cols);
    AxesLayout a;
    a.x = c * cell_w + kMarginLeft;
    a.y = r * cell_h + kMarginTop;
    a.w = cell_w - kMarginLeft - kMarginRight;
    a.h = cell_h - kMarginTop - kMarginBottom;
    a.plot_id = "n_fft=" + std::to_string(cell.n_fft) + ",hop=" + std::to_string(cell.hop_length);
    a.x_label = "time (s)";
    a.y_label = "Hz";
    const std::string title = "N=" + std::to_string(cell.n_fft) + " HOP=" + std::to_string(cell.hop_length);

    if (cell.ok && cell.spectrogram && cell.spectrogram->magnitude.rows > 0) {
      const auto& s = *cell.spectrogram;
      const auto& m = s.magnitude;
      a.x_min = s.times_s.front();
      a.x_max = s.times_s.back();
      a.y_min = s.freqs_hz.front();
      a.y_max = s.freqs_hz.back();
      const auto db = to_db(m.data);
      auto [mn, mx] = std::minmax_element(db.begin(), db.end());
      const double span = std::max(*mx - *mn, 1e-9);
      for (int py = 0; py < a.h; ++py) {
        const auto bin = std::min<std::size_t>(m.cols - 1, static_cast<std::size_t>(a.h - 1 - py) * m.cols / a.h);
        for (int px = 0; px < a.w; ++px) {
          const auto t = std::min<std::size_t>(m.rows - 1, static_cast<std::size_t>(px) * m.rows / a.w);
          cv.set(a.x + px, a.y + py, colormap((db[t * m.cols + bin] - *mn) / span));
        }
      }
    } else {
      cv.fill_rect(a.x, a.y, a.w, a.h, {225, 225, 225});
      cv.line(a.x, a.y, a.x + a.w - 1, a.y + a.h - 1, kAxis, 2);
      cv.line(a.x, a.y + a.h - 1, a.x + a.w - 1, a.y, kAxis, 2);
    }
    draw_frame(cv, a, title);
    if (grid.best_cell == i) cv.rect(a.x - 5, a.y - 5, a.w + 10, a.h + 10, kBest, 3);
    fig.layout.axes.push_back(std::move(a));
  }
  fig.png = encode_png(fig.image);
  return fig;
}

}  // namespace specbench
