#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "specbench/session.hpp"
#include "specbench/sweep.hpp"

namespace specbench {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

/// 8-bit RGB raster, row-major, top row first.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(int w, int h, Rgb fill = {255, 255, 255});
  Rgb at(int x, int y) const;
};

/// PNG with IHDR, IDAT and IEND only (no time or text chunks). Throws RenderFailure.
std::vector<std::uint8_t> encode_png(const Image& image);

struct AxesLayout {
  std::string plot_id;
  std::string clip_id;
  std::string method;
  int x = 0, y = 0, w = 0, h = 0;
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  std::string x_label;
  std::string y_label;
};

struct FigureLayout {
  int width = 0;
  int height = 0;
  int rows = 0;
  int cols = 0;
  std::vector<AxesLayout> axes;
};

nlohmann::json to_json(const FigureLayout& layout);

struct RenderOptions {
  bool db_scale = true;
  bool show_spectrogram = true;
  bool show_ridge = true;
  bool show_veins = true;
  int min_width = 1600;
  int min_height = 1200;
};

struct RenderedFigure {
  Image image;
  std::vector<std::uint8_t> png;
  FigureLayout layout;
};

/// Clips down the rows, methods across the columns, one axes per plot. An
/// empty session renders a single empty axes. Deterministic for a snapshot.
RenderedFigure export_image(const SessionSnapshot& s, const RenderOptions& opts = {});

/// n_fft down the rows, hop across the columns; each panel is the cell's
/// spectrogram in dB with the best cell outlined. Failed cells are crossed out.
RenderedFigure render_grid_figure(const GridResult& grid, const RenderOptions& opts = {});

}  // namespace specbench
