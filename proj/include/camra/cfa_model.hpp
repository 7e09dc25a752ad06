#pragma once

// Bayer sampling model: phases, the l/alpha/beta colour algebra, black
// offsets and polyphase demultiplexing.

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "camra/grid.hpp"

namespace camra {

enum class CfaPhase : std::uint8_t { RGGB = 0, GRBG = 1, GBRG = 2, BGGR = 3 };

enum class Channel : std::uint8_t { R = 0, G = 1, B = 2 };

std::string_view to_string(CfaPhase phase);
std::optional<CfaPhase> parse_phase(std::string_view name);

/// Colour sampled at (row, col) for the given phase.
Channel channel_at(CfaPhase phase, int row, int col);

/// Row/column flips that map a phase onto RGGB. Both flips are involutions on
/// even-sized images, so the same flags undo the normalization.
struct PhaseFlips {
  bool rows = false;
  bool cols = false;
};
PhaseFlips flips_to_rggb(CfaPhase phase);

template <class T>
Grid<T> apply_flips(const Grid<T>& g, PhaseFlips f) {
  if (!f.rows && !f.cols) return g;
  Grid<T> out(g.width(), g.height());
  const int w = g.width(), h = g.height();
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      out(f.rows ? h - 1 - r : r, f.cols ? w - 1 - c : c) = g(r, c);
  return out;
}

struct BlackOffset {
  int r = 0;
  int g = 0;
  int b = 0;

  int of(Channel ch) const { return ch == Channel::R ? r : ch == Channel::G ? g : b; }
  friend bool operator==(const BlackOffset&, const BlackOffset&) = default;
};

/// Raw Bayer mosaic with one integer sample per pixel.
struct BayerImage {
  int bit_depth = 16;
  CfaPhase phase = CfaPhase::RGGB;
  BlackOffset black;
  IntGrid samples;

  int width() const { return samples.width(); }
  int height() const { return samples.height(); }
  std::int32_t max_value() const { return (std::int32_t{1} << bit_depth) - 1; }

  /// Throws DimensionError for odd sides and InvalidArgument for bad depths or
  /// out-of-range samples.
  void validate() const;

  friend bool operator==(const BayerImage&, const BayerImage&) = default;
};

enum class ColorSpace : std::uint8_t { RGB, LAB };

/// Three equally sized real planes. In RGB space the planes are (r, g, b); in
/// LAB space they are (l, alpha, beta).
struct ColorImage {
  ColorSpace space = ColorSpace::RGB;
  std::array<RealGrid, 3> planes;

  ColorImage() = default;
  ColorImage(ColorSpace s, int width, int height)
      : space(s), planes{RealGrid(width, height), RealGrid(width, height), RealGrid(width, height)} {}

  int width() const { return planes[0].width(); }
  int height() const { return planes[0].height(); }
};

// Per-pixel colour algebra.
std::array<double, 3> rgb_to_lab(const std::array<double, 3>& rgb);
std::array<double, 3> lab_to_rgb(const std::array<double, 3>& lab);

ColorImage rgb_to_lab(const ColorImage& rgb);
ColorImage lab_to_rgb(const ColorImage& lab);

/// Modulation functions of the RGGB mask written in the l/alpha/beta basis:
/// d_alpha = (-1)^row + (-1)^col, d_beta = (-1)^(row+col).
int d_alpha(int row, int col);
int d_beta(int row, int col);

/// y(n) = c(n) . x(n): picks the channel selected by the phase.
RealGrid mosaic(const ColorImage& rgb, CfaPhase phase);

/// y(n) = l + d_alpha*alpha + d_beta*beta, evaluated on the RGGB-normalized
/// grid. Agrees with `mosaic` for any phase.
RealGrid mosaic_modulated(const ColorImage& lab, CfaPhase phase);

/// Rounds a real mosaic to integer samples clamped to the bit depth.
BayerImage to_bayer(const RealGrid& mosaic, CfaPhase phase, int bit_depth, BlackOffset black = {});

/// y'(n) = y(n) - k_channel(n). Results may be negative.
IntGrid subtract_black_offset(const BayerImage& y);

/// Inverse of subtract_black_offset; no clamping.
IntGrid add_black_offset(const IntGrid& shifted, CfaPhase phase, const BlackOffset& black);

/// Polyphase planes. g1 is the green on the red row, g2 the green on the blue
/// row.
struct DemuxPlanes {
  IntGrid r, g1, g2, b;
};

DemuxPlanes demux(const BayerImage& y);
IntGrid remux(const DemuxPlanes& planes, CfaPhase phase);

}  // namespace camra
