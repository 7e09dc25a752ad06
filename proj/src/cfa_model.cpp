#include "camra/cfa_model.hpp"

#include <cmath>
#include <string>

namespace camra {

namespace {

struct Site {
  int row;
  int col;
};

// Position of the red and blue sample inside the 2x2 period.
Site red_site(CfaPhase p) {
  switch (p) {
    case CfaPhase::RGGB: return {0, 0};
    case CfaPhase::GRBG: return {0, 1};
    case CfaPhase::GBRG: return {1, 0};
    case CfaPhase::BGGR: return {1, 1};
  }
  throw InvalidArgument("unknown CFA phase");
}

Site blue_site(CfaPhase p) {
  const Site r = red_site(p);
  return {1 - r.row, 1 - r.col};
}

IntGrid extract(const IntGrid& y, Site s) {
  IntGrid out(y.width() / 2, y.height() / 2);
  for (int r = 0; r < out.height(); ++r)
    for (int c = 0; c < out.width(); ++c) out(r, c) = y(2 * r + s.row, 2 * c + s.col);
  return out;
}

void insert(IntGrid& y, const IntGrid& plane, Site s) {
  for (int r = 0; r < plane.height(); ++r)
    for (int c = 0; c < plane.width(); ++c) y(2 * r + s.row, 2 * c + s.col) = plane(r, c);
}

void require_even(int w, int h, const char* what) {
  if (w % 2 != 0 || h % 2 != 0)
    throw DimensionError(std::string(what) + ": image sides must be even, got " + std::to_string(w) + "x" +
                         std::to_string(h));
}

}  // namespace

std::string_view to_string(CfaPhase phase) {
  switch (phase) {
    case CfaPhase::RGGB: return "RGGB";
    case CfaPhase::GRBG: return "GRBG";
    case CfaPhase::GBRG: return "GBRG";
    case CfaPhase::BGGR: return "BGGR";
  }
  return "?";
}

std::optional<CfaPhase> parse_phase(std::string_view name) {
  for (auto p : {CfaPhase::RGGB, CfaPhase::GRBG, CfaPhase::GBRG, CfaPhase::BGGR})
    if (to_string(p) == name) return p;
  return std::nullopt;
}

Channel channel_at(CfaPhase phase, int row, int col) {
  const Site r = red_site(phase);
  const int pr = row & 1, pc = col & 1;
  if (pr == r.row && pc == r.col) return Channel::R;
  if (pr != r.row && pc != r.col) return Channel::B;
  return Channel::G;
}

PhaseFlips flips_to_rggb(CfaPhase phase) {
  const Site r = red_site(phase);
  return {r.row == 1, r.col == 1};
}

void BayerImage::validate() const {
  if (bit_depth < 8 || bit_depth > 16)
    throw InvalidArgument("bit depth must lie in [8, 16], got " + std::to_string(bit_depth));
  require_even(width(), height(), "BayerImage");
  if (samples.empty()) throw DimensionError("BayerImage: empty image");
  const std::int32_t hi = max_value();
  for (std::int32_t v : samples.values())
    if (v < 0 || v > hi) throw InvalidArgument("sample " + std::to_string(v) + " outside bit depth");
}

std::array<double, 3> rgb_to_lab(const std::array<double, 3>& x) {
  const auto [r, g, b] = x;
  return {r / 4 + g / 2 + b / 4, r / 4 - b / 4, r / 4 - g / 2 + b / 4};
}

std::array<double, 3> lab_to_rgb(const std::array<double, 3>& x) {
  const auto [l, a, b] = x;
  return {l + 2 * a + b, l - b, l - 2 * a + b};
}

namespace {

ColorImage convert(const ColorImage& in, ColorSpace from, ColorSpace to,
                   std::array<double, 3> (*f)(const std::array<double, 3>&)) {
  if (in.space != from) throw InvalidArgument("colour image has the wrong colour space tag");
  ColorImage out(to, in.width(), in.height());
  const std::size_t n = in.planes[0].size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = f({in.planes[0].values()[i], in.planes[1].values()[i], in.planes[2].values()[i]});
    for (int k = 0; k < 3; ++k) out.planes[k].values()[i] = v[k];
  }
  return out;
}

}  // namespace

ColorImage rgb_to_lab(const ColorImage& rgb) {
  return convert(rgb, ColorSpace::RGB, ColorSpace::LAB, &rgb_to_lab);
}

ColorImage lab_to_rgb(const ColorImage& lab) {
  return convert(lab, ColorSpace::LAB, ColorSpace::RGB, &lab_to_rgb);
}

int d_alpha(int row, int col) { return ((row & 1) ? -1 : 1) + ((col & 1) ? -1 : 1); }

int d_beta(int row, int col) { return ((row + col) & 1) ? -1 : 1; }

RealGrid mosaic(const ColorImage& rgb, CfaPhase phase) {
  if (rgb.space != ColorSpace::RGB) throw InvalidArgument("mosaic expects an RGB image");
  require_even(rgb.width(), rgb.height(), "mosaic");
  RealGrid y(rgb.width(), rgb.height());
  for (int r = 0; r < y.height(); ++r)
    for (int c = 0; c < y.width(); ++c)
      y(r, c) = rgb.planes[static_cast<int>(channel_at(phase, r, c))](r, c);
  return y;
}

RealGrid mosaic_modulated(const ColorImage& lab, CfaPhase phase) {
  if (lab.space != ColorSpace::LAB) throw InvalidArgument("mosaic_modulated expects an LAB image");
  require_even(lab.width(), lab.height(), "mosaic_modulated");
  const PhaseFlips f = flips_to_rggb(phase);
  RealGrid y(lab.width(), lab.height());
  for (int r = 0; r < y.height(); ++r)
    for (int c = 0; c < y.width(); ++c) {
      // Flipping an even-length axis toggles its parity.
      const int nr = r ^ static_cast<int>(f.rows), nc = c ^ static_cast<int>(f.cols);
      y(r, c) = lab.planes[0](r, c) + d_alpha(nr, nc) * lab.planes[1](r, c) + d_beta(nr, nc) * lab.planes[2](r, c);
    }
  return y;
}

BayerImage to_bayer(const RealGrid& m, CfaPhase phase, int bit_depth, BlackOffset black) {
  BayerImage out;
  out.bit_depth = bit_depth;
  out.phase = phase;
  out.black = black;
  out.samples = IntGrid(m.width(), m.height());
  const double hi = static_cast<double>(out.max_value());
  for (std::size_t i = 0; i < m.size(); ++i)
    out.samples.values()[i] = static_cast<std::int32_t>(std::clamp(std::round(m.values()[i]), 0.0, hi));
  return out;
}

IntGrid subtract_black_offset(const BayerImage& y) {
  IntGrid out(y.width(), y.height());
  for (int r = 0; r < y.height(); ++r)
    for (int c = 0; c < y.width(); ++c) out(r, c) = y.samples(r, c) - y.black.of(channel_at(y.phase, r, c));
  return out;
}

IntGrid add_black_offset(const IntGrid& shifted, CfaPhase phase, const BlackOffset& black) {
  IntGrid out(shifted.width(), shifted.height());
  for (int r = 0; r < shifted.height(); ++r)
    for (int c = 0; c < shifted.width(); ++c) out(r, c) = shifted(r, c) + black.of(channel_at(phase, r, c));
  return out;
}

DemuxPlanes demux(const BayerImage& y) {
  require_even(y.width(), y.height(), "demux");
  const Site rs = red_site(y.phase), bs = blue_site(y.phase);
  return {extract(y.samples, rs), extract(y.samples, {rs.row, 1 - rs.col}), extract(y.samples, {bs.row, 1 - bs.col}),
          extract(y.samples, bs)};
}

IntGrid remux(const DemuxPlanes& p, CfaPhase phase) {
  require_same_shape(p.r, p.g1, "remux");
  require_same_shape(p.r, p.g2, "remux");
  require_same_shape(p.r, p.b, "remux");
  const Site rs = red_site(phase), bs = blue_site(phase);
  IntGrid y(p.r.width() * 2, p.r.height() * 2);
  insert(y, p.r, rs);
  insert(y, p.g1, {rs.row, 1 - rs.col});
  insert(y, p.g2, {bs.row, 1 - bs.col});
  insert(y, p.b, bs);
  return y;
}

}  // namespace camra
