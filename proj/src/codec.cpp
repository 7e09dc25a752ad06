#include "camra/codec.hpp"

#include <zlib.h>

#include <cmath>
#include <string>

#include "camra/bytes.hpp"
#include "camra/wavelet.hpp"

namespace camra {

bool is_lossy(Mode m) { return m == Mode::LossyA || m == Mode::LossyB || m == Mode::Camra; }

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Lossless: return "lossless";
    case Mode::LossyA: return "lossy-a";
    case Mode::LossyB: return "lossy-b";
    case Mode::Camra: return "camra";
    case Mode::BaselineCfaGray: return "cfa-gray";
    case Mode::BaselineDemux: return "demux";
    case Mode::BaselineMallat: return "mallat";
    case Mode::BaselineRgb: return "rgb";
  }
  return "unknown";
}

namespace {

bool known_mode(std::uint8_t m) { return m <= 3 || (m >= 16 && m <= 19); }

}  // namespace

Mat2 StreamHeader::matrix() const {
  return {from_fixed_16_16(m_fixed[0]), from_fixed_16_16(m_fixed[1]), from_fixed_16_16(m_fixed[2]),
          from_fixed_16_16(m_fixed[3])};
}

PipelineParams StreamHeader::pipeline() const {
  PipelineParams p;
  for (int i = 0; i < 9; ++i) p.color_matrix.a[i] = color_matrix[i];
  for (int i = 0; i < 3; ++i) p.illuminant[i] = illuminant[i];
  p.black = black_offset();
  p.gamma = gamma;
  return p;
}

std::vector<std::uint8_t> serialize_header(const StreamHeader& h) {
  ByteWriter w;
  w.bytes(kMagic);
  w.u8(h.version);
  w.u8(static_cast<std::uint8_t>(h.mode));
  w.u32(h.width);
  w.u32(h.height);
  w.u8(h.bit_depth);
  w.u8(static_cast<std::uint8_t>(h.phase));
  for (auto k : h.black) w.u16(k);
  w.u8(h.levels);
  w.u8(h.levels_vd);
  w.u8(static_cast<std::uint8_t>(h.objective));
  w.f32(h.lambda);
  if (is_lossy(h.mode)) {
    for (auto v : h.m_fixed) w.i32(v);
    if (h.steps.size() > 255) throw InvalidArgument("too many quantization steps");
    w.u8(static_cast<std::uint8_t>(h.steps.size()));
    for (float s : h.steps) w.f32(s);
    w.u8(h.integer_bands ? 1 : 0);
  }
  if (h.mode == Mode::Camra) {
    for (float v : h.color_matrix) w.f32(v);
    for (float v : h.illuminant) w.f32(v);
    w.u8(static_cast<std::uint8_t>(h.gamma));
  }
  return w.take();
}

StreamHeader parse_header(std::span<const std::uint8_t> data, std::size_t* consumed) {
  ByteReader rd(data);
  const auto magic = rd.bytes(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) throw FormatError("bad magic, not a CMRA stream", 0);
  StreamHeader h;
  h.version = rd.u8();
  if (h.version != kFormatVersion) throw FormatError("unsupported version " + std::to_string(h.version), 4);
  const std::uint8_t mode = rd.u8();
  if (!known_mode(mode)) throw FormatError("unknown mode " + std::to_string(mode), 5);
  h.mode = static_cast<Mode>(mode);
  h.width = rd.u32();
  h.height = rd.u32();
  if (h.width == 0 || h.height == 0 || h.width % 2 || h.height % 2 || h.width > (1u << 20) || h.height > (1u << 20))
    throw FormatError("invalid image dimensions", 6);
  h.bit_depth = rd.u8();
  if (h.bit_depth < 8 || h.bit_depth > 16) throw FormatError("invalid bit depth", 14);
  const std::uint8_t phase = rd.u8();
  if (phase > 3) throw FormatError("invalid CFA phase", 15);
  h.phase = static_cast<CfaPhase>(phase);
  for (auto& k : h.black) k = rd.u16();
  std::size_t at = rd.absolute();
  h.levels = rd.u8();
  h.levels_vd = rd.u8();
  if (h.levels > kMaxLevels || h.levels_vd > h.levels) throw FormatError("invalid decomposition levels", at);
  at = rd.absolute();
  const std::uint8_t obj = rd.u8();
  if (obj > 1) throw FormatError("invalid objective form", at);
  h.objective = static_cast<ObjectiveForm>(obj);
  h.lambda = rd.f32();
  if (is_lossy(h.mode)) {
    for (auto& v : h.m_fixed) v = rd.i32();
    if (h.matrix().det() == 0) throw FormatError("singular decorrelation matrix", rd.absolute() - 16);
    const int n = rd.u8();
    h.steps.resize(n);
    for (auto& s : h.steps) {
      at = rd.absolute();
      s = rd.f32();
      if (!(s > 0) || !std::isfinite(s)) throw FormatError("non-positive quantization step", at);
    }
    if (n != 4) throw FormatError("lossy streams carry exactly four steps", rd.absolute());
    at = rd.absolute();
    const std::uint8_t ib = rd.u8();
    if (ib > 1) throw FormatError("invalid band interface flag", at);
    h.integer_bands = ib == 1;
  }
  if (h.mode == Mode::Camra) {
    for (auto& v : h.color_matrix) v = rd.f32();
    for (auto& v : h.illuminant) v = rd.f32();
    at = rd.absolute();
    const std::uint8_t g = rd.u8();
    if (g > 1) throw FormatError("invalid gamma curve", at);
    h.gamma = static_cast<GammaCurve>(g);
    try {
      h.pipeline().validate();
    } catch (const InvalidArgument& e) {
      throw FormatError(std::string("invalid pipeline parameters: ") + e.what(), at);
    }
  }
  if (consumed) *consumed = rd.position();
  return h;
}

std::vector<std::uint8_t> CompressedStream::serialize() const {
  ByteWriter w;
  w.bytes(serialize_header(header));
  if (segments.size() > 0xFFFF) throw InvalidArgument("too many segments");
  w.u16(static_cast<std::uint16_t>(segments.size()));
  for (const auto& s : segments) w.bytes(s.bytes);
  const auto crc = static_cast<std::uint32_t>(crc32(0L, w.buffer().data(), static_cast<uInt>(w.size())));
  w.u32(crc);
  return w.take();
}

CompressedStream CompressedStream::parse(std::span<const std::uint8_t> data) {
  CompressedStream s;
  std::size_t pos = 0;
  s.header = parse_header(data, &pos);
  ByteReader rd(data.subspan(pos), pos);
  const int count = rd.u16();
  pos += 2;
  for (int i = 0; i < count; ++i) {
    const std::size_t len = segment_length(data.subspan(pos), pos);
    CodedSegment seg;
    seg.band_id = data[pos];
    seg.bytes.assign(data.begin() + static_cast<long>(pos), data.begin() + static_cast<long>(pos + len));
    seg.stream_offset = pos;
    s.segments.push_back(std::move(seg));
    pos += len;
  }
  ByteReader tail(data.subspan(pos), pos);
  const std::uint32_t stored = tail.u32();
  const auto crc = static_cast<std::uint32_t>(crc32(0L, data.data(), static_cast<uInt>(pos)));
  if (stored != crc) throw FormatError("checksum mismatch, stream is corrupted", pos);
  if (tail.remaining() != 0) throw FormatError("trailing bytes after stream", pos + 4);
  return s;
}

std::size_t CompressedStream::byte_size() const {
  std::size_t n = serialize_header(header).size() + 2 + 4;
  for (const auto& s : segments) n += s.bytes.size();
  return n;
}

double CompressedStream::bpp() const {
  return static_cast<double>(byte_size()) * 8.0 / (static_cast<double>(header.width) * header.height);
}

double CompressedStream::sign_plane_bpp() const {
  std::size_t n = 0;
  for (const auto& s : segments)
    if (s.band_id == kSignPlaneId) n += s.bytes.size();
  return static_cast<double>(n) * 8.0 / (static_cast<double>(header.width) * header.height);
}

BandClass band_class(Branch b) { return (b == Branch::VS || b == Branch::HH) ? BandClass::Chroma : BandClass::Luma; }

// ---------------------------------------------------------------------------

StreamHeader base_header(const BayerImage& y, Mode mode) {
  y.validate();
  for (int k : {y.black.r, y.black.g, y.black.b})
    if (k < 0 || k > 0xFFFF) throw InvalidArgument("black offsets must fit in 16 bits");
  StreamHeader h;
  h.mode = mode;
  h.width = static_cast<std::uint32_t>(y.width());
  h.height = static_cast<std::uint32_t>(y.height());
  h.bit_depth = static_cast<std::uint8_t>(y.bit_depth);
  h.phase = y.phase;
  h.black = {static_cast<std::uint16_t>(y.black.r), static_cast<std::uint16_t>(y.black.g),
             static_cast<std::uint16_t>(y.black.b)};
  return h;
}

IntGrid prepare_mosaic(const BayerImage& y) {
  y.validate();
  return apply_flips(subtract_black_offset(y), flips_to_rggb(y.phase));
}

BayerImage finish_mosaic(const IntGrid& normalized, const StreamHeader& h) {
  BayerImage out;
  out.bit_depth = h.bit_depth;
  out.phase = h.phase;
  out.black = h.black_offset();
  out.samples = add_black_offset(apply_flips(normalized, flips_to_rggb(h.phase)), h.phase, out.black);
  const std::int32_t hi = out.max_value();
  for (auto& v : out.samples.values()) v = std::clamp(v, 0, hi);
  return out;
}

BayerImage finish_mosaic(const RealGrid& normalized, const StreamHeader& h) {
  IntGrid r(normalized.width(), normalized.height());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double v = std::clamp(std::round(normalized.values()[i]), -2147483648.0, 2147483647.0);
    r.values()[i] = static_cast<std::int32_t>(v);
  }
  return finish_mosaic(r, h);
}

void encode_tree(const PacketTree<std::int32_t>& tree, Branch branch, std::vector<CodedSegment>& out) {
  const auto layout = band_layout(tree.coeffs.width(), tree.coeffs.height(), tree.levels);
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const BandRect& b = layout[i];
    out.push_back(encode_band(tree.coeffs.crop(b.row, b.col, b.width, b.height), band_class(branch),
                              band_id(branch, static_cast<int>(i))));
  }
}

PacketTree<std::int32_t> decode_tree(const CompressedStream& s, std::size_t& next, Branch branch, int width,
                                     int height, int levels) {
  PacketTree<std::int32_t> tree{levels, IntGrid(width, height)};
  const auto layout = band_layout(width, height, levels);
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const std::size_t at = next < s.segments.size() ? s.segments[next].stream_offset : 0;
    if (next >= s.segments.size()) throw FormatError("stream ends before all subbands were read", at);
    const CodedSegment& seg = s.segments[next++];
    if (seg.band_id != band_id(branch, static_cast<int>(i)))
      throw FormatError("unexpected band id " + std::to_string(seg.band_id), seg.stream_offset);
    const BandRect& b = layout[i];
    tree.coeffs.paste(decode_band(seg.bytes, b.width, b.height, band_class(branch), seg.stream_offset), b.row, b.col);
  }
  return tree;
}

namespace {

struct Levels {
  int n;
  int n_vd;
};

Levels effective_levels(int width, int height, const CodecConfig& cfg) {
  if (cfg.levels < 0 || cfg.levels > kMaxLevels || cfg.levels_vd < 0)
    throw InvalidArgument("decomposition levels must lie in [0, " + std::to_string(kMaxLevels) + "]");
  const int n = max_levels(width / 2, height / 2, cfg.levels);
  return {n, std::min(cfg.levels_vd, n)};
}

void require_mode(const CompressedStream& s, Mode m) {
  if (s.header.mode != m)
    throw FormatError("stream holds mode " + std::string(to_string(s.header.mode)) + ", expected " +
                          std::string(to_string(m)),
                      5);
}

void require_consumed(const CompressedStream& s, std::size_t next) {
  if (next != s.segments.size())
    throw FormatError("stream carries unexpected extra segments", s.segments[next].stream_offset);
}

// Level-1 9/7 analysis of the prepared mosaic plus decorrelation.
struct LossyFront {
  RealSubbands bands;
  Mat2 m;
  DecorrelatedPair<double> v;
};

LossyFront lossy_front(const BayerImage& y, std::optional<Mat2> m, const CodecConfig& cfg) {
  LossyFront f;
  f.bands = dwt97_forward(prepare_mosaic(y).cast<double>());
  if (!m) m = normalize_scale(optimize_m(sample_pairs(f.bands.lh, f.bands.hl, cfg.max_pairs), cfg.optimizer).m);
  f.m = quantize_fixed_16_16(*m);
  if (f.m.det() == 0 || f.m.condition() >= 1e6) throw InvalidArgument("decorrelation matrix is ill-conditioned");
  f.v = matrix_forward(f.bands.lh, f.bands.hl, f.m);
  return f;
}

void fill_lossy_header(StreamHeader& h, const LossyFront& f, const QuantizationSpec& q, const CodecConfig& cfg,
                       bool optimized) {
  q.validate();
  h.m_fixed = {to_fixed_16_16(f.m.a00), to_fixed_16_16(f.m.a01), to_fixed_16_16(f.m.a10), to_fixed_16_16(f.m.a11)};
  h.steps.clear();
  for (double s : q.steps) h.steps.push_back(static_cast<float>(s));
  h.integer_bands = cfg.integer_bands;
  h.objective = cfg.optimizer.form;
  h.lambda = optimized ? static_cast<float>(cfg.optimizer.lambda) : 0.0f;
}

double step_of(const StreamHeader& h, Branch b) { return h.steps[static_cast<int>(b)]; }

// LOSSY_A branch coding: 9/7 packets, then quantization.
RealGrid rounded(RealGrid g) {
  for (auto& v : g.values()) v = std::round(v);
  return g;
}

void encode_real_branch(const RealGrid& band, int levels, double step, bool integer, Branch b,
                        std::vector<CodedSegment>& out) {
  const auto tree = packet_decompose(integer ? rounded(band) : band, levels);
  encode_tree({levels, quantize(tree.coeffs, step)}, b, out);
}

RealGrid decode_real_branch(const CompressedStream& s, std::size_t& next, Branch b, int w, int h, int levels) {
  const auto q = decode_tree(s, next, b, w, h, levels);
  RealGrid band = packet_reconstruct(PacketTree<double>{levels, dequantize(q.coeffs, step_of(s.header, b))});
  return s.header.integer_bands ? rounded(std::move(band)) : band;
}

// LOSSY_B branch coding: quantization, then reversible 5/3 packets.
void encode_int_branch(const RealGrid& band, int levels, double step, Branch b, std::vector<CodedSegment>& out) {
  encode_tree(packet_decompose(quantize(band, step), levels), b, out);
}

RealGrid decode_int_branch(const CompressedStream& s, std::size_t& next, Branch b, int w, int h, int levels) {
  return dequantize(packet_reconstruct(decode_tree(s, next, b, w, h, levels)), step_of(s.header, b));
}

BayerImage lossy_back(const CompressedStream& s, RealGrid ll, const RealGrid& v_s, const RealGrid& v_d, RealGrid hh) {
  auto w = matrix_inverse(v_s, v_d, s.header.matrix());
  const RealGrid x = dwt97_inverse({std::move(ll), std::move(w.lh), std::move(w.hl), std::move(hh)});
  return finish_mosaic(x, s.header);
}

// Display-domain mapping of (LL, v_s, HH) used by CAMRA.
struct DisplayBands {
  RealGrid ll, v_s, hh;
  Grid<std::uint8_t> signs;  // three quarter-resolution planes stacked vertically
};

double odd_gamma_inverse(double v) {
  return v < 0 ? -gamma_srgb_extended_inverse(-v) : gamma_srgb_extended_inverse(v);
}

DisplayBands to_display(const RealGrid& ll, const RealGrid& v_s, const RealGrid& hh, const Mat2& m,
                        const PipelineParams& p, double peak) {
  const double scale = m.a00 + m.a01;
  if (std::fabs(scale) < 1e-9) throw InvalidArgument("decorrelation matrix has a vanishing sum row");
  DecorrelatedBands<double> db{Kernel::Daub97, ll, v_s, RealGrid(), hh, MatrixTransform{m}};
  ColorImage rgb = quarter_rgb_from_bands(db, scale);
  for (auto& plane : rgb.planes)
    for (auto& v : plane.values()) v /= peak;
  rgb = white_balance(color_correct(rgb, p.color_matrix), p.illuminant);
  const int qw = ll.width(), qh = ll.height();
  DisplayBands out;
  out.signs = Grid<std::uint8_t>(qw, 3 * qh);
  if (p.gamma == GammaCurve::SRGB) {
    SignSplit split = split_magnitude_sign(rgb);
    for (int k = 0; k < 3; ++k) {
      out.signs.paste(split.sign[k], k * qh, 0);
      for (auto& v : split.magnitude.planes[k].values()) v = gamma_srgb_extended(v);
    }
    rgb = std::move(split.magnitude);
  }
  for (auto& plane : rgb.planes)
    for (auto& v : plane.values()) v *= peak;
  QuarterBands qb = bands_from_quarter_rgb(rgb, Kernel::Daub97, scale);
  out.ll = std::move(qb.w_ll);
  out.v_s = std::move(qb.v_s);
  out.hh = std::move(qb.w_hh);
  return out;
}

QuarterBands from_display(const RealGrid& ll, const RealGrid& v_s, const RealGrid& hh,
                          const Grid<std::uint8_t>& signs, const Mat2& m, const PipelineParams& p, double peak) {
  const double scale = m.a00 + m.a01;
  DecorrelatedBands<double> db{Kernel::Daub97, ll, v_s, RealGrid(), hh, MatrixTransform{m}};
  ColorImage rgb = quarter_rgb_from_bands(db, scale);
  const int qh = ll.height();
  for (int k = 0; k < 3; ++k) {
    auto& vals = rgb.planes[k].values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      double v = vals[i] / peak;
      if (p.gamma == GammaCurve::SRGB) {
        v = odd_gamma_inverse(v);
        const int r = static_cast<int>(i) / ll.width(), c = static_cast<int>(i) % ll.width();
        if (signs(k * qh + r, c)) v = -v;
      }
      vals[i] = v;
    }
  }
  rgb = color_correct_inverse(white_balance_inverse(rgb, p.illuminant), p.color_matrix);
  for (auto& plane : rgb.planes)
    for (auto& v : plane.values()) v *= peak;
  return bands_from_quarter_rgb(rgb, Kernel::Daub97, scale);
}

}  // namespace

Mat2 normalize_scale(const Mat2& m) {
  const double d = std::fabs(m.det());
  if (d == 0) throw InvalidArgument("decorrelation matrix is singular");
  return (1.0 / std::sqrt(d)) * m;
}

Mat2 select_m(const BayerImage& y, const CodecConfig& cfg) {
  const RealSubbands b = dwt97_forward(prepare_mosaic(y).cast<double>());
  return normalize_scale(optimize_m(sample_pairs(b.lh, b.hl, cfg.max_pairs), cfg.optimizer).m);
}

CompressedStream encode_lossless(const BayerImage& y, const CodecConfig& cfg) {
  CompressedStream s;
  s.header = base_header(y, Mode::Lossless);
  const Levels lv = effective_levels(y.width(), y.height(), cfg);
  s.header.levels = static_cast<std::uint8_t>(lv.n);
  s.header.levels_vd = static_cast<std::uint8_t>(lv.n_vd);

  const IntSubbands b = dwt53_forward(prepare_mosaic(y));
  const auto v = sumdiff_forward(b.lh, b.hl);
  encode_tree(packet_decompose(b.ll, lv.n), Branch::LL, s.segments);
  encode_tree(packet_decompose(v.v_s, lv.n), Branch::VS, s.segments);
  encode_tree(packet_decompose(v.v_d, lv.n_vd), Branch::VD, s.segments);
  encode_tree(packet_decompose(b.hh, lv.n), Branch::HH, s.segments);
  return s;
}

BayerImage decode_lossless(const CompressedStream& s) {
  require_mode(s, Mode::Lossless);
  const auto& h = s.header;
  const int qw = static_cast<int>(h.width / 2), qh = static_cast<int>(h.height / 2);
  std::size_t next = 0;
  IntGrid ll = packet_reconstruct(decode_tree(s, next, Branch::LL, qw, qh, h.levels));
  IntGrid vs = packet_reconstruct(decode_tree(s, next, Branch::VS, qw, qh, h.levels));
  IntGrid vd = packet_reconstruct(decode_tree(s, next, Branch::VD, qw, qh, h.levels_vd));
  IntGrid hh = packet_reconstruct(decode_tree(s, next, Branch::HH, qw, qh, h.levels));
  require_consumed(s, next);
  auto w = sumdiff_inverse(vs, vd);
  return finish_mosaic(dwt53_inverse({std::move(ll), std::move(w.lh), std::move(w.hl), std::move(hh)}), h);
}

CompressedStream encode_lossy_a(const BayerImage& y, const QuantizationSpec& q, std::optional<Mat2> m,
                                const CodecConfig& cfg) {
  CompressedStream s;
  s.header = base_header(y, Mode::LossyA);
  const Levels lv = effective_levels(y.width(), y.height(), cfg);
  s.header.levels = static_cast<std::uint8_t>(lv.n);
  s.header.levels_vd = static_cast<std::uint8_t>(lv.n_vd);
  const LossyFront f = lossy_front(y, m, cfg);
  fill_lossy_header(s.header, f, q, cfg, !m);
  const auto& h = s.header;
  encode_real_branch(f.bands.ll, lv.n, step_of(h, Branch::LL), h.integer_bands, Branch::LL, s.segments);
  encode_real_branch(f.v.v_s, lv.n, step_of(h, Branch::VS), h.integer_bands, Branch::VS, s.segments);
  encode_real_branch(f.v.v_d, lv.n_vd, step_of(h, Branch::VD), h.integer_bands, Branch::VD, s.segments);
  encode_real_branch(f.bands.hh, lv.n, step_of(h, Branch::HH), h.integer_bands, Branch::HH, s.segments);
  return s;
}

BayerImage decode_lossy_a(const CompressedStream& s) {
  require_mode(s, Mode::LossyA);
  const auto& h = s.header;
  const int qw = static_cast<int>(h.width / 2), qh = static_cast<int>(h.height / 2);
  std::size_t next = 0;
  RealGrid ll = decode_real_branch(s, next, Branch::LL, qw, qh, h.levels);
  RealGrid vs = decode_real_branch(s, next, Branch::VS, qw, qh, h.levels);
  RealGrid vd = decode_real_branch(s, next, Branch::VD, qw, qh, h.levels_vd);
  RealGrid hh = decode_real_branch(s, next, Branch::HH, qw, qh, h.levels);
  require_consumed(s, next);
  return lossy_back(s, std::move(ll), vs, vd, std::move(hh));
}

CompressedStream encode_lossy_b(const BayerImage& y, const QuantizationSpec& q, std::optional<Mat2> m,
                                const CodecConfig& cfg) {
  CompressedStream s;
  s.header = base_header(y, Mode::LossyB);
  const Levels lv = effective_levels(y.width(), y.height(), cfg);
  s.header.levels = static_cast<std::uint8_t>(lv.n);
  s.header.levels_vd = static_cast<std::uint8_t>(lv.n_vd);
  const LossyFront f = lossy_front(y, m, cfg);
  fill_lossy_header(s.header, f, q, cfg, !m);
  const auto& h = s.header;
  encode_int_branch(f.bands.ll, lv.n, step_of(h, Branch::LL), Branch::LL, s.segments);
  encode_int_branch(f.v.v_s, lv.n, step_of(h, Branch::VS), Branch::VS, s.segments);
  encode_int_branch(f.v.v_d, lv.n_vd, step_of(h, Branch::VD), Branch::VD, s.segments);
  encode_int_branch(f.bands.hh, lv.n, step_of(h, Branch::HH), Branch::HH, s.segments);
  return s;
}

BayerImage decode_lossy_b(const CompressedStream& s) {
  require_mode(s, Mode::LossyB);
  const auto& h = s.header;
  const int qw = static_cast<int>(h.width / 2), qh = static_cast<int>(h.height / 2);
  std::size_t next = 0;
  RealGrid ll = decode_int_branch(s, next, Branch::LL, qw, qh, h.levels);
  RealGrid vs = decode_int_branch(s, next, Branch::VS, qw, qh, h.levels);
  RealGrid vd = decode_int_branch(s, next, Branch::VD, qw, qh, h.levels_vd);
  RealGrid hh = decode_int_branch(s, next, Branch::HH, qw, qh, h.levels);
  require_consumed(s, next);
  return lossy_back(s, std::move(ll), vs, vd, std::move(hh));
}

CompressedStream encode_camra(const BayerImage& y, const QuantizationSpec& q, const PipelineParams& params,
                              std::optional<Mat2> m, const CodecConfig& cfg) {
  params.validate();
  CompressedStream s;
  s.header = base_header(y, Mode::Camra);
  const Levels lv = effective_levels(y.width(), y.height(), cfg);
  s.header.levels = static_cast<std::uint8_t>(lv.n);
  s.header.levels_vd = static_cast<std::uint8_t>(lv.n_vd);
  for (int i = 0; i < 9; ++i) s.header.color_matrix[i] = static_cast<float>(params.color_matrix.a[i]);
  for (int i = 0; i < 3; ++i) s.header.illuminant[i] = static_cast<float>(params.illuminant[i]);
  s.header.gamma = params.gamma;
  const PipelineParams p = s.header.pipeline();  // the single-precision copy the decoder sees
  p.validate();

  const LossyFront f = lossy_front(y, m, cfg);
  fill_lossy_header(s.header, f, q, cfg, !m);
  const auto& h = s.header;
  const DisplayBands d = to_display(f.bands.ll, f.v.v_s, f.bands.hh, f.m, p, y.max_value());
  encode_real_branch(d.ll, lv.n, step_of(h, Branch::LL), h.integer_bands, Branch::LL, s.segments);
  encode_real_branch(d.v_s, lv.n, step_of(h, Branch::VS), h.integer_bands, Branch::VS, s.segments);
  encode_real_branch(f.v.v_d, lv.n_vd, step_of(h, Branch::VD), h.integer_bands, Branch::VD, s.segments);
  encode_real_branch(d.hh, lv.n, step_of(h, Branch::HH), h.integer_bands, Branch::HH, s.segments);
  s.segments.push_back(encode_sign_plane(d.signs));
  return s;
}

BayerImage decode_camra(const CompressedStream& s) {
  require_mode(s, Mode::Camra);
  const auto& h = s.header;
  const int qw = static_cast<int>(h.width / 2), qh = static_cast<int>(h.height / 2);
  std::size_t next = 0;
  RealGrid ll = decode_real_branch(s, next, Branch::LL, qw, qh, h.levels);
  RealGrid vs = decode_real_branch(s, next, Branch::VS, qw, qh, h.levels);
  RealGrid vd = decode_real_branch(s, next, Branch::VD, qw, qh, h.levels_vd);
  RealGrid hh = decode_real_branch(s, next, Branch::HH, qw, qh, h.levels);
  if (next >= s.segments.size()) throw FormatError("CAMRA stream lacks its sign plane", 0);
  const CodedSegment& sign_seg = s.segments[next++];
  if (sign_seg.band_id != kSignPlaneId) throw FormatError("expected the sign-plane segment", sign_seg.stream_offset);
  const auto signs = decode_sign_plane(sign_seg.bytes, qw, 3 * qh, sign_seg.stream_offset);
  require_consumed(s, next);
  const double peak = static_cast<double>((1 << h.bit_depth) - 1);
  QuarterBands b = from_display(ll, vs, hh, signs, h.matrix(), h.pipeline(), peak);
  return lossy_back(s, std::move(b.w_ll), b.v_s, vd, std::move(b.w_hh));
}

BayerImage decode(const CompressedStream& s) {
  switch (s.header.mode) {
    case Mode::Lossless: return decode_lossless(s);
    case Mode::LossyA: return decode_lossy_a(s);
    case Mode::LossyB: return decode_lossy_b(s);
    case Mode::Camra: return decode_camra(s);
    default: throw FormatError("mode " + std::string(to_string(s.header.mode)) + " is a bench baseline", 5);
  }
}

BayerImage decode(std::span<const std::uint8_t> bytes) { return decode(CompressedStream::parse(bytes)); }

}  // namespace camra
