#pragma once

// Compression modes and the CMRA container.
//
//   LOSSLESS  black offset -> 5/3 level 1 -> integer sum/difference -> 5/3
//             packets -> entropy coding
//   LOSSY_A   9/7 level 1 -> matrix M -> 9/7 packets -> quantize -> coding
//   LOSSY_B   9/7 level 1 -> matrix M -> quantize -> 5/3 packets -> coding
//   CAMRA     LOSSY_A with (LL, v_s, HH) coded in the display domain of a
//             quarter-resolution colour image, plus a sign plane
//
// Every multi-byte field is little-endian.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "camra/camera_pipeline.hpp"
#include "camra/cfa_model.hpp"
#include "camra/decorrelate.hpp"
#include "camra/entropy_coding.hpp"
#include "camra/quantize.hpp"

namespace camra {

enum class Mode : std::uint8_t {
  Lossless = 0,
  LossyA = 1,
  LossyB = 2,
  Camra = 3,
  // Comparison schemes produced by the bench harness.
  BaselineCfaGray = 16,
  BaselineDemux = 17,
  BaselineMallat = 18,
  BaselineRgb = 19,
};

bool is_lossy(Mode m);
std::string_view to_string(Mode m);

inline constexpr std::array<std::uint8_t, 4> kMagic{'C', 'M', 'R', 'A'};
inline constexpr std::uint8_t kFormatVersion = 1;
inline constexpr int kMaxLevels = 10;

struct StreamHeader {
  std::uint8_t version = kFormatVersion;
  Mode mode = Mode::Lossless;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint8_t bit_depth = 16;
  CfaPhase phase = CfaPhase::RGGB;
  std::array<std::uint16_t, 3> black{0, 0, 0};
  std::uint8_t levels = 0;     // N actually applied
  std::uint8_t levels_vd = 0;  // N' actually applied to v_d
  ObjectiveForm objective = ObjectiveForm::DerivationConsistent;
  float lambda = 0;
  // Lossy modes only.
  std::array<std::int32_t, 4> m_fixed{0, 0, 0, 0};  // 16.16, row-major
  std::vector<float> steps;                         // per Branch
  bool integer_bands = true;  // LOSSY_A/CAMRA: packet stage sees integer-rounded bands
  // CAMRA only.
  std::array<float, 9> color_matrix{1, 0, 0, 0, 1, 0, 0, 0, 1};
  std::array<float, 3> illuminant{1, 1, 1};
  GammaCurve gamma = GammaCurve::Identity;

  Mat2 matrix() const;
  PipelineParams pipeline() const;
  BlackOffset black_offset() const { return {black[0], black[1], black[2]}; }

  friend bool operator==(const StreamHeader&, const StreamHeader&) = default;
};

std::vector<std::uint8_t> serialize_header(const StreamHeader& h);
/// Parses a header and reports how many bytes it used. Validates every field.
StreamHeader parse_header(std::span<const std::uint8_t> data, std::size_t* consumed = nullptr);

/// Header, coded segments in branch order (LL, v_s, v_d, HH, sign plane),
/// then a CRC-32 of everything before it.
struct CompressedStream {
  StreamHeader header;
  std::vector<CodedSegment> segments;

  std::vector<std::uint8_t> serialize() const;
  static CompressedStream parse(std::span<const std::uint8_t> data);

  std::size_t byte_size() const;
  /// Coded bits per mosaic pixel, header and trailer included.
  double bpp() const;
  /// Bits spent on the sign-plane segment per mosaic pixel.
  double sign_plane_bpp() const;
};

struct CodecConfig {
  int levels = 5;     // N for LL, v_s and HH
  int levels_vd = 2;  // N' for v_d
  MOptimizerConfig optimizer;
  std::size_t max_pairs = 100000;  // coefficient pairs fed to optimize_m
  /// LOSSY_A and CAMRA hand the level-1 bands to the packet coder as integer
  /// images and read them back rounded, like an integer-sample codec would.
  bool integer_bands = true;
};

/// Band id of subband `index` of `branch`.
inline std::uint8_t band_id(Branch b, int index) {
  return static_cast<std::uint8_t>((static_cast<int>(b) << 5) | index);
}
BandClass band_class(Branch b);

CompressedStream encode_lossless(const BayerImage& y, const CodecConfig& cfg = {});
BayerImage decode_lossless(const CompressedStream& s);

/// `m` empty: M is optimized on this image's level-1 coefficients.
CompressedStream encode_lossy_a(const BayerImage& y, const QuantizationSpec& q, std::optional<Mat2> m = {},
                                const CodecConfig& cfg = {});
BayerImage decode_lossy_a(const CompressedStream& s);

CompressedStream encode_lossy_b(const BayerImage& y, const QuantizationSpec& q, std::optional<Mat2> m = {},
                                const CodecConfig& cfg = {});
BayerImage decode_lossy_b(const CompressedStream& s);

CompressedStream encode_camra(const BayerImage& y, const QuantizationSpec& q, const PipelineParams& params,
                              std::optional<Mat2> m = {}, const CodecConfig& cfg = {});
BayerImage decode_camra(const CompressedStream& s);

/// Dispatches on the header mode (0..3).
BayerImage decode(const CompressedStream& s);
BayerImage decode(std::span<const std::uint8_t> bytes);

/// Runs optimize_m on the image's level-1 9/7 LH/HL coefficients and returns
/// the matrix the lossy encoders would use.
Mat2 select_m(const BayerImage& y, const CodecConfig& cfg = {});

/// Rescales an optimized M to |det M| = 1. The optimizer's overall scale k
/// acts like a global step multiplier on v_s and v_d; removing it keeps the
/// quantization step the only rate control.
Mat2 normalize_scale(const Mat2& m);

// Building blocks shared with the bench harness.

/// Subtracts black offsets and flips the mosaic to RGGB.
IntGrid prepare_mosaic(const BayerImage& y);
/// Inverse of prepare_mosaic followed by rounding and clamping.
BayerImage finish_mosaic(const RealGrid& normalized, const StreamHeader& h);
BayerImage finish_mosaic(const IntGrid& normalized, const StreamHeader& h);

/// Codes all subbands of a Mallat layout.
void encode_tree(const PacketTree<std::int32_t>& tree, Branch branch, std::vector<CodedSegment>& out);
/// Reads 3*levels+1 segments starting at `next`.
PacketTree<std::int32_t> decode_tree(const CompressedStream& s, std::size_t& next, Branch branch, int width,
                                     int height, int levels);

/// Header fields common to every mode.
StreamHeader base_header(const BayerImage& y, Mode mode);

}  // namespace camra
