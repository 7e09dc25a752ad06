#pragma once

// Lossless coding of integer subband grids: sign/magnitude bitplanes driven
// through an adaptive binary range coder, one independent context set per
// 64x64 block.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "camra/grid.hpp"

namespace camra {

inline constexpr int kCodeBlockSize = 64;
/// Magnitudes must stay below 2^kMaxPlanes.
inline constexpr int kMaxPlanes = 30;

enum class BandClass : std::uint8_t { Luma = 0, Chroma = 1 };

/// Adaptive probability of a zero bit. The state keeps 31 fractional bits so
/// that long constant runs can approach the coder's probability floor.
class BitModel {
public:
  explicit BitModel(int max_shift = 6) : max_shift_(static_cast<std::uint8_t>(max_shift)) {}

  /// P(bit == 0) in 1/65536 units, clamped away from 0 and 1.
  std::uint32_t p0() const {
    const std::uint32_t p = state_ >> 15;
    return p < kFloor ? kFloor : (p > 65536 - kFloor ? 65536 - kFloor : p);
  }
  void update(int bit) {
    const int shift = count_ < kRamp.size() ? kRamp[count_++] : max_shift_;
    const int s = shift < max_shift_ ? shift : max_shift_;
    if (bit) state_ -= state_ >> s;
    else state_ += ((1u << 31) - state_) >> s;
  }

  static constexpr std::uint32_t kFloor = 16;

private:
  // Fast start: roughly log2(count + 2) until the cap.
  static constexpr std::array<std::uint8_t, 62> kRamp = [] {
    std::array<std::uint8_t, 62> r{};
    for (std::size_t i = 0; i < r.size(); ++i) {
      int s = 1;
      while ((2u << s) <= i + 2) ++s;
      r[i] = static_cast<std::uint8_t>(s);
    }
    return r;
  }();

  std::uint32_t state_ = 1u << 30;
  std::uint8_t count_ = 0;
  std::uint8_t max_shift_;
};

class RangeEncoder {
public:
  void encode(BitModel& m, int bit);
  /// Equiprobable bit, no model.
  void encode_direct(int bit);
  std::vector<std::uint8_t> finish();

private:
  void shift_low();

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
  std::vector<std::uint8_t> out_;
};

class RangeDecoder {
public:
  /// `base` is the absolute offset of `data`, used in error messages.
  RangeDecoder(std::span<const std::uint8_t> data, std::size_t base);
  int decode(BitModel& m);
  int decode_direct();

private:
  std::uint8_t next();

  std::span<const std::uint8_t> data_;
  std::size_t base_;
  std::size_t pos_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint32_t code_ = 0;
};

/// Context state of one block, keyed by bitplane and causal neighbourhood.
struct CoderContexts {
  static constexpr int kNeighbourClasses = 3;  // 0, 1, 2+ significant neighbours
  static constexpr int kRefineDepths = 3;      // first, second, later refinement bit

  explicit CoderContexts(BandClass cls);

  BandClass band_class;
  std::array<std::array<BitModel, kNeighbourClasses>, kMaxPlanes> significance;
  std::array<std::array<BitModel, kRefineDepths>, kMaxPlanes> refinement;
  std::array<BitModel, 9> sign;  // by (sign of west, sign of north)
};

/// One coded band: a self-describing byte segment.
///   band id u8 | block count u16 | per block: payload length u32, payload
struct CodedSegment {
  std::uint8_t band_id = 0;
  std::size_t sample_count = 0;
  std::vector<std::uint8_t> bytes;
  std::size_t stream_offset = 0;  // position inside a parsed container

  std::size_t bits() const { return bytes.size() * 8; }
  double bpp() const { return sample_count ? static_cast<double>(bits()) / static_cast<double>(sample_count) : 0.0; }
};

CodedSegment encode_band(const IntGrid& grid, BandClass cls, std::uint8_t band_id = 0);

/// Decodes a segment produced by encode_band for a grid of the given shape.
/// `base` offsets byte positions reported in FormatError.
IntGrid decode_band(std::span<const std::uint8_t> segment, int width, int height, BandClass cls,
                    std::size_t base = 0);

/// Bytes a segment occupies, read from its own length fields.
std::size_t segment_length(std::span<const std::uint8_t> data, std::size_t base = 0);

inline constexpr std::uint8_t kSignPlaneId = 0xFF;

/// Binary plane coded with a single adaptive context.
CodedSegment encode_sign_plane(const Grid<std::uint8_t>& bits);
Grid<std::uint8_t> decode_sign_plane(std::span<const std::uint8_t> segment, int width, int height,
                                     std::size_t base = 0);

/// Order-0 Shannon entropy of the value histogram, bits per sample.
double entropy_estimate(std::span<const std::int32_t> values);
double entropy_estimate(const IntGrid& grid);
/// Real values are rounded to the nearest integer first.
double entropy_estimate(const RealGrid& grid);

}  // namespace camra
