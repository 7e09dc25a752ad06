#include "camra/entropy_coding.hpp"

#include <algorithm>
#include <bit>
#include <memory>
#include <cmath>
#include <string>

#include "camra/bytes.hpp"

namespace camra {

// ---------------------------------------------------------------------------
// Range coder (carry-propagating, 32-bit range, byte-wise renormalization)

void RangeEncoder::encode(BitModel& m, int bit) {
  const std::uint32_t bound = (range_ >> 16) * m.p0();
  if (!bit) {
    range_ = bound;
  } else {
    low_ += bound;
    range_ -= bound;
  }
  m.update(bit);
  while (range_ < (1u << 24)) {
    range_ <<= 8;
    shift_low();
  }
}

void RangeEncoder::encode_direct(int bit) {
  range_ >>= 1;
  if (bit) low_ += range_;
  while (range_ < (1u << 24)) {
    range_ <<= 8;
    shift_low();
  }
}

void RangeEncoder::shift_low() {
  if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    const auto carry = static_cast<std::uint8_t>(low_ >> 32);
    std::uint8_t temp = cache_;
    do {
      out_.push_back(static_cast<std::uint8_t>(temp + carry));
      temp = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = static_cast<std::uint8_t>(low_ >> 24);
  }
  ++cache_size_;
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

std::vector<std::uint8_t> RangeEncoder::finish() {
  for (int i = 0; i < 5; ++i) shift_low();
  // The first emitted byte is always the zero seed of the cache.
  out_.erase(out_.begin());
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> data, std::size_t base) : data_(data), base_(base) {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next();
}

std::uint8_t RangeDecoder::next() {
  if (pos_ >= data_.size()) throw FormatError("range decoder ran past the end of its payload", base_ + pos_);
  return data_[pos_++];
}

int RangeDecoder::decode(BitModel& m) {
  const std::uint32_t bound = (range_ >> 16) * m.p0();
  int bit;
  if (code_ < bound) {
    range_ = bound;
    bit = 0;
  } else {
    code_ -= bound;
    range_ -= bound;
    bit = 1;
  }
  m.update(bit);
  while (range_ < (1u << 24)) {
    range_ <<= 8;
    code_ = (code_ << 8) | next();
  }
  return bit;
}

int RangeDecoder::decode_direct() {
  range_ >>= 1;
  int bit = 0;
  if (code_ >= range_) {
    code_ -= range_;
    bit = 1;
  }
  while (range_ < (1u << 24)) {
    range_ <<= 8;
    code_ = (code_ << 8) | next();
  }
  return bit;
}

CoderContexts::CoderContexts(BandClass cls) : band_class(cls) {}

// ---------------------------------------------------------------------------
// Block coding

namespace {

enum BlockMode : std::uint8_t { kCoded = 0, kRaw = 1 };

class BitPacker {
public:
  void put(std::uint32_t v, int nbits) {
    for (int i = nbits - 1; i >= 0; --i) {
      acc_ = static_cast<std::uint8_t>((acc_ << 1) | ((v >> i) & 1u));
      if (++fill_ == 8) {
        out_.push_back(acc_);
        acc_ = 0;
        fill_ = 0;
      }
    }
  }
  std::vector<std::uint8_t> finish() {
    if (fill_) out_.push_back(static_cast<std::uint8_t>(acc_ << (8 - fill_)));
    return std::move(out_);
  }

private:
  std::vector<std::uint8_t> out_;
  std::uint8_t acc_ = 0;
  int fill_ = 0;
};

class BitUnpacker {
public:
  BitUnpacker(std::span<const std::uint8_t> d, std::size_t base) : d_(d), base_(base) {}
  std::uint32_t get(int nbits) {
    std::uint32_t v = 0;
    for (int i = 0; i < nbits; ++i) {
      const std::size_t byte = pos_ >> 3;
      if (byte >= d_.size()) throw FormatError("raw block truncated", base_ + byte);
      v = (v << 1) | ((d_[byte] >> (7 - (pos_ & 7))) & 1u);
      ++pos_;
    }
    return v;
  }

private:
  std::span<const std::uint8_t> d_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

inline int sgn(std::int32_t v) { return (v > 0) - (v < 0); }

inline std::uint32_t magnitude(std::int32_t v) {
  return v < 0 ? static_cast<std::uint32_t>(-static_cast<std::int64_t>(v)) : static_cast<std::uint32_t>(v);
}

struct Neighbours {
  std::uint32_t mag[4];
  int sign_ctx;
};

// Causal neighbours W, N, NW, NE inside the block.
inline Neighbours neighbours(const std::vector<std::int32_t>& blk, int bw, int r, int c) {
  Neighbours n{{0, 0, 0, 0}, 4};
  std::int32_t w = 0, nn = 0;
  if (c > 0) w = blk[r * bw + c - 1];
  if (r > 0) {
    nn = blk[(r - 1) * bw + c];
    if (c > 0) n.mag[2] = magnitude(blk[(r - 1) * bw + c - 1]);
    if (c + 1 < bw) n.mag[3] = magnitude(blk[(r - 1) * bw + c + 1]);
  }
  n.mag[0] = magnitude(w);
  n.mag[1] = magnitude(nn);
  n.sign_ctx = (sgn(w) + 1) * 3 + (sgn(nn) + 1);
  return n;
}

inline int significant_neighbours(const Neighbours& n, int plane) {
  const std::uint32_t t = 1u << plane;
  const int k = (n.mag[0] >= t) + (n.mag[1] >= t) + (n.mag[2] >= t) + (n.mag[3] >= t);
  return k < 2 ? k : 2;
}

std::vector<std::uint8_t> encode_block(const std::vector<std::int32_t>& blk, int bw, int bh, BandClass cls) {
  std::uint32_t maxmag = 0;
  for (auto v : blk) maxmag = std::max(maxmag, magnitude(v));
  const int planes = static_cast<int>(std::bit_width(maxmag));
  if (planes > kMaxPlanes)
    throw InvalidArgument("coefficient magnitude " + std::to_string(maxmag) + " exceeds the coder range");
  if (planes == 0) return {kCoded, 0};

  auto ctx = std::make_unique<CoderContexts>(cls);
  RangeEncoder enc;
  for (int r = 0; r < bh; ++r)
    for (int c = 0; c < bw; ++c) {
      const std::int32_t v = blk[r * bw + c];
      const std::uint32_t m = magnitude(v);
      const Neighbours nb = neighbours(blk, bw, r, c);
      int msb = -1;
      for (int p = planes - 1; p >= 0; --p) {
        const int bit = static_cast<int>((m >> p) & 1u);
        if (msb < 0) {
          enc.encode(ctx->significance[p][significant_neighbours(nb, p)], bit);
          if (bit) {
            msb = p;
            enc.encode(ctx->sign[nb.sign_ctx], v < 0);
          }
        } else {
          enc.encode(ctx->refinement[p][std::min(msb - p, CoderContexts::kRefineDepths) - 1], bit);
        }
      }
    }
  std::vector<std::uint8_t> coded = enc.finish();

  const std::size_t n = blk.size();
  const std::size_t raw_bytes = (n * static_cast<std::size_t>(planes + 1) + 7) / 8;
  std::vector<std::uint8_t> out;
  if (coded.size() <= raw_bytes) {
    out = {kCoded, static_cast<std::uint8_t>(planes)};
    out.insert(out.end(), coded.begin(), coded.end());
  } else {
    BitPacker pk;
    for (auto v : blk) {
      pk.put(v < 0, 1);
      pk.put(magnitude(v), planes);
    }
    auto raw = pk.finish();
    out = {kRaw, static_cast<std::uint8_t>(planes)};
    out.insert(out.end(), raw.begin(), raw.end());
  }
  return out;
}

void decode_block(std::span<const std::uint8_t> payload, std::size_t base, std::vector<std::int32_t>& blk, int bw,
                  int bh, BandClass cls) {
  if (payload.size() < 2) throw FormatError("block payload too short", base);
  const std::uint8_t mode = payload[0];
  const int planes = payload[1];
  if (mode > kRaw) throw FormatError("unknown block mode " + std::to_string(mode), base);
  if (planes > kMaxPlanes) throw FormatError("invalid bitplane count " + std::to_string(planes), base + 1);
  std::fill(blk.begin(), blk.end(), 0);
  if (planes == 0) {
    if (payload.size() != 2) throw FormatError("trailing bytes after an empty block", base + 2);
    return;
  }
  const auto body = payload.subspan(2);
  if (mode == kRaw) {
    BitUnpacker up(body, base + 2);
    for (auto& v : blk) {
      const bool neg = up.get(1);
      const auto m = static_cast<std::int32_t>(up.get(planes));
      v = neg ? -m : m;
    }
    return;
  }
  auto ctx = std::make_unique<CoderContexts>(cls);
  RangeDecoder dec(body, base + 2);
  for (int r = 0; r < bh; ++r)
    for (int c = 0; c < bw; ++c) {
      const Neighbours nb = neighbours(blk, bw, r, c);
      std::uint32_t m = 0;
      bool neg = false;
      int msb = -1;
      for (int p = planes - 1; p >= 0; --p) {
        int bit;
        if (msb < 0) {
          bit = dec.decode(ctx->significance[p][significant_neighbours(nb, p)]);
          if (bit) {
            msb = p;
            neg = dec.decode(ctx->sign[nb.sign_ctx]);
          }
        } else {
          bit = dec.decode(ctx->refinement[p][std::min(msb - p, CoderContexts::kRefineDepths) - 1]);
        }
        m |= static_cast<std::uint32_t>(bit) << p;
      }
      blk[r * bw + c] = neg ? -static_cast<std::int32_t>(m) : static_cast<std::int32_t>(m);
    }
}

int blocks_along(int n) { return (n + kCodeBlockSize - 1) / kCodeBlockSize; }

}  // namespace

CodedSegment encode_band(const IntGrid& grid, BandClass cls, std::uint8_t band_id) {
  const int bx = blocks_along(grid.width()), by = blocks_along(grid.height());
  const long count = static_cast<long>(bx) * by;
  if (count > 0xFFFF) throw DimensionError("band has too many code blocks");
  ByteWriter w;
  w.u8(band_id);
  w.u16(static_cast<std::uint16_t>(count));
  std::vector<std::int32_t> blk;
  for (int j = 0; j < by; ++j)
    for (int i = 0; i < bx; ++i) {
      const int r0 = j * kCodeBlockSize, c0 = i * kCodeBlockSize;
      const int bw = std::min(kCodeBlockSize, grid.width() - c0), bh = std::min(kCodeBlockSize, grid.height() - r0);
      blk.resize(static_cast<std::size_t>(bw) * bh);
      for (int r = 0; r < bh; ++r) std::copy_n(&grid(r0 + r, c0), bw, blk.begin() + static_cast<long>(r) * bw);
      const auto payload = encode_block(blk, bw, bh, cls);
      w.u32(static_cast<std::uint32_t>(payload.size()));
      w.bytes(payload);
    }
  return {band_id, grid.size(), w.take()};
}

IntGrid decode_band(std::span<const std::uint8_t> segment, int width, int height, BandClass cls, std::size_t base) {
  ByteReader rd(segment, base);
  rd.u8();
  const int bx = blocks_along(width), by = blocks_along(height);
  const std::size_t at = rd.absolute();
  const int count = rd.u16();
  if (count != bx * by)
    throw FormatError("block count " + std::to_string(count) + " does not match a " + std::to_string(width) + "x" +
                          std::to_string(height) + " band",
                      at);
  IntGrid grid(width, height);
  std::vector<std::int32_t> blk;
  for (int j = 0; j < by; ++j)
    for (int i = 0; i < bx; ++i) {
      const int r0 = j * kCodeBlockSize, c0 = i * kCodeBlockSize;
      const int bw = std::min(kCodeBlockSize, width - c0), bh = std::min(kCodeBlockSize, height - r0);
      const std::uint32_t len = rd.u32();
      const std::size_t start = rd.absolute();
      const auto payload = rd.bytes(len);
      blk.resize(static_cast<std::size_t>(bw) * bh);
      decode_block(payload, start, blk, bw, bh, cls);
      for (int r = 0; r < bh; ++r) std::copy_n(blk.begin() + static_cast<long>(r) * bw, bw, &grid(r0 + r, c0));
    }
  return grid;
}

std::size_t segment_length(std::span<const std::uint8_t> data, std::size_t base) {
  ByteReader rd(data, base);
  rd.u8();
  const int count = rd.u16();
  for (int i = 0; i < count; ++i) rd.bytes(rd.u32());
  return rd.position();
}

CodedSegment encode_sign_plane(const Grid<std::uint8_t>& bits) {
  const std::size_t n = bits.size();
  std::vector<std::uint8_t> payload;
  {
    BitModel model(7);
    RangeEncoder enc;
    for (auto b : bits.values()) enc.encode(model, b != 0);
    auto coded = enc.finish();
    if (coded.size() <= (n + 7) / 8) {
      payload.push_back(kCoded);
      payload.insert(payload.end(), coded.begin(), coded.end());
    } else {
      BitPacker pk;
      for (auto b : bits.values()) pk.put(b != 0, 1);
      auto raw = pk.finish();
      payload.push_back(kRaw);
      payload.insert(payload.end(), raw.begin(), raw.end());
    }
  }
  ByteWriter w;
  w.u8(kSignPlaneId);
  w.u16(1);
  w.u32(static_cast<std::uint32_t>(payload.size()));
  w.bytes(payload);
  return {kSignPlaneId, n, w.take()};
}

Grid<std::uint8_t> decode_sign_plane(std::span<const std::uint8_t> segment, int width, int height, std::size_t base) {
  ByteReader rd(segment, base);
  if (rd.u8() != kSignPlaneId) rd.fail("not a sign-plane segment");
  if (rd.u16() != 1) rd.fail("sign-plane segment must hold exactly one block");
  const std::uint32_t len = rd.u32();
  const std::size_t start = rd.absolute();
  const auto payload = rd.bytes(len);
  if (payload.empty()) throw FormatError("empty sign-plane payload", start);
  Grid<std::uint8_t> out(width, height);
  if (payload[0] == kRaw) {
    BitUnpacker up(payload.subspan(1), start + 1);
    for (auto& b : out.values()) b = static_cast<std::uint8_t>(up.get(1));
  } else if (payload[0] == kCoded) {
    if (out.empty()) return out;
    BitModel model(7);
    RangeDecoder dec(payload.subspan(1), start + 1);
    for (auto& b : out.values()) b = static_cast<std::uint8_t>(dec.decode(model));
  } else {
    throw FormatError("unknown sign-plane mode", start);
  }
  return out;
}

double entropy_estimate(std::span<const std::int32_t> values) {
  if (values.empty()) return 0.0;
  std::vector<std::int32_t> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double h = 0;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    const double p = static_cast<double>(j - i) / n;
    h -= p * std::log2(p);
    i = j;
  }
  return h;
}

double entropy_estimate(const IntGrid& grid) { return entropy_estimate(std::span<const std::int32_t>(grid.values())); }

double entropy_estimate(const RealGrid& grid) {
  std::vector<std::int32_t> v(grid.size());
  std::transform(grid.values().begin(), grid.values().end(), v.begin(),
                 [](double x) { return static_cast<std::int32_t>(std::lround(x)); });
  return entropy_estimate(v);
}

}  // namespace camra
