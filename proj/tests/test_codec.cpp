#include <doctest.h>

#include <cmath>
#include <random>

#include "camra/bench.hpp"
#include "camra/codec.hpp"
#include "camra/error.hpp"

using namespace camra;

namespace {

BayerImage random_mosaic(std::mt19937& rng, int w, int h, int depth, CfaPhase phase) {
  BayerImage y;
  y.bit_depth = depth;
  y.phase = phase;
  y.samples = IntGrid(w, h);
  const std::int32_t top = (std::int32_t{1} << depth) - 1;
  std::uniform_int_distribution<std::int32_t> d(0, top);
  for (auto& v : y.samples.values()) v = d(rng);
  return y;
}

// Smooth content: random integer mosaic would not exercise the lossy path.
BayerImage smooth_mosaic(int size, int phase) {
  return generate_image(7, phase, size).mosaic;
}

double mosaic_psnr(const BayerImage& a, const BayerImage& b) {
  return psnr(a.samples, b.samples, a.max_value());
}

}  // namespace

TEST_CASE("lossless round trip over phases and depths") {
  std::mt19937 rng(61);
  for (int depth : {8, 10, 12, 14, 16})
    for (int phase = 0; phase < 4; ++phase) {
      auto y = random_mosaic(rng, 48, 34, depth, static_cast<CfaPhase>(phase));
      y.black = {static_cast<int>(rng() % 200), static_cast<int>(rng() % 200), static_cast<int>(rng() % 200)};
      const auto bytes = encode_lossless(y).serialize();
      REQUIRE(decode(bytes) == y);
    }
  for (int phase = 0; phase < 4; ++phase) {
    const auto y = smooth_mosaic(128, phase);
    CHECK(decode_lossless(CompressedStream::parse(encode_lossless(y).serialize())) == y);
  }
}

TEST_CASE("lossless handles tiny images by reducing the level count") {
  std::mt19937 rng(62);
  const auto y = random_mosaic(rng, 2, 2, 12, CfaPhase::BGGR);
  const auto s = encode_lossless(y);
  CHECK(s.header.levels == 0);
  CHECK(decode(s.serialize()) == y);
  const auto z = random_mosaic(rng, 64, 16, 12, CfaPhase::RGGB);
  CodecConfig cfg;
  cfg.levels = 9;
  const auto t = encode_lossless(z, cfg);
  CHECK(t.header.levels == max_levels(32, 8, 9));
  CHECK(t.header.levels < 9);
  CHECK(decode(t.serialize()) == z);
}

TEST_CASE("constant mosaic codes almost for free") {
  BayerImage y;
  y.bit_depth = 12;
  y.samples = IntGrid(1024, 1024, 1000);
  const auto s = encode_lossless(y);
  CHECK(s.bpp() <= 0.05);
  CHECK(decode(s.serialize()) == y);
}

TEST_CASE("odd dimensions and bad samples are rejected") {
  BayerImage y;
  y.bit_depth = 12;
  y.samples = IntGrid(5, 4);
  CHECK_THROWS_AS(encode_lossless(y), DimensionError);
  y.samples = IntGrid(4, 4, 5000);
  CHECK_THROWS_AS(encode_lossless(y), InvalidArgument);
}

TEST_CASE("header round trip") {
  std::mt19937 rng(63);
  for (int i = 0; i < 200; ++i) {
    StreamHeader h;
    h.mode = static_cast<Mode>(rng() % 4);
    h.width = 2 * (1 + rng() % 4000);
    h.height = 2 * (1 + rng() % 4000);
    h.bit_depth = static_cast<std::uint8_t>(8 + rng() % 9);
    h.phase = static_cast<CfaPhase>(rng() % 4);
    h.black = {static_cast<std::uint16_t>(rng() % 300), static_cast<std::uint16_t>(rng() % 300),
               static_cast<std::uint16_t>(rng() % 300)};
    h.levels = static_cast<std::uint8_t>(rng() % 6);
    h.levels_vd = static_cast<std::uint8_t>(rng() % (h.levels + 1));
    if (is_lossy(h.mode)) {
      h.lambda = 0.1f;
      h.objective = static_cast<ObjectiveForm>(rng() % 2);
      h.m_fixed = {to_fixed_16_16(0.7), to_fixed_16_16(0.7), to_fixed_16_16(0.72), to_fixed_16_16(-0.69)};
      h.steps = {1.5f, 2.0f, 3.0f, 0.25f};
      h.integer_bands = rng() % 2;
    }
    if (h.mode == Mode::Camra) {
      h.color_matrix = {1.8f, -0.6f, -0.2f, -0.2f, 1.6f, -0.4f, 0, -0.5f, 1.5f};
      h.illuminant = {2, 1, 1.6f};
      h.gamma = GammaCurve::SRGB;
    }
    const auto bytes = serialize_header(h);
    std::size_t used = 0;
    const auto back = parse_header(bytes, &used);
    REQUIRE(back == h);
    REQUIRE(used == bytes.size());
  }
}

TEST_CASE("malformed headers") {
  StreamHeader h;
  h.width = 16;
  h.height = 16;
  const auto good = serialize_header(h);
  auto bad = good;
  bad[0] = 'X';
  CHECK_THROWS_AS(parse_header(bad), FormatError);
  bad = good;
  bad[4] = 99;  // version
  CHECK_THROWS_AS(parse_header(bad), FormatError);
  bad = good;
  bad[5] = 7;  // mode
  CHECK_THROWS_AS(parse_header(bad), FormatError);
  for (std::size_t n = 0; n < good.size(); ++n)
    CHECK_THROWS_AS(parse_header(std::span(good).first(n)), FormatError);
}

TEST_CASE("stream corruption is detected") {
  const auto y = smooth_mosaic(64, 1);
  const auto bytes = encode_lossless(y).serialize();
  for (std::size_t n : {std::size_t{3}, std::size_t{20}, bytes.size() / 2, bytes.size() - 1}) {
    std::vector<std::uint8_t> t(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(n));
    CHECK_THROWS_AS(decode(t), FormatError);
  }
  for (std::size_t pos : {bytes.size() / 3, bytes.size() / 2, bytes.size() - 6}) {
    auto c = bytes;
    c[pos] ^= 0x5A;
    CHECK_THROWS_AS(decode(c), FormatError);
  }
  auto extra = bytes;
  extra.push_back(0);
  CHECK_THROWS_AS(decode(extra), FormatError);
  try {
    auto c = bytes;
    c[bytes.size() / 2] ^= 1;
    decode(c);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() <= bytes.size());
  }
}

TEST_CASE("encoding is deterministic") {
  const auto y = smooth_mosaic(64, 2);
  CHECK(encode_lossless(y).serialize() == encode_lossless(y).serialize());
  const auto q = QuantizationSpec::uniform(4);
  CHECK(encode_lossy_a(y, q).serialize() == encode_lossy_a(y, q).serialize());
  CHECK(encode_camra(y, q, bench_camera()).serialize() == encode_camra(y, q, bench_camera()).serialize());
}

TEST_CASE("lossy quality falls with the step") {
  const auto y = smooth_mosaic(128, 0);
  for (Mode mode : {Mode::LossyA, Mode::LossyB, Mode::Camra}) {
    double prev_psnr = 1e9, prev_bpp = 1e9;
    for (double step : {1.0, 4.0, 16.0, 64.0}) {
      double bpp = 0;
      const auto out = lossy_round_trip(y, mode, QuantizationSpec::uniform(step), bench_camera(), {}, {}, &bpp);
      const double p = mosaic_psnr(y, out);
      CHECK(p <= prev_psnr + 1e-9);
      CHECK(bpp <= prev_bpp);
      prev_psnr = p;
      prev_bpp = bpp;
    }
  }
}

TEST_CASE("fine LOSSY-B quantization is at least as accurate as LOSSY-A") {
  const auto y = smooth_mosaic(128, 3);
  const auto q = QuantizationSpec::uniform(1);
  const auto a = decode(encode_lossy_a(y, q).serialize());
  const auto b = decode(encode_lossy_b(y, q).serialize());
  CHECK(mosaic_psnr(y, b) >= mosaic_psnr(y, a));
}

TEST_CASE("near-lossless LOSSY-A with exact bands") {
  const auto y = smooth_mosaic(128, 0);
  CodecConfig cfg;
  cfg.integer_bands = false;
  const auto s = encode_lossy_a(y, QuantizationSpec::uniform(0.5), {}, cfg);
  CHECK_FALSE(s.header.integer_bands);
  CHECK(mosaic_psnr(y, decode(s.serialize())) >= 90.0);
}

TEST_CASE("all-zero mosaic survives every lossy mode") {
  BayerImage y;
  y.bit_depth = 12;
  y.samples = IntGrid(64, 64);
  for (Mode mode : {Mode::LossyA, Mode::LossyB, Mode::Camra}) {
    const auto out = lossy_round_trip(y, mode, QuantizationSpec::uniform(8), bench_camera(), Mat2{0.5, 0.5, 0.5, -0.5}, {});
    CHECK(out.samples == y.samples);
  }
}

TEST_CASE("CAMRA with an identity pipeline matches LOSSY-A") {
  const auto y = smooth_mosaic(64, 1);
  PipelineParams id;
  id.gamma = GammaCurve::Identity;
  const Mat2 m = normalize_scale(select_m(y));
  CodecConfig cfg;
  cfg.integer_bands = false;
  const auto q = QuantizationSpec::uniform(0.001);
  const auto a = decode(encode_lossy_a(y, q, m, cfg).serialize());
  const auto c = decode(encode_camra(y, q, id, m, cfg).serialize());
  double se = 0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const double d = a.samples.values()[i] - c.samples.values()[i];
    se += d * d;
  }
  CHECK(std::sqrt(se / a.samples.size()) <= 1e-6);
}

TEST_CASE("CAMRA records its pipeline and sign plane") {
  const auto y = smooth_mosaic(64, 2);
  const auto s = encode_camra(y, QuantizationSpec::uniform(2), bench_camera());
  CHECK(s.header.mode == Mode::Camra);
  CHECK(s.header.gamma == GammaCurve::SRGB);
  CHECK(s.segments.back().band_id == kSignPlaneId);
  CHECK(s.sign_plane_bpp() >= 0);
  CHECK(s.sign_plane_bpp() < 0.05);
  const auto p = CompressedStream::parse(s.serialize());
  CHECK(p.header == s.header);
  CHECK(decode(p).samples.size() == y.samples.size());
}

TEST_CASE("lossy header contents") {
  const auto y = smooth_mosaic(64, 0);
  const Mat2 m{0.7, 0.7, 0.72, -0.69};
  const auto s = encode_lossy_b(y, QuantizationSpec::uniform(3, 2), m);
  CHECK(s.header.matrix() == quantize_fixed_16_16(m));
  CHECK(s.header.steps == std::vector<float>{3, 6, 3, 6});
  CHECK(s.header.levels == 5);
  CHECK(s.header.levels_vd == 2);
  CHECK_THROWS_AS(encode_lossy_a(y, QuantizationSpec::uniform(1), Mat2{1, 1, 1, 1}), InvalidArgument);
}

TEST_CASE("normalize_scale gives unit determinant") {
  const Mat2 m = normalize_scale(Mat2{3, 3, 2, -2});
  CHECK(std::fabs(m.det()) == doctest::Approx(1.0));
  CHECK(m.a00 / m.a10 == doctest::Approx(1.5));
}

TEST_CASE("baselines are not decodable as codec modes") {
  const auto y = smooth_mosaic(32, 0);
  CHECK_THROWS_AS(decode(baseline_mallat(y)), FormatError);
}
