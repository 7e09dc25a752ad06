#include <doctest.h>

#include <numeric>
#include <random>

#include "camra/cfa_model.hpp"
#include "camra/error.hpp"

using namespace camra;

namespace {

// Exact rational arithmetic for the sampling identities.
struct Q {
  long long n = 0, d = 1;
  Q(long long num = 0, long long den = 1) : n(num), d(den) { norm(); }
  void norm() {
    if (d < 0) n = -n, d = -d;
    const long long g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) n /= g, d /= g;
  }
  friend Q operator+(Q a, Q b) { return {a.n * b.d + b.n * a.d, a.d * b.d}; }
  friend Q operator-(Q a, Q b) { return {a.n * b.d - b.n * a.d, a.d * b.d}; }
  friend Q operator*(Q a, Q b) { return {a.n * b.n, a.d * b.d}; }
  friend bool operator==(Q a, Q b) { return a.n == b.n && a.d == b.d; }
};

ColorImage random_rgb(std::mt19937& rng, int w, int h, int hi) {
  ColorImage img(ColorSpace::RGB, w, h);
  std::uniform_int_distribution<int> d(0, hi);
  for (auto& p : img.planes)
    for (auto& v : p.values()) v = d(rng);
  return img;
}

BayerImage random_bayer(std::mt19937& rng, int w, int h, int depth, CfaPhase phase) {
  BayerImage y;
  y.bit_depth = depth;
  y.phase = phase;
  y.samples = IntGrid(w, h);
  std::uniform_int_distribution<int> d(0, y.max_value());
  for (auto& v : y.samples.values()) v = d(rng);
  return y;
}

constexpr std::array<CfaPhase, 4> kPhases{CfaPhase::RGGB, CfaPhase::GRBG, CfaPhase::GBRG, CfaPhase::BGGR};

}  // namespace

TEST_CASE("rgb_to_lab examples") {
  auto lab = rgb_to_lab(std::array<double, 3>{7, 7, 7});
  CHECK(lab == std::array<double, 3>{7, 0, 0});
  CHECK(rgb_to_lab(std::array<double, 3>{4, 0, 0}) == std::array<double, 3>{1, 1, 1});
  CHECK(rgb_to_lab(std::array<double, 3>{1, 2, 3}) == std::array<double, 3>{2, -0.5, 0});
}

TEST_CASE("lab_to_rgb examples") {
  CHECK(lab_to_rgb(std::array<double, 3>{5, 0, 0}) == std::array<double, 3>{5, 5, 5});
  CHECK(lab_to_rgb(std::array<double, 3>{2, -0.5, 0}) == std::array<double, 3>{1, 2, 3});
}

TEST_CASE("analysis and synthesis matrices multiply to the identity") {
  const Q fwd[3][3] = {{Q(1, 4), Q(1, 2), Q(1, 4)}, {Q(1, 4), Q(0), Q(-1, 4)}, {Q(1, 4), Q(-1, 2), Q(1, 4)}};
  const Q inv[3][3] = {{Q(1), Q(2), Q(1)}, {Q(1), Q(0), Q(-1)}, {Q(1), Q(-2), Q(1)}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Q s1, s2;
      for (int k = 0; k < 3; ++k) {
        s1 = s1 + inv[i][k] * fwd[k][j];
        s2 = s2 + fwd[i][k] * inv[k][j];
      }
      CHECK(s1 == Q(i == j ? 1 : 0));
      CHECK(s2 == Q(i == j ? 1 : 0));
    }
}

TEST_CASE("colour algebra round trip") {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> d(-100, 100);
  for (int i = 0; i < 1000; ++i) {
    const std::array<double, 3> x{d(rng), d(rng), d(rng)};
    const auto y = lab_to_rgb(rgb_to_lab(x));
    for (int k = 0; k < 3; ++k) CHECK(y[k] == doctest::Approx(x[k]).epsilon(1e-12));
  }
  ColorImage img = random_rgb(rng, 6, 4, 1000);
  const ColorImage back = lab_to_rgb(rgb_to_lab(img));
  CHECK(back.space == ColorSpace::RGB);
  CHECK(rgb_to_lab(img).space == ColorSpace::LAB);
  CHECK(mosaic(back, CfaPhase::GBRG) == mosaic(img, CfaPhase::GBRG));
}

TEST_CASE("modulation functions") {
  CHECK(d_alpha(0, 0) == 2);
  CHECK(d_alpha(0, 1) == 0);
  CHECK(d_alpha(1, 0) == 0);
  CHECK(d_alpha(1, 1) == -2);
  CHECK(d_beta(0, 0) == 1);
  CHECK(d_beta(0, 1) == -1);
  CHECK(d_beta(1, 0) == -1);
  CHECK(d_beta(1, 1) == 1);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) {
      CHECK((d_alpha(r, c) == -2 || d_alpha(r, c) == 0 || d_alpha(r, c) == 2));
      CHECK((d_beta(r, c) == -1 || d_beta(r, c) == 1));
    }
}

TEST_CASE("RGGB sampling pattern") {
  CHECK(channel_at(CfaPhase::RGGB, 0, 0) == Channel::R);
  CHECK(channel_at(CfaPhase::RGGB, 0, 1) == Channel::G);
  CHECK(channel_at(CfaPhase::RGGB, 1, 0) == Channel::G);
  CHECK(channel_at(CfaPhase::RGGB, 1, 1) == Channel::B);
  CHECK(channel_at(CfaPhase::BGGR, 0, 0) == Channel::B);
  CHECK(channel_at(CfaPhase::GRBG, 0, 1) == Channel::R);
  CHECK(channel_at(CfaPhase::GBRG, 1, 0) == Channel::R);
  for (auto p : kPhases) {
    CHECK(parse_phase(to_string(p)) == p);
    int counts[3] = {0, 0, 0};
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) ++counts[static_cast<int>(channel_at(p, r, c))];
    CHECK(counts[0] == 1);
    CHECK(counts[1] == 2);
    CHECK(counts[2] == 1);
  }
  CHECK_FALSE(parse_phase("RGBG").has_value());
}

TEST_CASE("mosaic of a gray image is constant") {
  ColorImage img(ColorSpace::RGB, 8, 6);
  for (auto& p : img.planes) p = RealGrid(8, 6, 37.0);
  for (auto p : kPhases) {
    const RealGrid m = mosaic(img, p);
    for (double v : m.values()) CHECK(v == 37.0);
  }
}

TEST_CASE("sampling and modulation paths agree in rational arithmetic") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> d(0, 4095);
  for (auto phase : kPhases) {
    const ColorImage img = random_rgb(rng, 8, 8, 4095);
    const RealGrid y1 = mosaic(img, phase);
    const RealGrid y2 = mosaic_modulated(rgb_to_lab(img), phase);
    CHECK(y1 == y2);
    const PhaseFlips f = flips_to_rggb(phase);
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) {
        const long long rr = static_cast<long long>(img.planes[0](r, c));
        const long long gg = static_cast<long long>(img.planes[1](r, c));
        const long long bb = static_cast<long long>(img.planes[2](r, c));
        const Q l = Q(rr, 4) + Q(gg, 2) + Q(bb, 4);
        const Q a = Q(rr, 4) - Q(bb, 4);
        const Q b = Q(rr, 4) - Q(gg, 2) + Q(bb, 4);
        // Position on the RGGB-normalized grid.
        const int nr = f.rows ? 7 - r : r, nc = f.cols ? 7 - c : c;
        const Q modulated = l + Q(d_alpha(nr, nc)) * a + Q(d_beta(nr, nc)) * b;
        const long long sampled = static_cast<long long>(y1(r, c));
        CHECK(modulated == Q(sampled));
        const Channel ch = channel_at(phase, r, c);
        CHECK(sampled == (ch == Channel::R ? rr : ch == Channel::G ? gg : bb));
      }
  }
}

TEST_CASE("odd dimensions are rejected") {
  ColorImage img(ColorSpace::RGB, 5, 4);
  CHECK_THROWS_AS(mosaic(img, CfaPhase::RGGB), DimensionError);
  BayerImage y;
  y.bit_depth = 12;
  y.samples = IntGrid(4, 3);
  CHECK_THROWS_AS(y.validate(), DimensionError);
}

TEST_CASE("bayer validation") {
  BayerImage y;
  y.bit_depth = 10;
  y.samples = IntGrid(4, 4, 1023);
  CHECK_NOTHROW(y.validate());
  y.samples(1, 1) = 1024;
  CHECK_THROWS_AS(y.validate(), InvalidArgument);
  y.samples(1, 1) = -1;
  CHECK_THROWS_AS(y.validate(), InvalidArgument);
  y.samples(1, 1) = 0;
  y.bit_depth = 17;
  CHECK_THROWS_AS(y.validate(), InvalidArgument);
  y.bit_depth = 7;
  CHECK_THROWS_AS(y.validate(), InvalidArgument);
}

TEST_CASE("black offset subtraction") {
  BayerImage y;
  y.bit_depth = 12;
  y.phase = CfaPhase::RGGB;
  y.black = {256, 256, 256};
  y.samples = IntGrid(2, 2);
  y.samples(0, 0) = 300;  // red
  y.samples(0, 1) = 100;  // green
  const IntGrid s = subtract_black_offset(y);
  CHECK(s(0, 0) == 44);
  CHECK(s(0, 1) == -156);

  std::mt19937 rng(3);
  for (auto phase : kPhases) {
    BayerImage z = random_bayer(rng, 10, 8, 14, phase);
    CHECK(subtract_black_offset(z) == z.samples);
    z.black = {100, 2000, 77};
    CHECK(add_black_offset(subtract_black_offset(z), phase, z.black) == z.samples);
    const IntGrid sh = subtract_black_offset(z);
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 10; ++c) CHECK(sh(r, c) == z.samples(r, c) - z.black.of(channel_at(phase, r, c)));
  }
}

TEST_CASE("demux and remux") {
  BayerImage y;
  y.bit_depth = 8;
  y.samples = IntGrid(2, 2);
  y.samples(0, 0) = 1;
  y.samples(0, 1) = 2;
  y.samples(1, 0) = 3;
  y.samples(1, 1) = 4;
  const DemuxPlanes p = demux(y);
  CHECK(p.r(0, 0) == 1);
  CHECK(p.g1(0, 0) == 2);
  CHECK(p.g2(0, 0) == 3);
  CHECK(p.b(0, 0) == 4);

  std::mt19937 rng(5);
  for (auto phase : kPhases) {
    const BayerImage z = random_bayer(rng, 4, 4, 16, phase);
    const DemuxPlanes q = demux(z);
    for (const IntGrid* g : {&q.r, &q.g1, &q.g2, &q.b}) {
      CHECK(g->width() == 2);
      CHECK(g->height() == 2);
    }
    CHECK(remux(q, phase) == z.samples);
    const BayerImage big = random_bayer(rng, 32, 18, 12, phase);
    CHECK(remux(demux(big), phase) == big.samples);
  }
}

TEST_CASE("phase flips normalize to RGGB") {
  std::mt19937 rng(9);
  for (auto phase : kPhases) {
    const BayerImage y = random_bayer(rng, 6, 4, 12, phase);
    const PhaseFlips f = flips_to_rggb(phase);
    const IntGrid flipped = apply_flips(y.samples, f);
    CHECK(apply_flips(flipped, f) == y.samples);
    // Every site of the flipped grid sits where RGGB expects its channel.
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 6; ++c) {
        const int sr = f.rows ? 3 - r : r, sc = f.cols ? 5 - c : c;
        CHECK(channel_at(CfaPhase::RGGB, r, c) == channel_at(phase, sr, sc));
      }
  }
}

TEST_CASE("to_bayer rounds and clamps") {
  RealGrid m(2, 2);
  m(0, 0) = -3.2;
  m(0, 1) = 10.5;
  m(1, 0) = 300.0;
  m(1, 1) = 254.4;
  const BayerImage y = to_bayer(m, CfaPhase::RGGB, 8);
  CHECK(y.samples(0, 0) == 0);
  CHECK(y.samples(0, 1) == 11);
  CHECK(y.samples(1, 0) == 255);
  CHECK(y.samples(1, 1) == 254);
}
