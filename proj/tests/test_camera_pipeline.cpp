#include <doctest.h>

#include <cmath>
#include <random>

#include "camra/camera_pipeline.hpp"
#include "camra/error.hpp"

using namespace camra;

namespace {

ColorImage constant_image(int w, int h, double r, double g, double b) {
  ColorImage x(ColorSpace::RGB, w, h);
  x.planes = {RealGrid(w, h, r), RealGrid(w, h, g), RealGrid(w, h, b)};
  return x;
}

double max_diff(const ColorImage& a, const ColorImage& b) {
  double e = 0;
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < a.planes[c].size(); ++i)
      e = std::max(e, std::fabs(a.planes[c].values()[i] - b.planes[c].values()[i]));
  return e;
}

}  // namespace

TEST_CASE("colour correction and white balance examples") {
  const Mat3 a{{2, 0, 0, 0, 1, 0, 0, 0, 0.5}};
  const auto x = constant_image(2, 2, 1, 2, 4);
  const auto y = color_correct(x, a);
  CHECK(y.planes[0](0, 0) == 2);
  CHECK(y.planes[1](1, 1) == 2);
  CHECK(y.planes[2](0, 1) == 2);
  const auto w = white_balance(x, {2, 1, 4});
  CHECK(w.planes[0](0, 0) == 0.5);
  CHECK(w.planes[2](0, 0) == 1);

  const Mat3 mix{{1.8, -0.6, -0.2, -0.2, 1.6, -0.4, 0, -0.5, 1.5}};
  std::mt19937 rng(51);
  std::uniform_real_distribution<double> d(0, 1);
  ColorImage r(ColorSpace::RGB, 8, 8);
  for (auto& p : r.planes)
    for (auto& v : p.values()) v = d(rng);
  CHECK(max_diff(color_correct_inverse(color_correct(r, mix), mix), r) < 1e-12);
  CHECK(max_diff(white_balance_inverse(white_balance(r, {2, 1, 1.6}), {2, 1, 1.6}), r) < 1e-12);

  const auto i = mix.inverse();
  const auto p = mix.apply(i.apply({0.3, 0.5, 0.7}));
  CHECK(p[0] == doctest::Approx(0.3));
  CHECK(p[2] == doctest::Approx(0.7));
  CHECK_THROWS_AS((Mat3{{1, 2, 3, 2, 4, 6, 0, 0, 1}}.inverse()), InvalidArgument);
}

TEST_CASE("pipeline validation") {
  PipelineParams p;
  CHECK(p.is_identity() == false);  // sRGB gamma by default
  p.gamma = GammaCurve::Identity;
  CHECK(p.is_identity());
  CHECK_NOTHROW(p.validate());
  p.illuminant = {1, 0, 1};
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p.illuminant = {1, 1, 1};
  p.color_matrix = Mat3{{1, 1, 0, 1, 1, 0, 0, 0, 1}};
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("sRGB gamma values") {
  CHECK(gamma_srgb(0) == 0);
  CHECK(gamma_srgb(1) == doctest::Approx(1));
  CHECK(gamma_srgb(0.002) == doctest::Approx(0.02584));
  CHECK(gamma_srgb(0.5) == doctest::Approx(0.7354).epsilon(1e-4));
  CHECK(gamma_srgb_inverse(0.040452) == doctest::Approx(0.0031308).epsilon(1e-4));
  CHECK(gamma_srgb(0.0031308) == doctest::Approx(0.040452).epsilon(1e-4));
  const auto c = gamma_srgb_checked(1.5);
  CHECK(c.clamped);
  CHECK(c.value == doctest::Approx(1));
  CHECK(gamma_srgb_checked(-0.2).value == 0);
  CHECK_FALSE(gamma_srgb_checked(0.3).clamped);

  double prev = -1;
  for (int i = 0; i <= 10000; ++i) {
    const double v = i / 10000.0;
    const double g = gamma_srgb(v);
    REQUIRE(g > prev);
    prev = g;
    REQUIRE(gamma_srgb_inverse(g) == doctest::Approx(v).epsilon(1e-9));
  }
  for (double v : {0.0, 0.001, 0.5, 1.0, 1.7, 4.0}) CHECK(gamma_srgb_extended_inverse(gamma_srgb_extended(v)) == doctest::Approx(v).epsilon(1e-9));
  CHECK(gamma_srgb_extended(2.0) > 1.0);
  CHECK(gamma_srgb_extended(0.5) == gamma_srgb(0.5));
}

TEST_CASE("modulation gains") {
  const auto g53 = modulation_gains(Kernel::LeGall53);
  CHECK(g53.ll == 1);
  CHECK(g53.alpha == -2);
  CHECK(g53.beta == 4);
  const auto g97 = modulation_gains(Kernel::Daub97);
  CHECK(g97.ll == doctest::Approx(2));
  CHECK(g97.alpha == doctest::Approx(-2));
  CHECK(g97.beta == doctest::Approx(2));
}

TEST_CASE("quarter-resolution RGB from a flat colour mosaic") {
  // r = 800, g = 400, b = 200 on an RGGB mosaic.
  IntGrid cfa(16, 16);
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 16; ++c) {
      const auto ch = channel_at(CfaPhase::RGGB, r, c);
      cfa(r, c) = ch == Channel::R ? 800 : (ch == Channel::G ? 400 : 200);
    }
  for (Kernel k : {Kernel::LeGall53, Kernel::Daub97}) {
    DecorrelatedBands<double> bands;
    bands.kernel = k;
    std::optional<double> scale;
    if (k == Kernel::LeGall53) {
      const auto sb = dwt53_forward(cfa);
      const auto v = sumdiff_forward(sb.lh, sb.hl);
      bands.w_ll = sb.ll.cast<double>();
      bands.v_s = v.v_s.cast<double>();
      bands.v_d = v.v_d.cast<double>();
      bands.w_hh = sb.hh.cast<double>();
    } else {
      const Mat2 m{0.6, 0.55, 1.0, -1.0};
      const auto sb = dwt97_forward(cfa.cast<double>());
      const auto v = matrix_forward(sb.lh, sb.hl, m);
      bands.w_ll = sb.ll;
      bands.v_s = v.v_s;
      bands.v_d = v.v_d;
      bands.w_hh = sb.hh;
      bands.transform = MatrixTransform{m};
      scale = m.a00 + m.a01;
      CHECK_THROWS_AS(quarter_rgb_from_bands(bands), InvalidArgument);
    }
    const auto rgb = quarter_rgb_from_bands(bands, scale);
    // The 9/7 gains are exact only up to the precision of the lifting constants.
    const double tol = k == Kernel::LeGall53 ? 1e-12 : 1e-7;
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) {
        REQUIRE(rgb.planes[0](r, c) == doctest::Approx(800).epsilon(tol));
        REQUIRE(rgb.planes[1](r, c) == doctest::Approx(400).epsilon(tol));
        REQUIRE(rgb.planes[2](r, c) == doctest::Approx(200).epsilon(tol));
      }
    const auto back = bands_from_quarter_rgb(rgb, k, scale.value_or(1.0));
    for (std::size_t i = 0; i < back.w_ll.size(); ++i) {
      REQUIRE(back.w_ll.values()[i] == doctest::Approx(bands.w_ll.values()[i]));
      REQUIRE(back.v_s.values()[i] == doctest::Approx(bands.v_s.values()[i]));
      REQUIRE(back.w_hh.values()[i] == doctest::Approx(bands.w_hh.values()[i]));
    }
  }
}

TEST_CASE("magnitude and sign split") {
  auto x = constant_image(3, 2, 1, -2, 0);
  x.planes[0](1, 2) = -0.5;
  const auto s = split_magnitude_sign(x);
  CHECK(s.magnitude.planes[1](0, 0) == 2);
  CHECK(s.sign[1](0, 0) == 1);
  CHECK(s.sign[0](0, 0) == 0);
  CHECK(s.sign[0](1, 2) == 1);
  CHECK(s.sign[2](0, 0) == 0);
  CHECK(max_diff(recombine(s), x) == 0);
}

TEST_CASE("bilinear demosaic") {
  for (int phase = 0; phase < 4; ++phase) {
    const auto p = static_cast<CfaPhase>(phase);
    RealGrid flat(8, 8);
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) {
        const auto ch = channel_at(p, r, c);
        flat(r, c) = ch == Channel::R ? 10 : (ch == Channel::G ? 20 : 30);
      }
    const auto out = demosaic_simple(flat, p);
    CHECK(max_diff(out, constant_image(8, 8, 10, 20, 30)) < 1e-12);
  }
  // A horizontal ramp stays a ramp in the interior.
  RealGrid ramp(8, 8);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) ramp(r, c) = 4.0 * c;
  const auto out = demosaic_simple(ramp, CfaPhase::RGGB);
  for (int r = 1; r < 7; ++r)
    for (int c = 1; c < 7; ++c)
      for (int ch = 0; ch < 3; ++ch) REQUIRE(out.planes[ch](r, c) == doctest::Approx(4.0 * c));
}

TEST_CASE("identity pipeline equals normalized demosaic") {
  std::mt19937 rng(52);
  BayerImage y;
  y.phase = CfaPhase::GBRG;
  y.bit_depth = 12;
  y.samples = IntGrid(16, 12);
  for (auto& v : y.samples.values()) v = static_cast<std::int32_t>(rng() % 4096);
  PipelineParams p;
  p.gamma = GammaCurve::Identity;
  const auto out = render(y, p);
  RealGrid norm(16, 12);
  for (std::size_t i = 0; i < norm.size(); ++i) norm.values()[i] = y.samples.values()[i] / 4095.0;
  CHECK(max_diff(out, demosaic_simple(norm, y.phase)) < 1e-12);

  p.black = {100, 100, 100};
  const auto shifted = render(y, p);
  for (std::size_t i = 0; i < norm.size(); ++i) norm.values()[i] = (y.samples.values()[i] - 100) / 4095.0;
  CHECK(max_diff(shifted, demosaic_simple(norm, y.phase)) < 1e-12);
}
