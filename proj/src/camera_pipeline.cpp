#include "camra/camera_pipeline.hpp"

#include <cmath>
#include <string>

namespace camra {

double Mat3::det() const {
  return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) + a[2] * (a[3] * a[7] - a[4] * a[6]);
}

Mat3 Mat3::inverse() const {
  const double d = det();
  if (d == 0 || !std::isfinite(d)) throw InvalidArgument("colour matrix is singular");
  Mat3 m;
  m.a = {(a[4] * a[8] - a[5] * a[7]) / d, (a[2] * a[7] - a[1] * a[8]) / d, (a[1] * a[5] - a[2] * a[4]) / d,
         (a[5] * a[6] - a[3] * a[8]) / d, (a[0] * a[8] - a[2] * a[6]) / d, (a[2] * a[3] - a[0] * a[5]) / d,
         (a[3] * a[7] - a[4] * a[6]) / d, (a[1] * a[6] - a[0] * a[7]) / d, (a[0] * a[4] - a[1] * a[3]) / d};
  return m;
}

std::array<double, 3> Mat3::apply(const std::array<double, 3>& x) const {
  return {a[0] * x[0] + a[1] * x[1] + a[2] * x[2], a[3] * x[0] + a[4] * x[1] + a[5] * x[2],
          a[6] * x[0] + a[7] * x[1] + a[8] * x[2]};
}

void PipelineParams::validate() const {
  const double d = color_matrix.det();
  if (!std::isfinite(d) || std::fabs(d) < 1e-12) throw InvalidArgument("colour matrix is not invertible");
  for (double i : illuminant)
    if (!(i > 0) || !std::isfinite(i)) throw InvalidArgument("illuminant components must be positive");
}

bool PipelineParams::is_identity() const {
  return color_matrix == Mat3{} && illuminant == std::array<double, 3>{1, 1, 1} && gamma == GammaCurve::Identity;
}

namespace {

template <class F>
ColorImage per_pixel(const ColorImage& x, F&& f) {
  ColorImage out(x.space, x.width(), x.height());
  for (std::size_t i = 0; i < x.planes[0].size(); ++i) {
    const auto v = f(std::array<double, 3>{x.planes[0].values()[i], x.planes[1].values()[i], x.planes[2].values()[i]});
    for (int k = 0; k < 3; ++k) out.planes[k].values()[i] = v[k];
  }
  return out;
}

void require_positive(const std::array<double, 3>& i) {
  for (double v : i)
    if (!(v > 0)) throw InvalidArgument("illuminant components must be positive");
}

}  // namespace

ColorImage color_correct(const ColorImage& x, const Mat3& a) {
  if (a.det() == 0) throw InvalidArgument("colour matrix is singular");
  return per_pixel(x, [&](const std::array<double, 3>& v) { return a.apply(v); });
}

ColorImage color_correct_inverse(const ColorImage& x, const Mat3& a) {
  const Mat3 inv = a.inverse();
  return per_pixel(x, [&](const std::array<double, 3>& v) { return inv.apply(v); });
}

ColorImage white_balance(const ColorImage& x, const std::array<double, 3>& i) {
  require_positive(i);
  return per_pixel(x, [&](const std::array<double, 3>& v) {
    return std::array<double, 3>{v[0] / i[0], v[1] / i[1], v[2] / i[2]};
  });
}

ColorImage white_balance_inverse(const ColorImage& x, const std::array<double, 3>& i) {
  require_positive(i);
  return per_pixel(x, [&](const std::array<double, 3>& v) {
    return std::array<double, 3>{v[0] * i[0], v[1] * i[1], v[2] * i[2]};
  });
}

double gamma_srgb_extended(double v) {
  using namespace srgb;
  return v <= kBreak ? kSlope * v : kScale * std::pow(v, kExponent) - kOffset;
}

double gamma_srgb_extended_inverse(double v) {
  using namespace srgb;
  // Matched breakpoint: the encoded value of kBreak on the linear branch.
  return v <= kSlope * kBreak ? v / kSlope : std::pow((v + kOffset) / kScale, 2.4);
}

Companded gamma_srgb_checked(double v) {
  const bool clamped = !(v >= 0 && v <= 1);
  const double c = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
  return {gamma_srgb_extended(c), clamped};
}

double gamma_srgb(double v) { return gamma_srgb_checked(v).value; }

double gamma_srgb_inverse(double v) { return gamma_srgb_extended_inverse(std::clamp(v, 0.0, 1.0)); }

ColorImage apply_gamma(const ColorImage& x, GammaCurve curve) {
  if (curve == GammaCurve::Identity) return x;
  ColorImage out = x;
  for (auto& p : out.planes)
    for (auto& v : p.values()) v = gamma_srgb(v);
  return out;
}

ModulationGains modulation_gains(Kernel kernel) {
  // 5/3: DC gain 1, Nyquist gain -2 per axis. 9/7 (as scaled here): DC gain
  // sqrt(2), Nyquist gain -sqrt(2) per axis.
  return kernel == Kernel::LeGall53 ? ModulationGains{1.0, -2.0, 4.0} : ModulationGains{2.0, -2.0, 2.0};
}

ColorImage quarter_rgb_from_bands(const DecorrelatedBands<double>& bands, std::optional<double> lossy_scale) {
  const bool matrix = std::holds_alternative<MatrixTransform>(bands.transform);
  if (matrix && !lossy_scale) throw InvalidArgument("quarter_rgb_from_bands: matrix transform needs lossy_scale");
  const double scale = lossy_scale.value_or(1.0);
  if (scale == 0) throw InvalidArgument("quarter_rgb_from_bands: lossy_scale must be non-zero");
  require_same_shape(bands.w_ll, bands.v_s, "quarter_rgb_from_bands");
  require_same_shape(bands.w_ll, bands.w_hh, "quarter_rgb_from_bands");
  const ModulationGains g = modulation_gains(bands.kernel);
  ColorImage out(ColorSpace::RGB, bands.w_ll.width(), bands.w_ll.height());
  for (std::size_t i = 0; i < bands.w_ll.size(); ++i) {
    const auto rgb = lab_to_rgb(std::array<double, 3>{bands.w_ll.values()[i] / g.ll,
                                                      bands.v_s.values()[i] / (g.alpha * scale),
                                                      bands.w_hh.values()[i] / g.beta});
    for (int k = 0; k < 3; ++k) out.planes[k].values()[i] = rgb[k];
  }
  return out;
}

QuarterBands bands_from_quarter_rgb(const ColorImage& rgb, Kernel kernel, double lossy_scale) {
  if (rgb.space != ColorSpace::RGB) throw InvalidArgument("bands_from_quarter_rgb expects an RGB image");
  const ModulationGains g = modulation_gains(kernel);
  QuarterBands out{RealGrid(rgb.width(), rgb.height()), RealGrid(rgb.width(), rgb.height()),
                   RealGrid(rgb.width(), rgb.height())};
  for (std::size_t i = 0; i < out.w_ll.size(); ++i) {
    const auto lab =
        rgb_to_lab(std::array<double, 3>{rgb.planes[0].values()[i], rgb.planes[1].values()[i], rgb.planes[2].values()[i]});
    out.w_ll.values()[i] = lab[0] * g.ll;
    out.v_s.values()[i] = lab[1] * g.alpha * lossy_scale;
    out.w_hh.values()[i] = lab[2] * g.beta;
  }
  return out;
}

SignSplit split_magnitude_sign(const ColorImage& x) {
  SignSplit s;
  s.magnitude = x;
  for (int k = 0; k < 3; ++k) {
    s.sign[k] = Grid<std::uint8_t>(x.width(), x.height());
    auto& mag = s.magnitude.planes[k].values();
    for (std::size_t i = 0; i < mag.size(); ++i)
      if (mag[i] < 0) {
        mag[i] = -mag[i];
        s.sign[k].values()[i] = 1;
      }
  }
  return s;
}

ColorImage recombine(const SignSplit& s) {
  ColorImage out = s.magnitude;
  for (int k = 0; k < 3; ++k) {
    require_same_shape(out.planes[k], s.sign[k], "recombine");
    auto& v = out.planes[k].values();
    for (std::size_t i = 0; i < v.size(); ++i)
      if (s.sign[k].values()[i]) v[i] = -v[i];
  }
  return out;
}

ColorImage demosaic_simple(const RealGrid& y, CfaPhase phase) {
  const int w = y.width(), h = y.height();
  if (w % 2 || h % 2 || w < 2 || h < 2) throw DimensionError("demosaic_simple: image sides must be even");
  auto mir = [](int i, int n) { return i < 0 ? -i : (i >= n ? 2 * (n - 1) - i : i); };
  // Bilinear kernels: R/B use the separable tent, G the 4-neighbour cross.
  static constexpr double kTent[3][3] = {{0.25, 0.5, 0.25}, {0.5, 1.0, 0.5}, {0.25, 0.5, 0.25}};
  static constexpr double kCross[3][3] = {{0, 0.25, 0}, {0.25, 1.0, 0.25}, {0, 0.25, 0}};
  ColorImage out(ColorSpace::RGB, w, h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const Channel here = channel_at(phase, r, c);
      for (int k = 0; k < 3; ++k) {
        if (static_cast<int>(here) == k) {
          out.planes[k](r, c) = y(r, c);
          continue;
        }
        const auto& kern = k == static_cast<int>(Channel::G) ? kCross : kTent;
        double acc = 0;
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            const int rr = mir(r + dr, h), cc = mir(c + dc, w);
            if (static_cast<int>(channel_at(phase, rr, cc)) == k) acc += kern[dr + 1][dc + 1] * y(rr, cc);
          }
        out.planes[k](r, c) = acc;
      }
    }
  return out;
}

ColorImage demosaic_simple(const BayerImage& y) { return demosaic_simple(y.samples.cast<double>(), y.phase); }

ColorImage render(const BayerImage& y, const PipelineParams& params) {
  params.validate();
  BayerImage shifted = y;
  shifted.black = params.black;
  const IntGrid lin = subtract_black_offset(shifted);
  RealGrid norm(lin.width(), lin.height());
  const double scale = 1.0 / y.max_value();
  for (std::size_t i = 0; i < lin.size(); ++i) norm.values()[i] = lin.values()[i] * scale;
  ColorImage x = demosaic_simple(norm, y.phase);
  x = color_correct(x, params.color_matrix);
  x = white_balance(x, params.illuminant);
  return apply_gamma(x, params.gamma);
}

}  // namespace camra
