#pragma once

// Minimal camera processing chain (black offset, demosaic, colour correction,
// white balance, sRGB gamma) and the mapping between level-1 CFA subbands
// and a quarter-resolution colour image.

#include <array>
#include <cstdint>
#include <optional>

#include "camra/cfa_model.hpp"
#include "camra/decorrelate.hpp"
#include "camra/wavelet.hpp"

namespace camra {

/// Row-major 3x3 real matrix.
struct Mat3 {
  std::array<double, 9> a{1, 0, 0, 0, 1, 0, 0, 0, 1};

  double operator()(int r, int c) const { return a[r * 3 + c]; }
  double det() const;
  Mat3 inverse() const;  // throws InvalidArgument when singular
  std::array<double, 3> apply(const std::array<double, 3>& x) const;
  friend bool operator==(const Mat3&, const Mat3&) = default;
};

enum class GammaCurve : std::uint8_t { Identity = 0, SRGB = 1 };

struct PipelineParams {
  Mat3 color_matrix;
  std::array<double, 3> illuminant{1, 1, 1};
  BlackOffset black;
  GammaCurve gamma = GammaCurve::SRGB;

  /// A must be invertible and every illuminant component positive.
  void validate() const;
  bool is_identity() const;
};

ColorImage color_correct(const ColorImage& x, const Mat3& a);
ColorImage color_correct_inverse(const ColorImage& x, const Mat3& a);
ColorImage white_balance(const ColorImage& x, const std::array<double, 3>& illuminant);
ColorImage white_balance_inverse(const ColorImage& x, const std::array<double, 3>& illuminant);

namespace srgb {
inline constexpr double kBreak = 0.0031308;
inline constexpr double kSlope = 12.92;
inline constexpr double kScale = 1.055;
inline constexpr double kOffset = 0.055;
inline constexpr double kExponent = 1.0 / 2.4;
}  // namespace srgb

struct Companded {
  double value;
  bool clamped;  // input was outside [0, 1]
};

/// sRGB compander on [0, 1]; inputs outside the interval are clamped.
Companded gamma_srgb_checked(double v);
double gamma_srgb(double v);
double gamma_srgb_inverse(double v);

/// The same curve continued past 1 without clamping, for non-negative inputs.
double gamma_srgb_extended(double v);
double gamma_srgb_extended_inverse(double v);

/// Applies a curve to every sample of every plane, clamping for SRGB.
ColorImage apply_gamma(const ColorImage& x, GammaCurve curve);

/// Response of a level-1 transform to the CFA modulation patterns: a constant
/// l lands in LL scaled by `ll`, the alpha carrier in LH and HL scaled by
/// `alpha`, the beta carrier in HH scaled by `beta`.
struct ModulationGains {
  double ll;
  double alpha;
  double beta;
};
ModulationGains modulation_gains(Kernel kernel);

/// Interprets (w_LL, v_s, w_HH) as quarter-resolution (l, alpha, beta) and
/// converts to RGB. `lossy_scale` is the row sum M00 + M01 (2ka) of the
/// decorrelation matrix and is required for matrix transforms.
ColorImage quarter_rgb_from_bands(const DecorrelatedBands<double>& bands, std::optional<double> lossy_scale = {});

struct QuarterBands {
  RealGrid w_ll, v_s, w_hh;
};
/// Exact inverse of quarter_rgb_from_bands.
QuarterBands bands_from_quarter_rgb(const ColorImage& rgb, Kernel kernel, double lossy_scale = 1.0);

struct SignSplit {
  ColorImage magnitude;
  std::array<Grid<std::uint8_t>, 3> sign;  // 1 where the sample was negative
};
SignSplit split_magnitude_sign(const ColorImage& x);
ColorImage recombine(const SignSplit& s);

/// Bilinear interpolation of each channel with mirrored borders.
ColorImage demosaic_simple(const RealGrid& mosaic, CfaPhase phase);
ColorImage demosaic_simple(const BayerImage& y);

/// Full forward pipeline on normalized data: (y - k) / (2^depth - 1), then
/// demosaic, colour correction, white balance and gamma. Black offsets come
/// from `params.black`.
ColorImage render(const BayerImage& y, const PipelineParams& params);

}  // namespace camra
