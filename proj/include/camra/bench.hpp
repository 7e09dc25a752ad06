#pragma once

// Synthetic corpus, comparison schemes and rate-distortion reporting.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "camra/camera_pipeline.hpp"
#include "camra/cfa_model.hpp"
#include "camra/codec.hpp"
#include "camra/decorrelate.hpp"

namespace camra {

struct CorpusImage {
  ColorImage truth;  // linear RGB in [0, 1] before black offset and noise
  BayerImage mosaic;
};

inline constexpr int kCorpusBitDepth = 12;

/// Calibration of the synthetic camera: colour matrix, illuminant and sRGB
/// gamma that render its raw data neutral.
const PipelineParams& bench_camera();

/// Seeded scenes: smooth illumination, luminance edges and textures, a
/// lowpass colour field, sensor noise. Scenes are drawn in the rendered
/// linear space of bench_camera() and mapped back to raw. Phases cycle
/// through RGGB, GRBG, GBRG, BGGR.
std::vector<CorpusImage> generate_corpus(std::uint64_t seed, int count, int size);
CorpusImage generate_image(std::uint64_t seed, int index, int size);

// Lossless comparison schemes. All are exact and share the entropy coder.
CompressedStream baseline_cfa_gray(const BayerImage& y, const CodecConfig& cfg = {});
CompressedStream baseline_demux(const BayerImage& y, const CodecConfig& cfg = {});
CompressedStream baseline_mallat(const BayerImage& y, const CodecConfig& cfg = {});
/// Demosaiced integer RGB, reversible colour transform, N-level 5/3 per plane.
CompressedStream baseline_rgb(const BayerImage& y, const CodecConfig& cfg = {});

/// Decodes modes 16..18.
BayerImage decode_baseline(const CompressedStream& s);
/// Decodes mode 19 to the demosaiced planes it coded.
std::array<IntGrid, 3> decode_baseline_rgb(const CompressedStream& s);
/// The integer RGB planes baseline_rgb codes.
std::array<IntGrid, 3> demosaic_integer(const BayerImage& y);

inline constexpr double kPsnrInfinity = std::numeric_limits<double>::infinity();

double psnr(const IntGrid& a, const IntGrid& b, double peak);
double psnr(const RealGrid& a, const RealGrid& b, double peak);
/// Mean squared error pooled over the three planes.
double psnr(const ColorImage& a, const ColorImage& b, double peak);

struct RdPoint {
  double step = 0;
  double bpp = 0;
  double psnr_cfa = 0;      // against the original mosaic, peak 2^depth - 1
  double psnr_display = 0;  // rendered images, peak 1
  double sign_bpp = 0;
};

struct SweepConfig {
  Mode mode = Mode::LossyA;
  std::vector<double> steps{1, 2, 4, 8, 16, 32};
  PipelineParams display;  // CAMRA target and display-domain evaluation
  std::optional<Mat2> m;   // empty: select_m once per image
  CodecConfig codec;
  double chroma_mult = 1.0;
};

/// Steps must be ascending.
std::vector<RdPoint> rd_sweep(const BayerImage& y, const SweepConfig& cfg);

/// Lossy encode and decode through the given mode (1..3).
BayerImage lossy_round_trip(const BayerImage& y, Mode mode, const QuantizationSpec& q, const PipelineParams& p,
                            std::optional<Mat2> m, const CodecConfig& cfg, double* bpp = nullptr,
                            double* sign_bpp = nullptr);

/// Level-1 decorrelation statistics. 5/3 uses the integer sum/difference,
/// 9/7 the optimized matrix.
DecorrelationStats analyze(const BayerImage& y, Kernel kernel, const CodecConfig& cfg = {});

struct ReportRow {
  std::string image_id;
  std::string scheme;
  std::string mode;
  double step = std::numeric_limits<double>::quiet_NaN();
  double bpp = std::numeric_limits<double>::quiet_NaN();
  double psnr_cfa_db = std::numeric_limits<double>::quiet_NaN();
  double psnr_display_db = std::numeric_limits<double>::quiet_NaN();
  double pearson_before = std::numeric_limits<double>::quiet_NaN();
  double pearson_after = std::numeric_limits<double>::quiet_NaN();
  double entropy_before = std::numeric_limits<double>::quiet_NaN();
  double entropy_after = std::numeric_limits<double>::quiet_NaN();
};

struct BenchConfig {
  bool lossless = true;
  std::vector<Mode> lossy_modes{Mode::LossyA, Mode::LossyB, Mode::Camra};
  std::vector<double> steps{1, 2, 4, 8, 16, 32};
  PipelineParams display;
  CodecConfig codec;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Per-image rows followed by corpus means (image_id "mean").
std::vector<ReportRow> run_bench(const std::vector<BayerImage>& images, const std::vector<std::string>& ids,
                                 const BenchConfig& cfg);

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows);

/// Runs job(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& job, unsigned threads = 0);

/// Capped at 999 dB so lossless points can be averaged.
double finite_psnr(double db);

}  // namespace camra
