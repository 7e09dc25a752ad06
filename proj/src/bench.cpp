#include "camra/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>

#include "camra/entropy_coding.hpp"
#include "camra/error.hpp"
#include "camra/wavelet.hpp"

namespace camra {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Sum of sinusoids normalized to [-1, 1] with every frequency below fmax
// cycles per pixel.
struct LowpassField {
  struct Wave {
    double fx, fy, phase, amp;
  };
  std::vector<Wave> waves;
  double norm = 1;

  LowpassField(std::mt19937_64& rng, int n, double fmax) {
    std::uniform_real_distribution<double> ang(0, kTwoPi), rad(0.15, 1.0), amp(0.3, 1.0);
    double total = 0;
    for (int i = 0; i < n; ++i) {
      const double t = ang(rng), f = rad(rng) * fmax;
      waves.push_back({f * std::cos(t), f * std::sin(t), ang(rng), amp(rng)});
      total += waves.back().amp;
    }
    norm = total;
  }

  double operator()(double r, double c) const {
    double v = 0;
    for (const auto& w : waves) v += w.amp * std::sin(kTwoPi * (w.fx * c + w.fy * r) + w.phase);
    return v / norm;
  }
};

enum class ShapeKind { Disk, Rect, HalfPlane, Stripe };

struct Shape {
  ShapeKind kind;
  double cx, cy, a, b, theta;
  double albedo;
  double tex_amp, tex_fx, tex_fy, tex_phase;

  bool contains(double r, double c) const {
    const double dx = c - cx, dy = r - cy;
    const double u = dx * std::cos(theta) + dy * std::sin(theta);
    const double v = -dx * std::sin(theta) + dy * std::cos(theta);
    switch (kind) {
      case ShapeKind::Disk: return (u * u) / (a * a) + (v * v) / (b * b) <= 1.0;
      case ShapeKind::Rect: return std::fabs(u) <= a && std::fabs(v) <= b;
      case ShapeKind::HalfPlane: return u >= 0;
      case ShapeKind::Stripe: return std::fabs(u) <= a;
    }
    return false;
  }
};

}  // namespace

CorpusImage generate_image(std::uint64_t seed, int index, int size) {
  if (size <= 0 || size % 2) throw DimensionError("corpus images need an even positive size");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  const double s = size;

  // Illumination: gradient plus broad blobs through a soft limiter.
  const double i0 = uni(-0.6, 0.9), gx = uni(-1.5, 1.5), gy = uni(-1.5, 1.5);
  struct Blob {
    double cx, cy, sigma, amp;
  };
  std::vector<Blob> blobs;
  for (int k = 0; k < 4; ++k) blobs.push_back({uni(0, s), uni(0, s), uni(0.12, 0.4) * s, uni(-1.8, 1.8)});

  // Reflectance: painter's-order shapes with optional gratings.
  const int n_shapes = static_cast<int>(uni(10, 24));
  std::vector<Shape> shapes;
  for (int k = 0; k < n_shapes; ++k) {
    Shape sh{};
    sh.kind = static_cast<ShapeKind>(static_cast<int>(uni(0, 4)));
    sh.cx = uni(0, s);
    sh.cy = uni(0, s);
    sh.a = uni(0.03, 0.25) * s;
    sh.b = uni(0.03, 0.25) * s;
    if (sh.kind == ShapeKind::Stripe) sh.a = uni(0.01, 0.05) * s;
    sh.theta = uni(0, std::numbers::pi);
    sh.albedo = uni(0.55, 1.0);
    if (uni(0, 1) < 0.3) {
      const double f = uni(0.02, 0.3), t = uni(0, kTwoPi);
      sh.tex_amp = uni(0.01, 0.05);
      sh.tex_fx = f * std::cos(t);
      sh.tex_fy = f * std::sin(t);
      sh.tex_phase = uni(0, kTwoPi);
    }
    shapes.push_back(sh);
  }

  // Scene colour in the camera's rendered linear space: neutral luminance
  // plus a slowly varying colour field, mapped to raw through the inverse of
  // colour correction and white balance.
  const LowpassField fr(rng, 4, 1.0 / 16), fg(rng, 4, 1.0 / 16), fb(rng, 4, 1.0 / 16);
  const std::array<double, 3> cast{uni(-0.08, 0.08), uni(-0.08, 0.08), uni(-0.08, 0.08)};
  const double saturation = uni(0.3, 0.6);
  const double exposure = uni(0.75, 0.95);
  const PipelineParams& cam = bench_camera();
  const Mat3 a_inv = cam.color_matrix.inverse();
  Mat3 to_raw;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) to_raw.a[r * 3 + c] = a_inv(r, c) * cam.illuminant[c];
  const auto white = to_raw.apply({1, 1, 1});
  const double raw_scale = 1.0 / std::max({white[0], white[1], white[2]});

  const BlackOffset black{static_cast<int>(uni(64, 256)), static_cast<int>(uni(64, 256)), static_cast<int>(uni(64, 256))};
  const auto phase = static_cast<CfaPhase>(index % 4);
  const double peak = (1 << kCorpusBitDepth) - 1;
  const double range = peak - 256;

  CorpusImage out;
  out.truth = ColorImage(ColorSpace::RGB, size, size);
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      double z = i0 + gx * (c / s - 0.5) + gy * (r / s - 0.5);
      for (const auto& b : blobs) {
        const double d2 = (c - b.cx) * (c - b.cx) + (r - b.cy) * (r - b.cy);
        z += b.amp * std::exp(-d2 / (2 * b.sigma * b.sigma));
      }
      const double illum = 0.06 + 0.94 * sigmoid(2.0 * z);

      double albedo = 0.8;
      for (const auto& sh : shapes) {
        if (!sh.contains(r, c)) continue;
        albedo = sh.albedo;
        if (sh.tex_amp > 0)
          albedo *= 1.0 + sh.tex_amp * std::sin(kTwoPi * (sh.tex_fx * c + sh.tex_fy * r) + sh.tex_phase);
      }

      const double l = illum * albedo * exposure;
      const double l_smooth = illum * 0.8 * exposure;
      const std::array<double, 3> field{fr(r, c), fg(r, c), fb(r, c)};
      std::array<double, 3> scene;
      for (int k = 0; k < 3; ++k) scene[k] = std::max(0.0, l + l_smooth * (cast[k] + saturation * field[k]));
      const auto raw = to_raw.apply(scene);
      for (int k = 0; k < 3; ++k) out.truth.planes[k](r, c) = std::clamp(raw[k] * raw_scale, 0.0, 1.0);
    }
  }

  RealGrid m = mosaic(out.truth, phase);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      const double signal = m(r, c) * range;
      const double sigma = std::sqrt(1.0 + signal / 400.0);
      m(r, c) = black.of(channel_at(phase, r, c)) + signal + sigma * noise(rng);
    }
  }
  out.mosaic = to_bayer(m, phase, kCorpusBitDepth, black);
  return out;
}

const PipelineParams& bench_camera() {
  static const PipelineParams p = [] {
    PipelineParams q;
    q.color_matrix.a = {1.8, -0.6, -0.2, -0.2, 1.6, -0.4, 0.0, -0.5, 1.5};
    q.illuminant = {2.0, 1.0, 1.6};
    q.gamma = GammaCurve::SRGB;
    return q;
  }();
  return p;
}

std::vector<CorpusImage> generate_corpus(std::uint64_t seed, int count, int size) {
  if (size <= 0 || size % 2) throw DimensionError("corpus images need an even positive size");
  std::vector<CorpusImage> out(static_cast<std::size_t>(std::max(count, 0)));
  parallel_for(out.size(), [&](std::size_t i) { out[i] = generate_image(seed, static_cast<int>(i), size); });
  return out;
}

// ---------------------------------------------------------------------------

namespace {

StreamHeader baseline_header(const BayerImage& y, Mode mode, int levels) {
  StreamHeader h = base_header(y, mode);
  h.levels = static_cast<std::uint8_t>(levels);
  h.levels_vd = static_cast<std::uint8_t>(levels);
  return h;
}

int quarter_levels(const BayerImage& y, const CodecConfig& cfg) {
  return max_levels(y.width() / 2, y.height() / 2, std::clamp(cfg.levels, 0, kMaxLevels));
}

IntGrid polyphase(const IntGrid& x, int r0, int c0) {
  IntGrid out(x.width() / 2, x.height() / 2);
  for (int r = 0; r < out.height(); ++r)
    for (int c = 0; c < out.width(); ++c) out(r, c) = x(2 * r + r0, 2 * c + c0);
  return out;
}

constexpr std::array<Branch, 4> kBranches{Branch::LL, Branch::VS, Branch::VD, Branch::HH};

}  // namespace

CompressedStream baseline_cfa_gray(const BayerImage& y, const CodecConfig& cfg) {
  const int n = max_levels(y.width(), y.height(), std::clamp(cfg.levels + 1, 0, kMaxLevels));
  CompressedStream s;
  s.header = baseline_header(y, Mode::BaselineCfaGray, n);
  encode_tree(packet_decompose(prepare_mosaic(y), n), Branch::LL, s.segments);
  return s;
}

CompressedStream baseline_demux(const BayerImage& y, const CodecConfig& cfg) {
  const int n = quarter_levels(y, cfg);
  CompressedStream s;
  s.header = baseline_header(y, Mode::BaselineDemux, n);
  const IntGrid x = prepare_mosaic(y);
  for (int k = 0; k < 4; ++k) encode_tree(packet_decompose(polyphase(x, k / 2, k % 2), n), kBranches[k], s.segments);
  return s;
}

CompressedStream baseline_mallat(const BayerImage& y, const CodecConfig& cfg) {
  const int n = quarter_levels(y, cfg);
  CompressedStream s;
  s.header = baseline_header(y, Mode::BaselineMallat, n);
  const IntSubbands b = dwt53_forward(prepare_mosaic(y));
  encode_tree(packet_decompose(b.ll, n), Branch::LL, s.segments);
  encode_tree(packet_decompose(b.lh, n), Branch::VS, s.segments);
  encode_tree(packet_decompose(b.hl, n), Branch::VD, s.segments);
  encode_tree(packet_decompose(b.hh, n), Branch::HH, s.segments);
  return s;
}

std::array<IntGrid, 3> demosaic_integer(const BayerImage& y) {
  const ColorImage rgb = demosaic_simple(prepare_mosaic(y).cast<double>(), CfaPhase::RGGB);
  std::array<IntGrid, 3> out;
  for (int k = 0; k < 3; ++k) {
    out[k] = IntGrid(y.width(), y.height());
    for (std::size_t i = 0; i < out[k].size(); ++i)
      out[k].values()[i] = static_cast<std::int32_t>(std::round(rgb.planes[k].values()[i]));
  }
  return out;
}

CompressedStream baseline_rgb(const BayerImage& y, const CodecConfig& cfg) {
  const int n = max_levels(y.width(), y.height(), std::clamp(cfg.levels, 0, kMaxLevels));
  CompressedStream s;
  s.header = baseline_header(y, Mode::BaselineRgb, n);
  const auto rgb = demosaic_integer(y);
  IntGrid lum(y.width(), y.height()), cb(y.width(), y.height()), cr(y.width(), y.height());
  for (std::size_t i = 0; i < lum.size(); ++i) {
    const std::int32_t r = rgb[0].values()[i], g = rgb[1].values()[i], b = rgb[2].values()[i];
    lum.values()[i] = (r + 2 * g + b) >> 2;
    cb.values()[i] = b - g;
    cr.values()[i] = r - g;
  }
  encode_tree(packet_decompose(lum, n), Branch::LL, s.segments);
  encode_tree(packet_decompose(cb, n), Branch::VS, s.segments);
  encode_tree(packet_decompose(cr, n), Branch::HH, s.segments);
  return s;
}

BayerImage decode_baseline(const CompressedStream& s) {
  const auto& h = s.header;
  const int w = static_cast<int>(h.width), ht = static_cast<int>(h.height);
  std::size_t next = 0;
  IntGrid x;
  switch (h.mode) {
    case Mode::BaselineCfaGray:
      x = packet_reconstruct(decode_tree(s, next, Branch::LL, w, ht, h.levels));
      break;
    case Mode::BaselineDemux: {
      x = IntGrid(w, ht);
      for (int k = 0; k < 4; ++k) {
        const IntGrid p = packet_reconstruct(decode_tree(s, next, kBranches[k], w / 2, ht / 2, h.levels));
        for (int r = 0; r < p.height(); ++r)
          for (int c = 0; c < p.width(); ++c) x(2 * r + k / 2, 2 * c + k % 2) = p(r, c);
      }
      break;
    }
    case Mode::BaselineMallat: {
      IntSubbands b;
      b.ll = packet_reconstruct(decode_tree(s, next, Branch::LL, w / 2, ht / 2, h.levels));
      b.lh = packet_reconstruct(decode_tree(s, next, Branch::VS, w / 2, ht / 2, h.levels));
      b.hl = packet_reconstruct(decode_tree(s, next, Branch::VD, w / 2, ht / 2, h.levels));
      b.hh = packet_reconstruct(decode_tree(s, next, Branch::HH, w / 2, ht / 2, h.levels));
      x = dwt53_inverse(b);
      break;
    }
    default:
      throw FormatError("not a mosaic baseline stream", 5);
  }
  if (next != s.segments.size()) throw FormatError("unexpected extra segments", s.segments[next].stream_offset);
  return finish_mosaic(x, h);
}

std::array<IntGrid, 3> decode_baseline_rgb(const CompressedStream& s) {
  const auto& h = s.header;
  if (h.mode != Mode::BaselineRgb) throw FormatError("not an RGB baseline stream", 5);
  const int w = static_cast<int>(h.width), ht = static_cast<int>(h.height);
  std::size_t next = 0;
  const IntGrid lum = packet_reconstruct(decode_tree(s, next, Branch::LL, w, ht, h.levels));
  const IntGrid cb = packet_reconstruct(decode_tree(s, next, Branch::VS, w, ht, h.levels));
  const IntGrid cr = packet_reconstruct(decode_tree(s, next, Branch::HH, w, ht, h.levels));
  std::array<IntGrid, 3> rgb{IntGrid(w, ht), IntGrid(w, ht), IntGrid(w, ht)};
  for (std::size_t i = 0; i < lum.size(); ++i) {
    const std::int32_t g = lum.values()[i] - ((cb.values()[i] + cr.values()[i]) >> 2);
    rgb[0].values()[i] = cr.values()[i] + g;
    rgb[1].values()[i] = g;
    rgb[2].values()[i] = cb.values()[i] + g;
  }
  return rgb;
}

// ---------------------------------------------------------------------------

namespace {

double psnr_from_mse(double sse, std::size_t n, double peak) {
  if (peak <= 0) throw InvalidArgument("PSNR peak must be positive");
  if (sse == 0) return kPsnrInfinity;
  return 10.0 * std::log10(peak * peak / (sse / static_cast<double>(n)));
}

template <class T>
double grid_sse(const Grid<T>& a, const Grid<T>& b) {
  require_same_shape(a, b, "psnr");
  double sse = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a.values()[i]) - static_cast<double>(b.values()[i]);
    sse += d * d;
  }
  return sse;
}

}  // namespace

double psnr(const IntGrid& a, const IntGrid& b, double peak) { return psnr_from_mse(grid_sse(a, b), a.size(), peak); }

double psnr(const RealGrid& a, const RealGrid& b, double peak) { return psnr_from_mse(grid_sse(a, b), a.size(), peak); }

double psnr(const ColorImage& a, const ColorImage& b, double peak) {
  double sse = 0;
  for (int k = 0; k < 3; ++k) sse += grid_sse(a.planes[k], b.planes[k]);
  return psnr_from_mse(sse, 3 * a.planes[0].size(), peak);
}

double finite_psnr(double db) { return std::min(db, 999.0); }

BayerImage lossy_round_trip(const BayerImage& y, Mode mode, const QuantizationSpec& q, const PipelineParams& p,
                            std::optional<Mat2> m, const CodecConfig& cfg, double* bpp, double* sign_bpp) {
  CompressedStream s;
  switch (mode) {
    case Mode::LossyA: s = encode_lossy_a(y, q, m, cfg); break;
    case Mode::LossyB: s = encode_lossy_b(y, q, m, cfg); break;
    case Mode::Camra: s = encode_camra(y, q, p, m, cfg); break;
    default: throw InvalidArgument("lossy_round_trip needs a lossy mode");
  }
  if (bpp) *bpp = s.bpp();
  if (sign_bpp) *sign_bpp = s.sign_plane_bpp();
  return decode(CompressedStream::parse(s.serialize()));
}

std::vector<RdPoint> rd_sweep(const BayerImage& y, const SweepConfig& cfg) {
  if (!std::is_sorted(cfg.steps.begin(), cfg.steps.end())) throw InvalidArgument("steps must be ascending");
  const Mat2 m = cfg.m ? *cfg.m : select_m(y, cfg.codec);
  PipelineParams view = cfg.display;
  view.black = y.black;
  const ColorImage reference = render(y, view);
  const double peak = y.max_value();
  std::vector<RdPoint> out;
  for (double step : cfg.steps) {
    RdPoint pt;
    pt.step = step;
    const BayerImage rec = lossy_round_trip(y, cfg.mode, QuantizationSpec::uniform(step, cfg.chroma_mult),
                                            cfg.display, m, cfg.codec, &pt.bpp, &pt.sign_bpp);
    pt.psnr_cfa = psnr(y.samples, rec.samples, peak);
    pt.psnr_display = psnr(reference, render(rec, view), 1.0);
    out.push_back(pt);
  }
  return out;
}

DecorrelationStats analyze(const BayerImage& y, Kernel kernel, const CodecConfig& cfg) {
  if (kernel == Kernel::LeGall53) {
    const IntSubbands b = dwt53_forward(prepare_mosaic(y));
    const auto v = sumdiff_forward(b.lh, b.hl);
    return measure_decorrelation(b.lh.cast<double>(), b.hl.cast<double>(), v.v_s.cast<double>(),
                                 v.v_d.cast<double>());
  }
  const RealSubbands b = dwt97_forward(prepare_mosaic(y).cast<double>());
  const Mat2 m = quantize_fixed_16_16(normalize_scale(optimize_m(sample_pairs(b.lh, b.hl, cfg.max_pairs), cfg.optimizer).m));
  const auto v = matrix_forward(b.lh, b.hl, m);
  return measure_decorrelation(b.lh, b.hl, v.v_s, v.v_d);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& job, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::vector<ReportRow> run_bench(const std::vector<BayerImage>& images, const std::vector<std::string>& ids,
                                 const BenchConfig& cfg) {
  if (ids.size() != images.size()) throw InvalidArgument("one id per image is required");
  std::vector<std::vector<ReportRow>> per(images.size());
  parallel_for(
      images.size(),
      [&](std::size_t i) {
        const BayerImage& y = images[i];
        auto& rows = per[i];
        if (cfg.lossless) {
          const DecorrelationStats st = analyze(y, Kernel::LeGall53, cfg.codec);
          auto add = [&](const std::string& scheme, const CompressedStream& s) {
            ReportRow row;
            row.image_id = ids[i];
            row.scheme = scheme;
            row.mode = std::string(to_string(s.header.mode));
            row.bpp = s.bpp();
            if (scheme == "proposed") {
              row.pearson_before = st.pearson_before;
              row.pearson_after = st.pearson_after;
              row.entropy_before = st.entropy_before;
              row.entropy_after = st.entropy_after;
            }
            rows.push_back(row);
          };
          add("proposed", encode_lossless(y, cfg.codec));
          add("mallat", baseline_mallat(y, cfg.codec));
          add("demux", baseline_demux(y, cfg.codec));
          add("cfa-gray", baseline_cfa_gray(y, cfg.codec));
          add("rgb", baseline_rgb(y, cfg.codec));
        }
        if (cfg.lossy_modes.empty()) return;
        const Mat2 m = select_m(y, cfg.codec);
        for (Mode mode : cfg.lossy_modes) {
          SweepConfig sc;
          sc.mode = mode;
          sc.steps = cfg.steps;
          sc.display = cfg.display;
          sc.m = m;
          sc.codec = cfg.codec;
          for (const RdPoint& pt : rd_sweep(y, sc)) {
            ReportRow row;
            row.image_id = ids[i];
            row.scheme = "proposed";
            row.mode = std::string(to_string(mode));
            row.step = pt.step;
            row.bpp = pt.bpp;
            row.psnr_cfa_db = pt.psnr_cfa;
            row.psnr_display_db = pt.psnr_display;
            rows.push_back(row);
          }
        }
      },
      cfg.threads);

  std::vector<ReportRow> out;
  // Corpus means keyed by (scheme, mode, step) in first-seen order.
  std::vector<ReportRow> means;
  std::vector<int> counts;
  auto key_of = [](const ReportRow& r) { return r.scheme + "|" + r.mode + "|" + std::to_string(r.step); };
  std::map<std::string, std::size_t> index;
  auto accumulate = [](double& acc, double v, bool first) {
    if (std::isnan(v)) return;
    acc = (first || std::isnan(acc)) ? v : acc + v;
  };
  for (const auto& rows : per) {
    for (const ReportRow& r : rows) {
      out.push_back(r);
      const std::string key = key_of(r);
      auto it = index.find(key);
      const bool first = it == index.end();
      if (first) {
        it = index.emplace(key, means.size()).first;
        ReportRow m;
        m.image_id = "mean";
        m.scheme = r.scheme;
        m.mode = r.mode;
        m.step = r.step;
        means.push_back(m);
        counts.push_back(0);
      }
      ReportRow& m = means[it->second];
      ++counts[it->second];
      accumulate(m.bpp, r.bpp, first);
      accumulate(m.psnr_cfa_db, finite_psnr(r.psnr_cfa_db), first);
      accumulate(m.psnr_display_db, finite_psnr(r.psnr_display_db), first);
      accumulate(m.pearson_before, r.pearson_before, first);
      accumulate(m.pearson_after, r.pearson_after, first);
      accumulate(m.entropy_before, r.entropy_before, first);
      accumulate(m.entropy_after, r.entropy_after, first);
    }
  }
  for (std::size_t k = 0; k < means.size(); ++k) {
    ReportRow& m = means[k];
    for (double* v : {&m.bpp, &m.psnr_cfa_db, &m.psnr_display_db, &m.pearson_before, &m.pearson_after,
                      &m.entropy_before, &m.entropy_after})
      if (!std::isnan(*v)) *v /= counts[k];
    out.push_back(m);
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "image_id,scheme,mode,step,bpp,psnr_cfa_db,psnr_display_db,pearson_before,pearson_after,entropy_before,"
         "entropy_after\n";
  auto num = [&](double v) {
    if (std::isnan(v)) return;
    if (std::isinf(v)) {
      out << (v > 0 ? "inf" : "-inf");
      return;
    }
    out << std::setprecision(8) << v;
  };
  for (const auto& r : rows) {
    out << r.image_id << ',' << r.scheme << ',' << r.mode << ',';
    num(r.step);
    for (double v : {r.bpp, r.psnr_cfa_db, r.psnr_display_db, r.pearson_before, r.pearson_after, r.entropy_before,
                     r.entropy_after}) {
      out << ',';
      num(v);
    }
    out << '\n';
  }
}

}  // namespace camra
