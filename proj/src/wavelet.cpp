#include "camra/wavelet.hpp"

#include <cmath>
#include <string>

namespace camra {

namespace {

thread_local std::vector<TransformEvent>* g_transform_log = nullptr;

void require_even_length(std::size_t n) {
  if (n < 2 || n % 2 != 0) throw DimensionError("wavelet: signal length must be even and >= 2, got " + std::to_string(n));
}

// Whole-sample symmetric extension of an index into [0, n).
inline int mirror(int i, int n) {
  if (i < 0) i = -i;
  if (i >= n) i = 2 * (n - 1) - i;
  return i;
}

}  // namespace

void dwt53_forward_1d(std::span<const std::int32_t> x, std::span<std::int32_t> low, std::span<std::int32_t> high) {
  require_even_length(x.size());
  const int n = static_cast<int>(x.size()), half = n / 2;
  for (int i = 0; i < half; ++i)
    high[i] = x[2 * i + 1] - ((x[2 * i] + x[mirror(2 * i + 2, n)]) >> 1);
  for (int i = 0; i < half; ++i) {
    const std::int32_t left = high[i > 0 ? i - 1 : 0];
    low[i] = x[2 * i] + ((left + high[i] + 2) >> 2);
  }
}

void dwt53_inverse_1d(std::span<const std::int32_t> low, std::span<const std::int32_t> high, std::span<std::int32_t> x) {
  require_even_length(x.size());
  const int n = static_cast<int>(x.size()), half = n / 2;
  for (int i = 0; i < half; ++i) {
    const std::int32_t left = high[i > 0 ? i - 1 : 0];
    x[2 * i] = low[i] - ((left + high[i] + 2) >> 2);
  }
  for (int i = 0; i < half; ++i)
    x[2 * i + 1] = high[i] + ((x[2 * i] + x[mirror(2 * i + 2, n)]) >> 1);
}

void dwt97_forward_1d(std::span<const double> x, std::span<double> low, std::span<double> high) {
  using namespace lifting97;
  require_even_length(x.size());
  const int n = static_cast<int>(x.size()), half = n / 2;
  for (int i = 0; i < half; ++i) high[i] = x[2 * i + 1] + kAlpha * (x[2 * i] + x[mirror(2 * i + 2, n)]);
  for (int i = 0; i < half; ++i) low[i] = x[2 * i] + kBeta * (high[i > 0 ? i - 1 : 0] + high[i]);
  for (int i = 0; i < half; ++i) high[i] += kGamma * (low[i] + low[i + 1 < half ? i + 1 : half - 1]);
  for (int i = 0; i < half; ++i) low[i] += kDelta * (high[i > 0 ? i - 1 : 0] + high[i]);
  const double ls = std::sqrt(2.0) / kK, hs = kK / std::sqrt(2.0);
  for (int i = 0; i < half; ++i) {
    low[i] *= ls;
    high[i] *= hs;
  }
}

void dwt97_inverse_1d(std::span<const double> low_in, std::span<const double> high_in, std::span<double> x) {
  using namespace lifting97;
  require_even_length(x.size());
  const int n = static_cast<int>(x.size()), half = n / 2;
  std::vector<double> low(half), high(half);
  const double ls = kK / std::sqrt(2.0), hs = std::sqrt(2.0) / kK;
  for (int i = 0; i < half; ++i) {
    low[i] = low_in[i] * ls;
    high[i] = high_in[i] * hs;
  }
  for (int i = 0; i < half; ++i) low[i] -= kDelta * (high[i > 0 ? i - 1 : 0] + high[i]);
  for (int i = 0; i < half; ++i) high[i] -= kGamma * (low[i] + low[i + 1 < half ? i + 1 : half - 1]);
  for (int i = 0; i < half; ++i) x[2 * i] = low[i] - kBeta * (high[i > 0 ? i - 1 : 0] + high[i]);
  for (int i = 0; i < half; ++i) x[2 * i + 1] = high[i] - kAlpha * (x[2 * i] + x[mirror(2 * i + 2, n)]);
}

namespace {

template <class T>
struct KernelOps;

template <>
struct KernelOps<std::int32_t> {
  static constexpr Kernel kind = Kernel::LeGall53;
  static void fwd(std::span<const std::int32_t> x, std::span<std::int32_t> l, std::span<std::int32_t> h) {
    dwt53_forward_1d(x, l, h);
  }
  static void inv(std::span<const std::int32_t> l, std::span<const std::int32_t> h, std::span<std::int32_t> x) {
    dwt53_inverse_1d(l, h, x);
  }
};

template <>
struct KernelOps<double> {
  static constexpr Kernel kind = Kernel::Daub97;
  static void fwd(std::span<const double> x, std::span<double> l, std::span<double> h) { dwt97_forward_1d(x, l, h); }
  static void inv(std::span<const double> l, std::span<const double> h, std::span<double> x) {
    dwt97_inverse_1d(l, h, x);
  }
};

// In-place single level on the top-left w x h region: rows first, then
// columns. Output is in Mallat quadrant layout.
template <class T>
void level_forward(Grid<T>& g, int w, int h) {
  if (w % 2 != 0 || h % 2 != 0 || w < 2 || h < 2)
    throw DimensionError("wavelet level: region " + std::to_string(w) + "x" + std::to_string(h) + " has an odd side");
  if (g_transform_log) g_transform_log->push_back({KernelOps<T>::kind, w, h});
  std::vector<T> in(std::max(w, h)), out(std::max(w, h));
  for (int r = 0; r < h; ++r) {
    std::copy_n(&g(r, 0), w, in.begin());
    KernelOps<T>::fwd({in.data(), static_cast<std::size_t>(w)}, {out.data(), static_cast<std::size_t>(w / 2)},
                      {out.data() + w / 2, static_cast<std::size_t>(w / 2)});
    std::copy_n(out.begin(), w, &g(r, 0));
  }
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) in[r] = g(r, c);
    KernelOps<T>::fwd({in.data(), static_cast<std::size_t>(h)}, {out.data(), static_cast<std::size_t>(h / 2)},
                      {out.data() + h / 2, static_cast<std::size_t>(h / 2)});
    for (int r = 0; r < h; ++r) g(r, c) = out[r];
  }
}

template <class T>
void level_inverse(Grid<T>& g, int w, int h) {
  if (w % 2 != 0 || h % 2 != 0 || w < 2 || h < 2)
    throw DimensionError("wavelet level: region " + std::to_string(w) + "x" + std::to_string(h) + " has an odd side");
  std::vector<T> in(std::max(w, h)), out(std::max(w, h));
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) in[r] = g(r, c);
    KernelOps<T>::inv({in.data(), static_cast<std::size_t>(h / 2)}, {in.data() + h / 2, static_cast<std::size_t>(h / 2)},
                      {out.data(), static_cast<std::size_t>(h)});
    for (int r = 0; r < h; ++r) g(r, c) = out[r];
  }
  for (int r = 0; r < h; ++r) {
    std::copy_n(&g(r, 0), w, in.begin());
    KernelOps<T>::inv({in.data(), static_cast<std::size_t>(w / 2)}, {in.data() + w / 2, static_cast<std::size_t>(w / 2)},
                      {out.data(), static_cast<std::size_t>(w)});
    std::copy_n(out.begin(), w, &g(r, 0));
  }
}

template <class T>
SubbandSet<T> split(const Grid<T>& g) {
  const int hw = g.width() / 2, hh = g.height() / 2;
  return {g.crop(0, 0, hw, hh), g.crop(0, hw, hw, hh), g.crop(hh, 0, hw, hh), g.crop(hh, hw, hw, hh)};
}

template <class T>
Grid<T> join(const SubbandSet<T>& b) {
  require_same_shape(b.ll, b.lh, "subband join");
  require_same_shape(b.ll, b.hl, "subband join");
  require_same_shape(b.ll, b.hh, "subband join");
  const int hw = b.ll.width(), hh = b.ll.height();
  Grid<T> g(hw * 2, hh * 2);
  g.paste(b.ll, 0, 0);
  g.paste(b.lh, 0, hw);
  g.paste(b.hl, hh, 0);
  g.paste(b.hh, hh, hw);
  return g;
}

template <class T>
SubbandSet<T> forward_one(const Grid<T>& grid) {
  Grid<T> g = grid;
  level_forward(g, g.width(), g.height());
  return split(g);
}

template <class T>
Grid<T> inverse_one(const SubbandSet<T>& bands) {
  Grid<T> g = join(bands);
  level_inverse(g, g.width(), g.height());
  return g;
}

template <class T>
PacketTree<T> decompose(const Grid<T>& band, int levels) {
  if (levels < 0) throw InvalidArgument("packet levels must be non-negative");
  if (max_levels(band.width(), band.height(), levels) != levels)
    throw DimensionError("packet_decompose: " + std::to_string(band.width()) + "x" + std::to_string(band.height()) +
                         " band is not divisible by 2^" + std::to_string(levels));
  PacketTree<T> tree{levels, band};
  for (int l = 0; l < levels; ++l) level_forward(tree.coeffs, band.width() >> l, band.height() >> l);
  return tree;
}

template <class T>
Grid<T> reconstruct(const PacketTree<T>& tree) {
  Grid<T> g = tree.coeffs;
  for (int l = tree.levels - 1; l >= 0; --l) level_inverse(g, g.width() >> l, g.height() >> l);
  return g;
}

}  // namespace

IntSubbands dwt53_forward(const IntGrid& grid) { return forward_one(grid); }
IntGrid dwt53_inverse(const IntSubbands& bands) { return inverse_one(bands); }
RealSubbands dwt97_forward(const RealGrid& grid) { return forward_one(grid); }
RealGrid dwt97_inverse(const RealSubbands& bands) { return inverse_one(bands); }

std::vector<BandRect> band_layout(int width, int height, int levels) {
  std::vector<BandRect> out;
  out.push_back({0, 0, width >> levels, height >> levels});
  for (int l = levels; l >= 1; --l) {
    const int w = width >> l, h = height >> l;
    out.push_back({0, w, w, h});
    out.push_back({h, 0, w, h});
    out.push_back({h, w, w, h});
  }
  return out;
}

int max_levels(int width, int height, int requested) {
  int n = 0;
  while (n < requested && width % (2 << n) == 0 && height % (2 << n) == 0) ++n;
  return n;
}

PacketTree<std::int32_t> packet_decompose(const IntGrid& band, int levels) { return decompose(band, levels); }
PacketTree<double> packet_decompose(const RealGrid& band, int levels) { return decompose(band, levels); }
IntGrid packet_reconstruct(const PacketTree<std::int32_t>& tree) { return reconstruct(tree); }
RealGrid packet_reconstruct(const PacketTree<double>& tree) { return reconstruct(tree); }

ScopedTransformLog::ScopedTransformLog() : previous_(g_transform_log) { g_transform_log = &events_; }

ScopedTransformLog::~ScopedTransformLog() { g_transform_log = previous_; }

int ScopedTransformLog::count_at(int width, int height) const {
  int n = 0;
  for (const auto& e : events_) n += (e.width == width && e.height == height);
  return n;
}

}  // namespace camra
