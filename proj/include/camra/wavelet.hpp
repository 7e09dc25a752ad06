#pragma once

// Separable lifting wavelets on even-sized grids with whole-sample symmetric
// extension. The LeGall 5/3 kernel works on integers and is bit-exact
// reversible; the Daubechies 9/7 kernel works on doubles and is scaled so
// that the lowpass DC gain and highpass Nyquist gain are both sqrt(2).

#include <cstdint>
#include <span>
#include <vector>

#include "camra/grid.hpp"

namespace camra {

enum class Kernel : std::uint8_t { LeGall53 = 0, Daub97 = 1 };

namespace lifting97 {
inline constexpr double kAlpha = -1.586134342;
inline constexpr double kBeta = -0.052980118;
inline constexpr double kGamma = 0.882911075;
inline constexpr double kDelta = 0.443506852;
inline constexpr double kK = 1.230174105;
}  // namespace lifting97

// 1-D transforms. `x` has even length n; `low` and `high` have n/2 entries.
void dwt53_forward_1d(std::span<const std::int32_t> x, std::span<std::int32_t> low, std::span<std::int32_t> high);
void dwt53_inverse_1d(std::span<const std::int32_t> low, std::span<const std::int32_t> high, std::span<std::int32_t> x);
void dwt97_forward_1d(std::span<const double> x, std::span<double> low, std::span<double> high);
void dwt97_inverse_1d(std::span<const double> low, std::span<const double> high, std::span<double> x);

/// One 2-D decomposition level. LH is lowpass vertically and highpass
/// horizontally; HL is the transpose.
template <class T>
struct SubbandSet {
  Grid<T> ll, lh, hl, hh;
};
using IntSubbands = SubbandSet<std::int32_t>;
using RealSubbands = SubbandSet<double>;

IntSubbands dwt53_forward(const IntGrid& grid);
IntGrid dwt53_inverse(const IntSubbands& bands);
RealSubbands dwt97_forward(const RealGrid& grid);
RealGrid dwt97_inverse(const RealSubbands& bands);

/// Rectangle of one subband inside a Mallat layout.
struct BandRect {
  int row = 0;
  int col = 0;
  int width = 0;
  int height = 0;
};

/// N-level dyadic decomposition of one band stored in Mallat layout: the
/// coarsest LL sits in the top-left corner, each level's LH/HL/HH fill the
/// remaining quadrants. `coeffs` always has the input's shape.
template <class T>
struct PacketTree {
  int levels = 0;
  Grid<T> coeffs;
};

/// Subbands of a Mallat layout ordered coarse to fine: LL_N, then
/// (LH, HL, HH) for level N down to level 1.
std::vector<BandRect> band_layout(int width, int height, int levels);

/// Largest n <= requested such that both sides are divisible by 2^n.
int max_levels(int width, int height, int requested);

/// 5/3 packets on an integer band, 9/7 packets on a real band.
PacketTree<std::int32_t> packet_decompose(const IntGrid& band, int levels);
PacketTree<double> packet_decompose(const RealGrid& band, int levels);
IntGrid packet_reconstruct(const PacketTree<std::int32_t>& tree);
RealGrid packet_reconstruct(const PacketTree<double>& tree);

/// Records every forward 2-D level applied on the current thread while alive.
/// Used to count full-resolution transforms per encoder.
struct TransformEvent {
  Kernel kernel;
  int width;
  int height;
};

class ScopedTransformLog {
public:
  ScopedTransformLog();
  ~ScopedTransformLog();
  ScopedTransformLog(const ScopedTransformLog&) = delete;
  ScopedTransformLog& operator=(const ScopedTransformLog&) = delete;

  const std::vector<TransformEvent>& events() const { return events_; }
  /// Number of recorded forward levels whose input was exactly width x height.
  int count_at(int width, int height) const;

private:
  std::vector<TransformEvent> events_;
  std::vector<TransformEvent>* previous_;
};

}  // namespace camra
