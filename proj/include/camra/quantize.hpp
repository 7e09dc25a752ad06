#pragma once

#include <array>
#include <cstdint>

#include "camra/grid.hpp"

namespace camra {

/// Identity of the four coded branches of a decorrelated transform.
enum class Branch : std::uint8_t { LL = 0, VS = 1, VD = 2, HH = 3 };

/// Step size per branch. All steps must be positive.
struct QuantizationSpec {
  std::array<double, 4> steps{1, 1, 1, 1};

  static QuantizationSpec uniform(double step, double chroma_multiplier = 1.0);
  double step(Branch b) const { return steps[static_cast<int>(b)]; }
  void validate() const;
};

/// Midtread quantizer, ties rounded away from zero.
std::int32_t quantize(double c, double step);
inline double dequantize(std::int32_t q, double step) { return q * step; }

IntGrid quantize(const RealGrid& coefs, double step);
RealGrid dequantize(const IntGrid& q, double step);

}  // namespace camra
