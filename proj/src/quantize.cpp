#include "camra/quantize.hpp"

#include <cmath>
#include <string>

namespace camra {

namespace {
constexpr double kMaxIndex = 1073741823.0;  // 2^30 - 1, the coder's magnitude limit
}

QuantizationSpec QuantizationSpec::uniform(double step, double chroma_multiplier) {
  QuantizationSpec q;
  q.steps = {step, step * chroma_multiplier, step, step * chroma_multiplier};
  q.validate();
  return q;
}

void QuantizationSpec::validate() const {
  for (double s : steps)
    if (!(s > 0) || !std::isfinite(s)) throw InvalidArgument("quantization step must be positive, got " + std::to_string(s));
}

std::int32_t quantize(double c, double step) {
  if (!(step > 0)) throw InvalidArgument("quantization step must be positive");
  const double q = std::round(c / step);  // std::round breaks ties away from zero
  if (std::fabs(q) > kMaxIndex) throw InvalidArgument("quantization index out of range; step too small");
  return static_cast<std::int32_t>(q);
}

IntGrid quantize(const RealGrid& coefs, double step) {
  IntGrid out(coefs.width(), coefs.height());
  for (std::size_t i = 0; i < coefs.size(); ++i) out.values()[i] = quantize(coefs.values()[i], step);
  return out;
}

RealGrid dequantize(const IntGrid& q, double step) {
  if (!(step > 0)) throw InvalidArgument("quantization step must be positive");
  RealGrid out(q.width(), q.height());
  for (std::size_t i = 0; i < q.size(); ++i) out.values()[i] = q.values()[i] * step;
  return out;
}

}  // namespace camra
