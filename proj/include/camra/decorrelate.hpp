#pragma once

// Decorrelation of the level-1 LH and HL subbands of a CFA transform. Both
// subbands carry the same lowpass chrominance signal, so a sum/difference
// pair moves most of their energy into one channel.

#include <cstdint>
#include <variant>
#include <vector>

#include "camra/grid.hpp"
#include "camra/wavelet.hpp"

namespace camra {

/// Row-major 2x2 real matrix.
struct Mat2 {
  double a00 = 1, a01 = 0, a10 = 0, a11 = 1;

  double det() const { return a00 * a11 - a01 * a10; }
  double frobenius() const;
  double condition() const;
  Mat2 inverse() const;  // throws InvalidArgument when singular
  Mat2 transpose() const { return {a00, a10, a01, a11}; }

  friend Mat2 operator*(const Mat2& a, const Mat2& b);
  friend Mat2 operator*(double s, const Mat2& m) { return {s * m.a00, s * m.a01, s * m.a10, s * m.a11}; }
  friend Mat2 operator+(const Mat2& a, const Mat2& b) { return {a.a00 + b.a00, a.a01 + b.a01, a.a10 + b.a10, a.a11 + b.a11}; }
  friend Mat2 operator-(const Mat2& a, const Mat2& b) { return {a.a00 - b.a00, a.a01 - b.a01, a.a10 - b.a10, a.a11 - b.a11}; }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

/// Frobenius inner product.
double dot(const Mat2& a, const Mat2& b);

/// The starting point of the optimizer: rows along (1, 1) and (1, -1).
inline constexpr Mat2 kInitialM{0.5, 0.5, 0.5, -0.5};

/// Rounds every entry to 16.16 fixed point, the precision M travels with.
Mat2 quantize_fixed_16_16(const Mat2& m);
std::int32_t to_fixed_16_16(double v);
double from_fixed_16_16(std::int32_t v);

template <class T>
struct DecorrelatedPair {
  Grid<T> v_s, v_d;
};

template <class T>
struct SubbandPair {
  Grid<T> lh, hl;
};

// Integer S-transform: v_d = a - b, v_s = floor((a + b) / 2).
struct SumDiff {
  std::int32_t v_s;
  std::int32_t v_d;
};
SumDiff sumdiff_forward(std::int32_t lh, std::int32_t hl);
/// Returns {lh, hl}.
std::pair<std::int32_t, std::int32_t> sumdiff_inverse(std::int32_t v_s, std::int32_t v_d);

DecorrelatedPair<std::int32_t> sumdiff_forward(const IntGrid& lh, const IntGrid& hl);
SubbandPair<std::int32_t> sumdiff_inverse(const IntGrid& v_s, const IntGrid& v_d);

/// (v_s, v_d) = M (lh, hl) per pixel.
DecorrelatedPair<double> matrix_forward(const RealGrid& lh, const RealGrid& hl, const Mat2& m);
SubbandPair<double> matrix_inverse(const RealGrid& v_s, const RealGrid& v_d, const Mat2& m);

struct IntegerSumDiff {};
struct MatrixTransform {
  Mat2 m;
};
using DecorrelationTransform = std::variant<IntegerSumDiff, MatrixTransform>;

/// Level-1 subbands with LH/HL replaced by their decorrelated pair.
template <class T>
struct DecorrelatedBands {
  Kernel kernel = Kernel::LeGall53;
  Grid<T> w_ll, v_s, v_d, w_hh;
  DecorrelationTransform transform = IntegerSumDiff{};
};

enum class ObjectiveForm : std::uint8_t {
  // |M^-1|_F^2 + lambda * sum |M w|_1 : the quantization-noise term as derived.
  DerivationConsistent = 0,
  // |M|_F^2 + lambda * sum |M w|_1 : the simplified form as printed.
  Literal = 1,
};

struct MOptimizerConfig {
  double lambda = 0.1;
  int max_iters = 10000;
  double step = 1e-3;  // initial line-search step
  double tolerance = 1e-6;
  ObjectiveForm form = ObjectiveForm::DerivationConsistent;
  double max_norm = 10.0;   // trust region on |M|_F
  double min_norm = 1e-6;   // keeps the literal form away from M = 0
};

struct MOptimizerResult {
  Mat2 m;
  bool converged = false;
  int iterations = 0;
  std::vector<double> trace;  // objective after every accepted iterate, starting with M0
};

struct CoefficientPair {
  double lh;
  double hl;
};

double m_objective(const Mat2& m, const std::vector<CoefficientPair>& samples, double lambda, ObjectiveForm form);
Mat2 m_objective_gradient(const Mat2& m, const std::vector<CoefficientPair>& samples, double lambda,
                          ObjectiveForm form);

/// Projected gradient descent with Armijo backtracking from kInitialM.
/// Requires at least 1000 samples.
MOptimizerResult optimize_m(const std::vector<CoefficientPair>& samples, const MOptimizerConfig& cfg = {});

/// Mean absolute entry, the overall scale k of M ~ k [[a, a], [b, -b]].
double m_scale(const Mat2& m);

/// Takes every stride-th coefficient so that at most `max_pairs` remain.
std::vector<CoefficientPair> sample_pairs(const RealGrid& lh, const RealGrid& hl, std::size_t max_pairs);

/// Pearson product-moment correlation. Throws InvalidArgument when a channel
/// has zero variance or fewer than two samples are given.
double pearson(std::span<const double> a, std::span<const double> b);

struct DecorrelationStats {
  double pearson_before = 0;  // r(lh, hl)
  double pearson_after = 0;   // r(v_s, v_d)
  double entropy_before = 0;  // order-0 entropy of lh, bits/sample
  double entropy_after = 0;   // order-0 entropy of v_d
};

DecorrelationStats measure_decorrelation(const RealGrid& lh, const RealGrid& hl, const RealGrid& v_s,
                                         const RealGrid& v_d);

}  // namespace camra
