#include "camra/decorrelate.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "camra/entropy_coding.hpp"

namespace camra {

double Mat2::frobenius() const { return std::sqrt(a00 * a00 + a01 * a01 + a10 * a10 + a11 * a11); }

double Mat2::condition() const {
  const double d = std::fabs(det());
  if (d == 0) return std::numeric_limits<double>::infinity();
  // For 2x2: s_max * s_min = |det| and s_max^2 + s_min^2 = |M|_F^2.
  const double f2 = a00 * a00 + a01 * a01 + a10 * a10 + a11 * a11;
  const double disc = std::sqrt(std::max(0.0, f2 * f2 - 4 * d * d));
  const double smax = std::sqrt((f2 + disc) / 2), smin = d / smax;
  return smax / smin;
}

Mat2 Mat2::inverse() const {
  const double d = det();
  if (d == 0 || !std::isfinite(d)) throw InvalidArgument("decorrelation matrix is singular");
  return {a11 / d, -a01 / d, -a10 / d, a00 / d};
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
  return {a.a00 * b.a00 + a.a01 * b.a10, a.a00 * b.a01 + a.a01 * b.a11, a.a10 * b.a00 + a.a11 * b.a10,
          a.a10 * b.a01 + a.a11 * b.a11};
}

double dot(const Mat2& a, const Mat2& b) { return a.a00 * b.a00 + a.a01 * b.a01 + a.a10 * b.a10 + a.a11 * b.a11; }

std::int32_t to_fixed_16_16(double v) {
  const double s = std::round(v * 65536.0);
  if (std::fabs(s) > 2147483647.0) throw InvalidArgument("matrix entry does not fit 16.16 fixed point");
  return static_cast<std::int32_t>(s);
}

double from_fixed_16_16(std::int32_t v) { return v / 65536.0; }

Mat2 quantize_fixed_16_16(const Mat2& m) {
  auto q = [](double v) { return from_fixed_16_16(to_fixed_16_16(v)); };
  return {q(m.a00), q(m.a01), q(m.a10), q(m.a11)};
}

SumDiff sumdiff_forward(std::int32_t lh, std::int32_t hl) { return {(lh + hl) >> 1, lh - hl}; }

std::pair<std::int32_t, std::int32_t> sumdiff_inverse(std::int32_t v_s, std::int32_t v_d) {
  const std::int32_t hl = v_s - (v_d >> 1);
  return {v_d + hl, hl};
}

DecorrelatedPair<std::int32_t> sumdiff_forward(const IntGrid& lh, const IntGrid& hl) {
  require_same_shape(lh, hl, "sumdiff_forward");
  DecorrelatedPair<std::int32_t> out{IntGrid(lh.width(), lh.height()), IntGrid(lh.width(), lh.height())};
  for (std::size_t i = 0; i < lh.size(); ++i) {
    const SumDiff sd = sumdiff_forward(lh.values()[i], hl.values()[i]);
    out.v_s.values()[i] = sd.v_s;
    out.v_d.values()[i] = sd.v_d;
  }
  return out;
}

SubbandPair<std::int32_t> sumdiff_inverse(const IntGrid& v_s, const IntGrid& v_d) {
  require_same_shape(v_s, v_d, "sumdiff_inverse");
  SubbandPair<std::int32_t> out{IntGrid(v_s.width(), v_s.height()), IntGrid(v_s.width(), v_s.height())};
  for (std::size_t i = 0; i < v_s.size(); ++i) {
    const auto [lh, hl] = sumdiff_inverse(v_s.values()[i], v_d.values()[i]);
    out.lh.values()[i] = lh;
    out.hl.values()[i] = hl;
  }
  return out;
}

namespace {

template <class Out>
Out apply(const RealGrid& a, const RealGrid& b, const Mat2& m) {
  require_same_shape(a, b, "decorrelation matrix");
  RealGrid x(a.width(), a.height()), y(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double p = a.values()[i], q = b.values()[i];
    x.values()[i] = m.a00 * p + m.a01 * q;
    y.values()[i] = m.a10 * p + m.a11 * q;
  }
  return Out{std::move(x), std::move(y)};
}

}  // namespace

DecorrelatedPair<double> matrix_forward(const RealGrid& lh, const RealGrid& hl, const Mat2& m) {
  if (m.det() == 0) throw InvalidArgument("decorrelation matrix is singular");
  return apply<DecorrelatedPair<double>>(lh, hl, m);
}

SubbandPair<double> matrix_inverse(const RealGrid& v_s, const RealGrid& v_d, const Mat2& m) {
  return apply<SubbandPair<double>>(v_s, v_d, m.inverse());
}

double m_objective(const Mat2& m, const std::vector<CoefficientPair>& samples, double lambda, ObjectiveForm form) {
  double l1 = 0;
  for (const auto& w : samples)
    l1 += std::fabs(m.a00 * w.lh + m.a01 * w.hl) + std::fabs(m.a10 * w.lh + m.a11 * w.hl);
  const double fid = form == ObjectiveForm::DerivationConsistent ? std::pow(m.inverse().frobenius(), 2)
                                                                  : std::pow(m.frobenius(), 2);
  return fid + lambda * l1;
}

Mat2 m_objective_gradient(const Mat2& m, const std::vector<CoefficientPair>& samples, double lambda,
                          ObjectiveForm form) {
  Mat2 g{0, 0, 0, 0};
  for (const auto& w : samples) {
    const double s0 = m.a00 * w.lh + m.a01 * w.hl, s1 = m.a10 * w.lh + m.a11 * w.hl;
    const double sg0 = (s0 > 0) - (s0 < 0), sg1 = (s1 > 0) - (s1 < 0);
    g.a00 += sg0 * w.lh;
    g.a01 += sg0 * w.hl;
    g.a10 += sg1 * w.lh;
    g.a11 += sg1 * w.hl;
  }
  g = lambda * g;
  if (form == ObjectiveForm::DerivationConsistent) {
    // d|M^-1|_F^2 / dM = -2 M^-T M^-1 M^-T
    const Mat2 inv = m.inverse(), inv_t = inv.transpose();
    g = g - 2.0 * (inv_t * inv * inv_t);
  } else {
    g = g + 2.0 * m;
  }
  return g;
}

namespace {

Mat2 project(const Mat2& m, const MOptimizerConfig& cfg) {
  const double f = m.frobenius();
  if (f > cfg.max_norm) return (cfg.max_norm / f) * m;
  if (f < cfg.min_norm && f > 0) return (cfg.min_norm / f) * m;
  return m;
}

// Exact minimization over a positive scale per row. With D = diag(d0, d1),
// |(DM)^-1|_F^2 = sum_j c_j / d_j^2 and the L1 term is sum_j d_j S_j, so each
// d_j = cbrt(2 c_j / (lambda S_j)).
Mat2 rescale_rows(const Mat2& m, const std::vector<CoefficientPair>& samples, const MOptimizerConfig& cfg) {
  const Mat2 inv = m.inverse();
  const double c0 = inv.a00 * inv.a00 + inv.a10 * inv.a10, c1 = inv.a01 * inv.a01 + inv.a11 * inv.a11;
  double s0 = 0, s1 = 0;
  for (const auto& w : samples) {
    s0 += std::fabs(m.a00 * w.lh + m.a01 * w.hl);
    s1 += std::fabs(m.a10 * w.lh + m.a11 * w.hl);
  }
  const double d0 = s0 > 0 ? std::cbrt(2 * c0 / (cfg.lambda * s0)) : 1.0;
  const double d1 = s1 > 0 ? std::cbrt(2 * c1 / (cfg.lambda * s1)) : 1.0;
  return project(Mat2{d0 * m.a00, d0 * m.a01, d1 * m.a10, d1 * m.a11}, cfg);
}

// J is invariant under signed row permutations. Put the sum row first and
// orient both rows so that M ~ k [[a, a], [b, -b]] with a, b > 0.
Mat2 canonical_rows(Mat2 m) {
  auto sumness = [](double x, double y) { return std::fabs(x + y) - std::fabs(x - y); };
  if (sumness(m.a10, m.a11) > sumness(m.a00, m.a01)) m = Mat2{m.a10, m.a11, m.a00, m.a01};
  if (m.a00 + m.a01 < 0) m = Mat2{-m.a00, -m.a01, m.a10, m.a11};
  if (m.a10 - m.a11 < 0) m = Mat2{m.a00, m.a01, -m.a10, -m.a11};
  return m;
}

}  // namespace

MOptimizerResult optimize_m(const std::vector<CoefficientPair>& samples, const MOptimizerConfig& cfg) {
  if (samples.size() < 1000) throw InvalidArgument("optimize_m needs at least 1000 coefficient pairs");
  if (!(cfg.lambda >= 0)) throw InvalidArgument("lambda must be non-negative");
  constexpr double kArmijo = 1e-4;
  constexpr double kMaxCondition = 1e6;

  MOptimizerResult res;
  Mat2 m = project(kInitialM, cfg);
  double j = m_objective(m, samples, cfg.lambda, cfg.form);
  res.trace.push_back(j);
  double step = cfg.step;

  const bool row_steps = cfg.form == ObjectiveForm::DerivationConsistent && cfg.lambda > 0;

  for (int it = 0; it < cfg.max_iters; ++it) {
    res.iterations = it + 1;
    const double j_start = j;
    bool moved = false;
    if (row_steps) {
      const Mat2 r = rescale_rows(m, samples, cfg);
      if (r.condition() < kMaxCondition) {
        const double jr = m_objective(r, samples, cfg.lambda, cfg.form);
        if (jr < j) {
          m = r;
          j = jr;
          res.trace.push_back(j);
          moved = true;
        }
      }
    }
    const Mat2 g = m_objective_gradient(m, samples, cfg.lambda, cfg.form);
    bool accepted = false;
    Mat2 cand;
    double jc = 0;
    while (step > 1e-300) {
      cand = project(m - step * g, cfg);
      if (cand.condition() < kMaxCondition) {
        jc = m_objective(cand, samples, cfg.lambda, cfg.form);
        if (jc <= j && jc <= j + kArmijo * dot(g, cand - m)) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (accepted && !(cand == m)) {
      m = cand;
      j = jc;
      res.trace.push_back(j);
      step *= 2;
      moved = true;
    } else {
      step = cfg.step;
    }
    if (!moved) {
      // No feasible descent left: stationary up to the line search resolution.
      res.converged = true;
      break;
    }
    if (std::fabs(j_start - j) / std::max(std::fabs(j_start), 1e-300) < cfg.tolerance) {
      res.converged = true;
      break;
    }
  }
  res.m = canonical_rows(m);
  return res;
}

double m_scale(const Mat2& m) {
  return (std::fabs(m.a00) + std::fabs(m.a01) + std::fabs(m.a10) + std::fabs(m.a11)) / 4;
}

std::vector<CoefficientPair> sample_pairs(const RealGrid& lh, const RealGrid& hl, std::size_t max_pairs) {
  require_same_shape(lh, hl, "sample_pairs");
  const std::size_t n = lh.size();
  const std::size_t stride = max_pairs == 0 ? n + 1 : std::max<std::size_t>(1, (n + max_pairs - 1) / max_pairs);
  std::vector<CoefficientPair> out;
  out.reserve(n / stride + 1);
  for (std::size_t i = 0; i < n; i += stride) out.push_back({lh.values()[i], hl.values()[i]});
  return out;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("pearson: channel lengths differ");
  if (a.size() < 2) throw InvalidArgument("pearson: need at least two pairs");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0 || sbb == 0) throw InvalidArgument("pearson: zero-variance channel, correlation undefined");
  return sab / std::sqrt(saa * sbb);
}

DecorrelationStats measure_decorrelation(const RealGrid& lh, const RealGrid& hl, const RealGrid& v_s,
                                         const RealGrid& v_d) {
  DecorrelationStats s;
  s.pearson_before = pearson(lh.values(), hl.values());
  s.pearson_after = pearson(v_s.values(), v_d.values());
  s.entropy_before = entropy_estimate(lh);
  s.entropy_after = entropy_estimate(v_d);
  return s;
}

}  // namespace camra
