#include <doctest.h>

#include <cmath>
#include <random>

#include "camra/error.hpp"
#include "camra/quantize.hpp"

using namespace camra;

TEST_CASE("midtread examples") {
  CHECK(quantize(0.4, 1) == 0);
  CHECK(quantize(0.6, 1) == 1);
  CHECK(quantize(-0.6, 1) == -1);
  CHECK(quantize(0.5, 1) == 1);
  CHECK(quantize(-0.5, 1) == -1);
  CHECK(quantize(2.5, 1) == 3);
  CHECK(dequantize(3, 0.25) == 0.75);
  for (double step : {0.1, 1.0, 3.0, 17.5})
    for (int k = -20; k <= 20; ++k) CHECK(dequantize(quantize(k * step, step), step) == doctest::Approx(k * step));
}

TEST_CASE("quantization error bounds") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> d(-100, 100);
  double sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double c = d(rng);
    const double e = std::fabs(c - dequantize(quantize(c, 2.0), 2.0));
    REQUIRE(e <= 1.0 + 1e-12);
    sum += e;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("quantize is monotone") {
  std::mt19937 rng(32);
  std::uniform_real_distribution<double> d(-1000, 1000);
  std::vector<double> v(10000);
  for (auto& x : v) x = d(rng);
  std::sort(v.begin(), v.end());
  for (double step : {0.3, 1.0, 8.0})
    for (std::size_t i = 1; i < v.size(); ++i) REQUIRE(quantize(v[i], step) >= quantize(v[i - 1], step));
}

TEST_CASE("grid quantization") {
  RealGrid g(3, 2);
  g(0, 0) = 1.2;
  g(1, 2) = -7.9;
  const IntGrid q = quantize(g, 2.0);
  CHECK(q(0, 0) == 1);
  CHECK(q(1, 2) == -4);
  const RealGrid back = dequantize(q, 2.0);
  CHECK(back(1, 2) == -8.0);
}

TEST_CASE("invalid steps") {
  CHECK_THROWS_AS(quantize(1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(quantize(1.0, -1.0), InvalidArgument);
  CHECK_THROWS_AS(quantize(RealGrid(2, 2), 0.0), InvalidArgument);
  CHECK_THROWS_AS(QuantizationSpec::uniform(0.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(quantize(1e12, 1.0), InvalidArgument);
}

TEST_CASE("per-branch steps") {
  const auto q = QuantizationSpec::uniform(4.0, 1.5);
  CHECK(q.step(Branch::LL) == 4.0);
  CHECK(q.step(Branch::VD) == 4.0);
  CHECK(q.step(Branch::VS) == 6.0);
  CHECK(q.step(Branch::HH) == 6.0);
  CHECK_NOTHROW(q.validate());
  const auto u = QuantizationSpec::uniform(2.0);
  for (auto b : {Branch::LL, Branch::VS, Branch::VD, Branch::HH}) CHECK(u.step(b) == 2.0);
}
