#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "spellerssl/core/fft.hpp"
#include "spellerssl/core/random.hpp"

namespace sc = spellerssl::core;

namespace {

std::vector<sc::Complex> naive_dft(const std::vector<sc::Complex>& x) {
  const std::size_t n = x.size();
  std::vector<sc::Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    sc::Complex acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((k * j) % n) /
                           static_cast<double>(n);
      acc += x[j] * sc::Complex(std::cos(angle), std::sin(angle));
    }
    out[k] = acc;
  }
  return out;
}

double max_abs_diff(const std::vector<sc::Complex>& a, const std::vector<sc::Complex>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(FftPlan, FactorsPreferRadix4) {
  EXPECT_EQ(sc::FftPlan(160).factors(), (std::vector<std::size_t>{4, 4, 2, 5}));
  EXPECT_EQ(sc::FftPlan(7).factors(), (std::vector<std::size_t>{7}));
  EXPECT_EQ(sc::FftPlan(1).factors(), (std::vector<std::size_t>{1}));
}

TEST(FftPlan, ImpulseAndDc) {
  std::vector<sc::Complex> impulse{1.0, 0.0, 0.0, 0.0};
  for (const auto& v : sc::fft(impulse)) EXPECT_NEAR(std::abs(v - sc::Complex(1.0)), 0.0, 1e-15);
  std::vector<sc::Complex> dc(4, 1.0);
  const auto out = sc::fft(dc);
  EXPECT_NEAR(out[0].real(), 4.0, 1e-15);
  for (std::size_t k = 1; k < 4; ++k) EXPECT_NEAR(std::abs(out[k]), 0.0, 1e-15);
}

class FftLengths : public ::testing::TestWithParam<std::size_t> {};

TEST_P(FftLengths, MatchesNaiveDftAndInverts) {
  const std::size_t n = GetParam();
  sc::Rng rng(n);
  std::vector<sc::Complex> x(n);
  for (auto& v : x) v = sc::Complex(rng.normal(), rng.normal());
  const auto fast = sc::fft(x);
  EXPECT_LT(max_abs_diff(fast, naive_dft(x)), 1e-9);
  EXPECT_LT(max_abs_diff(sc::ifft(fast), x), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Lengths, FftLengths,
                         ::testing::Values(1, 2, 3, 4, 5, 6, 7, 8, 9, 12, 16, 25, 30, 49, 64, 77,
                                           97, 120, 160, 210, 256, 360, 1024));

TEST(FftPlan, InPlaceAliasingIsSafe) {
  std::vector<sc::Complex> x{1.0, 2.0, 3.0, 4.0, 5.0};
  const auto expected = naive_dft(x);
  sc::fft_plan(5).forward(x, x);
  EXPECT_LT(max_abs_diff(x, expected), 1e-12);
}
