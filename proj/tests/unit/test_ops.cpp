#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "../support/gradcheck.hpp"
#include "spellerssl/core/error.hpp"
#include "spellerssl/core/kernels.hpp"
#include "spellerssl/core/ops.hpp"

namespace sc = spellerssl::core;
using spellerssl::testing::gradcheck;
using spellerssl::testing::random_projection;
using spellerssl::testing::random_tensor;
using T64 = sc::Tensor64;

namespace {

std::vector<double> vals(const T64& t) { return {t.values().begin(), t.values().end()}; }

constexpr double kGradTol = 1e-4;

}  // namespace

TEST(Conv1d, IdentityKernel) {
  T64 x({1, 3}, {1, 2, 3});
  T64 w({1, 1, 1}, {1});
  T64 b({1}, {0});
  EXPECT_EQ(vals(sc::conv1d(x, w, b)), (std::vector<double>{1, 2, 3}));
}

TEST(Conv1d, HandComputedCrossCorrelation) {
  T64 x({1, 3}, {1, 2, 3});
  T64 w({1, 1, 3}, {1, 0, -1});
  T64 b({1}, {0});
  const auto y = sc::conv1d(x, w, b, {.stride = 1, .padding = 1});
  EXPECT_EQ(y.shape(), (sc::Shape{1, 3}));
  EXPECT_EQ(vals(y), (std::vector<double>{-2, -2, 2}));
}

TEST(Conv1d, ZeroWeightsGiveZeros) {
  sc::Rng rng(1);
  auto x = random_tensor(rng, {2, 3, 10}, false);
  auto y = sc::conv1d(x, T64::zeros({4, 3, 3}), T64::zeros({4}), {.padding = 1});
  for (double v : y.values()) EXPECT_EQ(v, 0.0);
}

TEST(Conv1d, ChannelMismatchNamesAxes) {
  T64 x = T64::zeros({1, 3, 8});
  T64 w = T64::zeros({2, 2, 3});
  try {
    sc::conv1d(x, w, T64{});
    FAIL();
  } catch (const spellerssl::DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("channel axis"), std::string::npos);
  }
}

TEST(ConvTranspose1d, ScatterExample) {
  T64 x({1, 2}, {1, 2});
  T64 w({1, 1, 2}, {1, 1});
  T64 b({1}, {0});
  EXPECT_EQ(vals(sc::conv_transpose1d(x, w, b)), (std::vector<double>{1, 1, 2, 2}));
}

TEST(ConvTranspose1d, LengthDoublesAndZeroMapsToZero) {
  auto y = sc::conv_transpose1d(T64::zeros({2, 3, 10}), T64::zeros({3, 5, 2}), T64::zeros({5}));
  EXPECT_EQ(y.shape(), (sc::Shape{2, 5, 20}));
  for (double v : y.values()) EXPECT_EQ(v, 0.0);
}

TEST(ConvTranspose1d, NonDoublingGeometryIsConfigError) {
  T64 x = T64::zeros({1, 1, 10});
  EXPECT_THROW(sc::conv_transpose1d(x, T64::zeros({1, 1, 3}), T64{}), spellerssl::ConfigError);
  EXPECT_NO_THROW(sc::conv_transpose1d(x, T64::zeros({1, 1, 3}), T64{},
                                       {.stride = 2, .padding = 1, .output_padding = 1}));
}

TEST(MaxPool1d, Examples) {
  T64 x({1, 4}, {1, 3, 2, 5});
  EXPECT_EQ(vals(sc::maxpool1d(x, 2, 2)), (std::vector<double>{3, 5}));
  auto c = sc::maxpool1d(T64::full({2, 160}, 4.5), 2, 2);
  EXPECT_EQ(c.shape(), (sc::Shape{2, 80}));
  for (double v : c.values()) EXPECT_EQ(v, 4.5);
  EXPECT_THROW(sc::maxpool1d(T64::zeros({1, 1}), 2, 2), spellerssl::DimensionError);
}

TEST(MaxPool1d, TieRoutesGradientToFirst) {
  T64 x({1, 2}, {1, 1}, true);
  sc::backward(sc::sum(sc::maxpool1d(x, 2, 2)));
  EXPECT_EQ(x.grad()[0], 1.0);
  EXPECT_EQ(x.grad()[1], 0.0);
}

TEST(BatchNorm1d, ConstantBatchGivesZeros) {
  T64 x = T64::full({2, 3, 4}, 7.0);
  T64 rm = T64::zeros({3}), rv = T64::full({3}, 1.0);
  auto y = sc::batchnorm1d(x, T64::full({3}, 1.0), T64::zeros({3}), rm, rv, {});
  for (double v : y.values()) EXPECT_EQ(v, 0.0);
}

TEST(BatchNorm1d, ZeroGammaGivesBeta) {
  sc::Rng rng(2);
  auto x = random_tensor(rng, {2, 2, 5}, false);
  T64 rm = T64::zeros({2}), rv = T64::full({2}, 1.0);
  auto y = sc::batchnorm1d(x, T64::zeros({2}), T64({2}, {0.5, -1.5}), rm, rv, {});
  for (std::size_t i = 0; i < y.numel(); ++i) {
    EXPECT_EQ(y.at(i), (i / 5) % 2 == 0 ? 0.5 : -1.5);
  }
}

TEST(BatchNorm1d, TrainOutputIsStandardisedAndRunningStatsMove) {
  sc::Rng rng(3);
  auto x = random_tensor(rng, {4, 3, 16}, false, 2.0);
  for (std::size_t i = 0; i < x.numel(); ++i) x.values()[i] += 5.0;
  T64 rm = T64::zeros({3}), rv = T64::full({3}, 1.0);
  auto y = sc::batchnorm1d(x, T64::full({3}, 1.0), T64::zeros({3}), rm, rv, {});
  for (std::size_t c = 0; c < 3; ++c) {
    double mean = 0.0, sq = 0.0, xm = 0.0, xsq = 0.0;
    for (std::size_t n = 0; n < 4; ++n)
      for (std::size_t t = 0; t < 16; ++t) {
        const double v = y.at((n * 3 + c) * 16 + t);
        const double u = x.at((n * 3 + c) * 16 + t);
        mean += v;
        sq += v * v;
        xm += u;
        xsq += u * u;
      }
    mean /= 64.0;
    xm /= 64.0;
    EXPECT_NEAR(mean, 0.0, 1e-12);
    EXPECT_NEAR(sq / 64.0 - mean * mean, 1.0, 1e-4);
    const double unbiased = (xsq / 64.0 - xm * xm) * 64.0 / 63.0;
    EXPECT_NEAR(rm.at(c), 0.1 * xm, 1e-12);
    EXPECT_NEAR(rv.at(c), 0.9 + 0.1 * unbiased, 1e-12);
  }
}

TEST(BatchNorm1d, EvalUsesRunningStats) {
  T64 x({1, 1, 2}, {3.0, 5.0});
  T64 rm({1}, {1.0}), rv({1}, {4.0});
  auto y = sc::batchnorm1d(x, T64::full({1}, 1.0), T64::zeros({1}), rm, rv,
                           {.mode = sc::NormMode::kEval, .eps = 0.0});
  EXPECT_DOUBLE_EQ(y.at(0), 1.0);
  EXPECT_DOUBLE_EQ(y.at(1), 2.0);
  EXPECT_EQ(rm.at(0), 1.0);
}

TEST(BatchNorm1d, DegenerateBatchInTrainMode) {
  T64 x = T64::zeros({1, 2, 1});
  T64 rm = T64::zeros({2}), rv = T64::full({2}, 1.0);
  EXPECT_THROW(sc::batchnorm1d(x, T64::full({2}, 1.0), T64::zeros({2}), rm, rv, {}),
               spellerssl::DimensionError);
  EXPECT_NO_THROW(sc::batchnorm1d(x, T64::full({2}, 1.0), T64::zeros({2}), rm, rv,
                                  {.mode = sc::NormMode::kEval}));
}

TEST(Activation, Values) {
  T64 x({3}, {-1.0, 2.0, 0.0});
  EXPECT_EQ(vals(sc::relu(x)), (std::vector<double>{0.0, 2.0, 0.0}));
  EXPECT_EQ(sc::gelu(T64({1}, {0.0})).item(), 0.0);
  // 0.5 * 3 * (1 + tanh(sqrt(2/pi) * (3 + 0.044715 * 27)))
  const double expected =
      1.5 * (1.0 + std::tanh(std::sqrt(2.0 / std::numbers::pi) * (3.0 + 0.044715 * 27.0)));
  EXPECT_NEAR(sc::gelu(T64({1}, {3.0})).item(), expected, 1e-15);
  EXPECT_NEAR(expected, 2.9964, 5e-5);
}

TEST(Linear, Examples) {
  T64 x({2}, {1, 2});
  EXPECT_EQ(vals(sc::linear(x, T64({2, 2}, {1, 0, 0, 1}), T64::zeros({2}))),
            (std::vector<double>{1, 2}));
  EXPECT_EQ(vals(sc::linear(x, T64({2, 2}, {1, 1, 0, 1}), T64({2}, {0, 1}))),
            (std::vector<double>{3, 3}));
  EXPECT_EQ(vals(sc::linear(T64::zeros({2}), T64({2, 2}, {1, 1, 0, 1}), T64({2}, {4, 5}))),
            (std::vector<double>{4, 5}));
  EXPECT_THROW(sc::linear(T64::zeros({3}), T64::zeros({2, 2}), T64{}),
               spellerssl::DimensionError);
}

TEST(GlobalAvgPool, Examples) {
  T64 x({2, 2}, {1, 3, 2, 2}, true);
  auto y = sc::global_avg_pool_time(x);
  EXPECT_EQ(vals(y), (std::vector<double>{2, 2}));
  sc::backward(sc::sum(y));
  for (double g : x.grad()) EXPECT_DOUBLE_EQ(g, 0.5);
  EXPECT_EQ(sc::global_avg_pool_time(T64({3, 1}, {1, 2, 3})).shape(), (sc::Shape{3}));
  EXPECT_THROW(sc::global_avg_pool_time(T64({2, 0}, {})), spellerssl::DimensionError);
}

TEST(WeightedCrossEntropy, Examples) {
  const std::vector<double> w{1.0, 5.0};
  const std::vector<int> y1{1};
  EXPECT_NEAR(sc::weighted_cross_entropy(T64({2}, {0, 0}), std::span<const int>(y1),
                                         std::span<const double>(w))
                  .item(),
              std::log(2.0), 1e-15);
  EXPECT_LT(sc::weighted_cross_entropy(T64({2}, {-30, 30}), std::span<const int>(y1),
                                       std::span<const double>(w))
                .item(),
            1e-12);
  // Equal per-sample losses: weighted mean equals that loss.
  const std::vector<int> y2{0, 1};
  auto loss = sc::weighted_cross_entropy(T64({2, 2}, {1.0, -0.5, -0.5, 1.0}),
                                         std::span<const int>(y2), std::span<const double>(w));
  EXPECT_NEAR(loss.item(), std::log(1.0 + std::exp(-1.5)), 1e-15);
  const std::vector<int> bad{2};
  EXPECT_THROW(sc::weighted_cross_entropy(T64({2}, {0, 0}), std::span<const int>(bad),
                                          std::span<const double>(w)),
               spellerssl::LabelError);
}

TEST(WeightedCrossEntropy, WeightsShiftTheMean) {
  const std::vector<double> w{1.0, 5.0};
  const std::vector<int> y{0, 1};
  T64 z({2, 2}, {2.0, 0.0, 0.0, 0.5});
  const double ce0 = std::log(1.0 + std::exp(-2.0));
  const double ce1 = std::log(1.0 + std::exp(-0.5));
  EXPECT_NEAR(sc::weighted_cross_entropy(z, std::span<const int>(y), std::span<const double>(w))
                  .item(),
              (ce0 + 5.0 * ce1) / 6.0, 1e-15);
}

TEST(L1Loss, Examples) {
  T64 a({2}, {1, 2}), b({2}, {0, 0});
  EXPECT_EQ(sc::l1_loss(a, a).item(), 0.0);
  EXPECT_EQ(sc::l1_loss(a, b).item(), 1.5);
  EXPECT_EQ(sc::l1_loss(b, a).item(), 1.5);
  EXPECT_THROW(sc::l1_loss(a, T64::zeros({3})), spellerssl::DimensionError);
}

TEST(Dft, Examples) {
  auto dc = sc::dft(T64({4}, {1, 1, 1, 1}));
  EXPECT_EQ(vals(dc.real), (std::vector<double>{4, 0, 0, 0}));
  for (double v : dc.imag.values()) EXPECT_NEAR(v, 0.0, 1e-15);
  auto imp = sc::dft(T64({4}, {1, 0, 0, 0}));
  EXPECT_EQ(vals(imp.real), (std::vector<double>{1, 1, 1, 1}));
  for (double v : imp.imag.values()) EXPECT_EQ(v, 0.0);
}

TEST(Dft, IsLinear) {
  sc::Rng rng(11);
  for (std::size_t len : {4u, 7u, 160u}) {
    auto a = random_tensor(rng, {3, len}, false);
    auto b = random_tensor(rng, {3, len}, false);
    const double alpha = 0.7, beta = -1.3;
    auto lhs = sc::dft(sc::add(sc::scale(a, alpha), sc::scale(b, beta)));
    auto da = sc::dft(a), db = sc::dft(b);
    for (std::size_t i = 0; i < a.numel(); ++i) {
      EXPECT_NEAR(lhs.real.at(i), alpha * da.real.at(i) + beta * db.real.at(i), 1e-9);
      EXPECT_NEAR(lhs.imag.at(i), alpha * da.imag.at(i) + beta * db.imag.at(i), 1e-9);
    }
  }
}

TEST(Reshape, KeepsValuesAndChecksCount) {
  T64 x({2, 3}, {1, 2, 3, 4, 5, 6});
  auto y = sc::reshape(x, {3, 2});
  EXPECT_EQ(vals(y), vals(x));
  EXPECT_THROW(sc::reshape(x, {4}), spellerssl::DimensionError);
}

TEST(ConcatChannels, Layout) {
  T64 a({1, 1, 2}, {1, 2}), b({1, 2, 2}, {3, 4, 5, 6});
  EXPECT_EQ(vals(sc::concat_channels(a, b)), (std::vector<double>{1, 2, 3, 4, 5, 6}));
}

// Finite-difference checks, one per primitive, under both conv backends.
class GradCheck : public ::testing::TestWithParam<sc::kernels::Backend> {
 protected:
  void SetUp() override {
    saved_ = sc::kernels::active_backend();
    sc::kernels::set_active_backend(GetParam());
  }
  void TearDown() override { sc::kernels::set_active_backend(saved_); }
  sc::Rng rng_{42};

 private:
  sc::kernels::Backend saved_{};
};

TEST_P(GradCheck, Conv1d) {
  for (auto opts : {sc::Conv1dOptions{1, 1, 1, 1}, sc::Conv1dOptions{2, 1, 1, 1},
                    sc::Conv1dOptions{1, 2, 2, 1}}) {
    auto x = random_tensor(rng_, {4, 8, 32});
    auto w = random_tensor(rng_, {6, 8, 3});
    auto b = random_tensor(rng_, {6});
    auto r = gradcheck([&] { return random_projection(sc::conv1d(x, w, b, opts), 1); }, {x, w, b});
    EXPECT_LT(r.max_rel_error, kGradTol);
  }
}

TEST_P(GradCheck, DepthwiseConv1d) {
  auto x = random_tensor(rng_, {4, 8, 32});
  auto w = random_tensor(rng_, {8, 1, 3});
  auto b = random_tensor(rng_, {8});
  auto r = gradcheck(
      [&] { return random_projection(sc::conv1d(x, w, b, {1, 2, 2, 8}), 2); }, {x, w, b});
  EXPECT_LT(r.max_rel_error, kGradTol);
}

TEST_P(GradCheck, ConvTranspose1d) {
  auto x = random_tensor(rng_, {4, 8, 16});
  auto w = random_tensor(rng_, {8, 4, 2});
  auto b = random_tensor(rng_, {4});
  auto r = gradcheck([&] { return random_projection(sc::conv_transpose1d(x, w, b), 3); },
                     {x, w, b});
  EXPECT_LT(r.max_rel_error, kGradTol);
}

INSTANTIATE_TEST_SUITE_P(Backends, GradCheck,
                         ::testing::Values(sc::kernels::Backend::kReference,
                                           sc::kernels::Backend::kParallel));

TEST(GradCheckOps, MaxPool1d) {
  sc::Rng rng(7);
  auto x = random_tensor(rng, {4, 8, 32});
  auto r = gradcheck([&] { return random_projection(sc::maxpool1d(x, 2, 2), 4); }, {x});
  EXPECT_LT(r.max_rel_error, kGradTol);
}

TEST(GradCheckOps, BatchNormTrainAndEval) {
  sc::Rng rng(8);
  auto x = random_tensor(rng, {4, 8, 32});
  auto gamma = random_tensor(rng, {8});
  auto beta = random_tensor(rng, {8});
  T64 rm = T64::zeros({8}), rv = T64::full({8}, 1.0);
  for (auto mode : {sc::NormMode::kTrain, sc::NormMode::kEval}) {
    auto r = gradcheck(
        [&] {
          return random_projection(sc::batchnorm1d(x, gamma, beta, rm, rv, {.mode = mode}), 5);
        },
        {x, gamma, beta});
    EXPECT_LT(r.max_rel_error, kGradTol);
  }
}

TEST(GradCheckOps, Activations) {
  sc::Rng rng(9);
  auto x = random_tensor(rng, {4, 8, 32});
  EXPECT_LT(gradcheck([&] { return random_projection(sc::relu(x), 6); }, {x}).max_rel_error,
            kGradTol);
  EXPECT_LT(gradcheck([&] { return random_projection(sc::gelu(x), 6); }, {x}).max_rel_error,
            kGradTol);
}

TEST(GradCheckOps, LinearPoolConcat) {
  sc::Rng rng(10);
  auto x = random_tensor(rng, {4, 8});
  auto w = random_tensor(rng, {2, 8});
  auto b = random_tensor(rng, {2});
  EXPECT_LT(gradcheck([&] { return random_projection(sc::linear(x, w, b), 7); }, {x, w, b})
                .max_rel_error,
            kGradTol);
  auto t = random_tensor(rng, {4, 8, 32});
  EXPECT_LT(gradcheck([&] { return random_projection(sc::global_avg_pool_time(t), 8); }, {t})
                .max_rel_error,
            kGradTol);
  auto a = random_tensor(rng, {2, 3, 5});
  auto c = random_tensor(rng, {2, 4, 5});
  EXPECT_LT(gradcheck([&] { return random_projection(sc::concat_channels(a, c), 9); }, {a, c})
                .max_rel_error,
            kGradTol);
}

TEST(GradCheckOps, Losses) {
  sc::Rng rng(12);
  auto z = random_tensor(rng, {8, 2});
  const std::vector<int> y{0, 1, 0, 0, 1, 0, 0, 0};
  const std::vector<double> w{1.0, 5.0};
  EXPECT_LT(gradcheck(
                [&] {
                  return sc::weighted_cross_entropy(z, std::span<const int>(y),
                                                    std::span<const double>(w));
                },
                {z})
                .max_rel_error,
            kGradTol);
  auto a = random_tensor(rng, {4, 8, 32});
  auto b = random_tensor(rng, {4, 8, 32});
  EXPECT_LT(gradcheck([&] { return sc::l1_loss(a, b); }, {a, b}).max_rel_error, kGradTol);
}

TEST(GradCheckOps, Dft) {
  sc::Rng rng(13);
  for (std::size_t len : {4u, 7u, 32u}) {
    auto x = random_tensor(rng, {2, 3, len});
    auto r = gradcheck(
        [&] {
          auto d = sc::dft(x);
          return sc::add(random_projection(d.real, 10), random_projection(d.imag, 11));
        },
        {x});
    EXPECT_LT(r.max_rel_error, kGradTol);
  }
}

TEST(GradCheckOps, Elementwise) {
  sc::Rng rng(14);
  auto a = random_tensor(rng, {3, 4});
  auto b = random_tensor(rng, {3, 4});
  auto r = gradcheck(
      [&] {
        return sc::mean(sc::add(sc::mul(a, b), sc::sub(sc::square(a), sc::scale(b, 0.3))));
      },
      {a, b});
  EXPECT_LT(r.max_rel_error, kGradTol);
}
