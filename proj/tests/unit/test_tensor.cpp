#include <gtest/gtest.h>

#include "spellerssl/core/error.hpp"
#include "spellerssl/core/ops.hpp"
#include "spellerssl/core/tensor.hpp"

namespace sc = spellerssl::core;
using spellerssl::DimensionError;
using spellerssl::StateError;

TEST(Tensor, ShapeMustMatchData) {
  EXPECT_THROW(sc::Tensor({2, 3}, std::vector<float>(5)), DimensionError);
  sc::Tensor t({2, 3}, std::vector<float>(6, 1.0f));
  EXPECT_EQ(t.numel(), 6u);
  EXPECT_EQ(t.size(1), 3u);
}

TEST(Tensor, CopiesShareStorageCloneDoesNot) {
  sc::Tensor a({2}, {1.0f, 2.0f});
  sc::Tensor b = a;
  b.values()[0] = 5.0f;
  EXPECT_EQ(a.at(0), 5.0f);
  sc::Tensor c = a.clone();
  c.values()[0] = 7.0f;
  EXPECT_EQ(a.at(0), 5.0f);
}

TEST(Backward, SumOfSquares) {
  sc::Tensor64 theta({2}, {1.0, 2.0}, true);
  sc::backward(sc::sum(sc::square(theta)));
  EXPECT_DOUBLE_EQ(theta.grad()[0], 2.0);
  EXPECT_DOUBLE_EQ(theta.grad()[1], 4.0);
}

TEST(Backward, RepeatedCallsAccumulate) {
  sc::Tensor64 theta({2}, {1.0, 2.0}, true);
  sc::backward(sc::sum(sc::square(theta)));
  sc::backward(sc::sum(sc::square(theta)));
  EXPECT_DOUBLE_EQ(theta.grad()[0], 4.0);
  theta.zero_grad();
  EXPECT_DOUBLE_EQ(theta.grad()[1], 0.0);
}

TEST(Backward, DisconnectedParameterStaysZero) {
  sc::Tensor64 a({2}, {1.0, 2.0}, true);
  sc::Tensor64 b({2}, {3.0, 4.0}, true);
  sc::backward(sc::sum(a));
  ASSERT_TRUE(b.has_grad());
  EXPECT_EQ(b.grad()[0], 0.0);
  EXPECT_EQ(b.grad()[1], 0.0);
}

TEST(Backward, SharedSubexpressionAccumulatesBothPaths) {
  sc::Tensor64 x({1}, {3.0}, true);
  auto y = sc::square(x);
  sc::backward(sc::add(y, y));
  EXPECT_DOUBLE_EQ(x.grad()[0], 12.0);
}

TEST(Backward, NonScalarIsShapeError) {
  sc::Tensor64 x({2}, {1.0, 2.0}, true);
  EXPECT_THROW(sc::backward(sc::square(x)), DimensionError);
}

TEST(Backward, NothingRequiresGradIsStateError) {
  sc::Tensor64 x({2}, {1.0, 2.0});
  EXPECT_THROW(sc::backward(sc::sum(x)), StateError);
}

TEST(Backward, NoGradGuardSkipsTape) {
  sc::Tensor64 x({2}, {1.0, 2.0}, true);
  sc::Tensor64 y;
  {
    sc::NoGradGuard guard;
    y = sc::sum(sc::square(x));
  }
  EXPECT_FALSE(y.requires_grad());
  EXPECT_TRUE(sc::grad_enabled());
}

TEST(Backward, DeepChainDoesNotRecurse) {
  sc::Tensor64 x({1}, {1.0}, true);
  sc::Tensor64 y = x;
  for (int i = 0; i < 100000; ++i) y = sc::scale(y, 1.0);
  sc::backward(y);
  EXPECT_DOUBLE_EQ(x.grad()[0], 1.0);
}
