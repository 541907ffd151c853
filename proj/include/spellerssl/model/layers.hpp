#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "spellerssl/core/ops.hpp"
#include "spellerssl/core/random.hpp"
#include "spellerssl/core/tensor.hpp"

namespace spellerssl::model {

using core::BasicTensor;
using core::NormMode;

// A named handle into a model. Handles alias the model's storage, so writing
// through `tensor.values()` updates the model. Buffers (BatchNorm running
// statistics) are saved in checkpoints but never optimised.
template <typename T>
struct NamedTensor {
  std::string name;
  BasicTensor<T> tensor;
  bool trainable = true;
};

template <typename T>
using NamedTensors = std::vector<NamedTensor<T>>;

// Weight and bias drawn from U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
template <typename T>
BasicTensor<T> uniform_init(core::Shape shape, std::size_t fan_in, core::Rng& rng);

template <typename T>
struct Conv1d {
  BasicTensor<T> weight;  // [Cout, Cin/groups, K]
  BasicTensor<T> bias;    // [Cout] or undefined
  core::Conv1dOptions options;

  Conv1d() = default;
  Conv1d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
         core::Conv1dOptions options, bool with_bias, core::Rng& rng);

  BasicTensor<T> forward(const BasicTensor<T>& x) const;
  void collect(const std::string& prefix, NamedTensors<T>& out) const;
};

template <typename T>
struct ConvTranspose1d {
  BasicTensor<T> weight;  // [Cin, Cout, K]
  BasicTensor<T> bias;
  core::ConvTranspose1dOptions options;

  ConvTranspose1d() = default;
  ConvTranspose1d(std::size_t in_channels, std::size_t out_channels, core::Rng& rng);

  BasicTensor<T> forward(const BasicTensor<T>& x) const;
  void collect(const std::string& prefix, NamedTensors<T>& out) const;
};

template <typename T>
struct BatchNorm1d {
  BasicTensor<T> gamma;
  BasicTensor<T> beta;
  BasicTensor<T> running_mean;
  BasicTensor<T> running_var;

  BatchNorm1d() = default;
  explicit BatchNorm1d(std::size_t channels);

  BasicTensor<T> forward(const BasicTensor<T>& x, NormMode mode);
  void collect(const std::string& prefix, NamedTensors<T>& out) const;
};

template <typename T>
struct Linear {
  BasicTensor<T> weight;  // [O, D]
  BasicTensor<T> bias;    // [O]

  Linear() = default;
  Linear(std::size_t in_features, std::size_t out_features, core::Rng& rng);

  BasicTensor<T> forward(const BasicTensor<T>& x) const;
  void collect(const std::string& prefix, NamedTensors<T>& out) const;
};

// conv -> batchnorm -> ReLU, twice; kernel 3, padding 1.
template <typename T>
struct DoubleConv {
  Conv1d<T> conv1;
  BatchNorm1d<T> bn1;
  Conv1d<T> conv2;
  BatchNorm1d<T> bn2;

  DoubleConv() = default;
  DoubleConv(std::size_t in_channels, std::size_t out_channels, core::Rng& rng);

  BasicTensor<T> forward(const BasicTensor<T>& x, NormMode mode);
  void collect(const std::string& prefix, NamedTensors<T>& out) const;
};

// Trainable entries only, in collection order.
template <typename T>
std::vector<BasicTensor<T>> trainable_tensors(const NamedTensors<T>& named);

}  // namespace spellerssl::model
