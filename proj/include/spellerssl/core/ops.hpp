#pragma once

#include <cstddef>
#include <span>

#include "spellerssl/core/tensor.hpp"

namespace spellerssl::core {

// Elementwise arithmetic on equal shapes.
template <typename T>
BasicTensor<T> add(const BasicTensor<T>& a, const BasicTensor<T>& b);
template <typename T>
BasicTensor<T> sub(const BasicTensor<T>& a, const BasicTensor<T>& b);
template <typename T>
BasicTensor<T> mul(const BasicTensor<T>& a, const BasicTensor<T>& b);
template <typename T>
BasicTensor<T> scale(const BasicTensor<T>& a, T factor);
template <typename T>
BasicTensor<T> square(const BasicTensor<T>& a);

// Reductions to a one-element tensor.
template <typename T>
BasicTensor<T> sum(const BasicTensor<T>& a);
template <typename T>
BasicTensor<T> mean(const BasicTensor<T>& a);

// Same values, new shape (element count must match).
template <typename T>
BasicTensor<T> reshape(const BasicTensor<T>& a, Shape shape);

struct Conv1dOptions {
  std::size_t stride = 1;
  std::size_t padding = 0;
  std::size_t dilation = 1;
  std::size_t groups = 1;
};

// x: [N, Cin, L] or [Cin, L]; weight: [Cout, Cin/groups, K]; bias: [Cout] or
// undefined. Output keeps the batch rank of x.
template <typename T>
BasicTensor<T> conv1d(const BasicTensor<T>& x, const BasicTensor<T>& weight,
                      const BasicTensor<T>& bias, const Conv1dOptions& options = {});

struct ConvTranspose1dOptions {
  std::size_t stride = 2;
  std::size_t padding = 0;
  std::size_t output_padding = 0;
};

// x: [N, Cin, L]; weight: [Cin, Cout, K] (PyTorch layout). The output length
// must come out as exactly stride * L; anything else is a ConfigError.
template <typename T>
BasicTensor<T> conv_transpose1d(const BasicTensor<T>& x, const BasicTensor<T>& weight,
                                const BasicTensor<T>& bias,
                                const ConvTranspose1dOptions& options = {});

// Gradient flows to the first maximum of each window.
template <typename T>
BasicTensor<T> maxpool1d(const BasicTensor<T>& x, std::size_t kernel, std::size_t stride);

enum class NormMode { kTrain, kEval };

struct BatchNormOptions {
  NormMode mode = NormMode::kTrain;
  double momentum = 0.1;
  double eps = 1e-5;
};

// x: [N, C, L]. Train mode normalises with batch statistics (biased variance)
// and folds them into the running buffers (unbiased variance, PyTorch
// convention); eval mode uses the running buffers.
template <typename T>
BasicTensor<T> batchnorm1d(const BasicTensor<T>& x, const BasicTensor<T>& gamma,
                           const BasicTensor<T>& beta, BasicTensor<T>& running_mean,
                           BasicTensor<T>& running_var, const BatchNormOptions& options);

enum class Activation { kRelu, kGelu };

template <typename T>
BasicTensor<T> relu(const BasicTensor<T>& x);
// tanh approximation: 0.5 x (1 + tanh(sqrt(2/pi) (x + 0.044715 x^3)))
template <typename T>
BasicTensor<T> gelu(const BasicTensor<T>& x);
template <typename T>
BasicTensor<T> activation(const BasicTensor<T>& x, Activation kind);

// x: [D] or [N, D]; weight: [O, D]; bias: [O] or undefined.
template <typename T>
BasicTensor<T> linear(const BasicTensor<T>& x, const BasicTensor<T>& weight,
                      const BasicTensor<T>& bias);

// Mean over the last (time) axis: [D, T] -> [D], [N, D, T] -> [N, D].
template <typename T>
BasicTensor<T> global_avg_pool_time(const BasicTensor<T>& x);

// Concatenate [N, C1, L] and [N, C2, L] along channels.
template <typename T>
BasicTensor<T> concat_channels(const BasicTensor<T>& a, const BasicTensor<T>& b);

// logits: [N, K] (or [K] for one sample); labels in [0, K). Loss is
// sum_i w[y_i] ce_i / sum_i w[y_i].
template <typename T>
BasicTensor<T> weighted_cross_entropy(const BasicTensor<T>& logits,
                                      std::span<const int> labels,
                                      std::span<const T> class_weights);

// Mean absolute difference over all elements.
template <typename T>
BasicTensor<T> l1_loss(const BasicTensor<T>& a, const BasicTensor<T>& b);

template <typename T>
struct DftResult {
  BasicTensor<T> real;
  BasicTensor<T> imag;
};

// DFT along the last axis of any-rank input; both parts keep the input shape.
template <typename T>
DftResult<T> dft(const BasicTensor<T>& x);

}  // namespace spellerssl::core
