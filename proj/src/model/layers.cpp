#include "spellerssl/model/layers.hpp"

#include <cmath>

namespace spellerssl::model {

template <typename T>
BasicTensor<T> uniform_init(core::Shape shape, std::size_t fan_in, core::Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::vector<T> v(core::shape_numel(shape));
  for (auto& x : v) x = static_cast<T>(rng.uniform(-bound, bound));
  return BasicTensor<T>(std::move(shape), std::move(v), true);
}

template <typename T>
Conv1d<T>::Conv1d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
                  core::Conv1dOptions opts, bool with_bias, core::Rng& rng)
    : options(opts) {
  const std::size_t fan_in = in_channels / opts.groups * kernel;
  weight = uniform_init<T>({out_channels, in_channels / opts.groups, kernel}, fan_in, rng);
  if (with_bias) bias = uniform_init<T>({out_channels}, fan_in, rng);
}

template <typename T>
BasicTensor<T> Conv1d<T>::forward(const BasicTensor<T>& x) const {
  return core::conv1d(x, weight, bias, options);
}

template <typename T>
void Conv1d<T>::collect(const std::string& prefix, NamedTensors<T>& out) const {
  out.push_back({prefix + "weight", weight, true});
  if (bias.defined()) out.push_back({prefix + "bias", bias, true});
}

template <typename T>
ConvTranspose1d<T>::ConvTranspose1d(std::size_t in_channels, std::size_t out_channels,
                                    core::Rng& rng) {
  options = {.stride = 2, .padding = 0, .output_padding = 0};
  // PyTorch computes fan_in for transposed convs from weight dim 1.
  const std::size_t fan_in = out_channels * 2;
  weight = uniform_init<T>({in_channels, out_channels, 2}, fan_in, rng);
  bias = uniform_init<T>({out_channels}, fan_in, rng);
}

template <typename T>
BasicTensor<T> ConvTranspose1d<T>::forward(const BasicTensor<T>& x) const {
  return core::conv_transpose1d(x, weight, bias, options);
}

template <typename T>
void ConvTranspose1d<T>::collect(const std::string& prefix, NamedTensors<T>& out) const {
  out.push_back({prefix + "weight", weight, true});
  out.push_back({prefix + "bias", bias, true});
}

template <typename T>
BatchNorm1d<T>::BatchNorm1d(std::size_t channels)
    : gamma(BasicTensor<T>::full({channels}, T{1}, true)),
      beta(BasicTensor<T>::zeros({channels}, true)),
      running_mean(BasicTensor<T>::zeros({channels})),
      running_var(BasicTensor<T>::full({channels}, T{1})) {}

template <typename T>
BasicTensor<T> BatchNorm1d<T>::forward(const BasicTensor<T>& x, NormMode mode) {
  return core::batchnorm1d(x, gamma, beta, running_mean, running_var, {.mode = mode});
}

template <typename T>
void BatchNorm1d<T>::collect(const std::string& prefix, NamedTensors<T>& out) const {
  out.push_back({prefix + "weight", gamma, true});
  out.push_back({prefix + "bias", beta, true});
  out.push_back({prefix + "running_mean", running_mean, false});
  out.push_back({prefix + "running_var", running_var, false});
}

template <typename T>
Linear<T>::Linear(std::size_t in_features, std::size_t out_features, core::Rng& rng)
    : weight(uniform_init<T>({out_features, in_features}, in_features, rng)),
      bias(uniform_init<T>({out_features}, in_features, rng)) {}

template <typename T>
BasicTensor<T> Linear<T>::forward(const BasicTensor<T>& x) const {
  return core::linear(x, weight, bias);
}

template <typename T>
void Linear<T>::collect(const std::string& prefix, NamedTensors<T>& out) const {
  out.push_back({prefix + "weight", weight, true});
  out.push_back({prefix + "bias", bias, true});
}

template <typename T>
DoubleConv<T>::DoubleConv(std::size_t in_channels, std::size_t out_channels, core::Rng& rng)
    : conv1(in_channels, out_channels, 3, {.padding = 1}, false, rng),
      bn1(out_channels),
      conv2(out_channels, out_channels, 3, {.padding = 1}, false, rng),
      bn2(out_channels) {}

template <typename T>
BasicTensor<T> DoubleConv<T>::forward(const BasicTensor<T>& x, NormMode mode) {
  auto h = core::relu(bn1.forward(conv1.forward(x), mode));
  return core::relu(bn2.forward(conv2.forward(h), mode));
}

template <typename T>
void DoubleConv<T>::collect(const std::string& prefix, NamedTensors<T>& out) const {
  conv1.collect(prefix + "conv1.", out);
  bn1.collect(prefix + "bn1.", out);
  conv2.collect(prefix + "conv2.", out);
  bn2.collect(prefix + "bn2.", out);
}

template <typename T>
std::vector<BasicTensor<T>> trainable_tensors(const NamedTensors<T>& named) {
  std::vector<BasicTensor<T>> out;
  for (const auto& n : named)
    if (n.trainable) out.push_back(n.tensor);
  return out;
}

#define SPELLERSSL_INSTANTIATE(T)                                                        \
  template BasicTensor<T> uniform_init<T>(core::Shape, std::size_t, core::Rng&);         \
  template struct Conv1d<T>;                                                             \
  template struct ConvTranspose1d<T>;                                                    \
  template struct BatchNorm1d<T>;                                                        \
  template struct Linear<T>;                                                             \
  template struct DoubleConv<T>;                                                         \
  template std::vector<BasicTensor<T>> trainable_tensors<T>(const NamedTensors<T>&);

SPELLERSSL_INSTANTIATE(float)
SPELLERSSL_INSTANTIATE(double)
#undef SPELLERSSL_INSTANTIATE

}  // namespace spellerssl::model
