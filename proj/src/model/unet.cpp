#include "spellerssl/model/unet.hpp"

#include <cmath>
#include <string>

#include "spellerssl/core/error.hpp"

namespace spellerssl::model {

std::size_t UNetConfig::level_width(std::size_t level) const {
  const double w = static_cast<double>(base_width) * static_cast<double>(1u << level) *
                   width_multiplier;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(w)));
}

void UNetConfig::validate() const {
  if (in_channels == 0) throw ConfigError("UNetConfig: in_channels must be >= 1");
  if (base_width == 0) throw ConfigError("UNetConfig: base_width must be >= 1");
  if (!(width_multiplier > 0.0) || !std::isfinite(width_multiplier)) {
    throw ConfigError("UNetConfig: width_multiplier must be positive");
  }
}

template <typename T>
BasicTensor<T> as_batched_input(const BasicTensor<T>& x, std::size_t channels) {
  if (x.dim() != 2 && x.dim() != 3) {
    throw DimensionError("model input must be [C, L] or [N, C, L], got " +
                         core::shape_str(x.shape()));
  }
  const std::size_t c = x.size(x.dim() - 2);
  const std::size_t len = x.shape().back();
  if (c != channels) {
    throw DimensionError("model input channel axis is " + std::to_string(c) + ", expected " +
                         std::to_string(channels));
  }
  if (len == 0 || len % 16 != 0) {
    throw DimensionError("model input time axis is " + std::to_string(len) +
                         ", which is not a positive multiple of 16; pad it with "
                         "pad_time_to_multiple first");
  }
  if (x.dim() == 3) return x;
  return core::reshape(x, {1, c, len});
}

template <typename T>
Encoder<T>::Encoder(const UNetConfig& config, core::Rng& rng) : config_(config) {
  config_.validate();
  std::size_t in = config_.in_channels;
  for (std::size_t i = 0; i < 4; ++i) {
    stages_[i] = DoubleConv<T>(in, config_.level_width(i), rng);
    in = config_.level_width(i);
  }
  bottleneck_ = DoubleConv<T>(in, config_.level_width(4), rng);
}

template <typename T>
EncoderOutput<T> Encoder<T>::forward(const BasicTensor<T>& x, NormMode mode) {
  EncoderOutput<T> out;
  BasicTensor<T> h = x;
  for (std::size_t i = 0; i < 4; ++i) {
    out.skips[i] = stages_[i].forward(h, mode);
    h = core::maxpool1d(out.skips[i], 2, 2);
  }
  out.bottleneck = bottleneck_.forward(h, mode);
  return out;
}

template <typename T>
void Encoder<T>::collect(NamedTensors<T>& out) const {
  for (std::size_t i = 0; i < 4; ++i) stages_[i].collect("enc." + std::to_string(i + 1) + ".", out);
  bottleneck_.collect("bottleneck.", out);
}

template <typename T>
Decoder<T>::Decoder(const UNetConfig& config, core::Rng& rng) {
  for (std::size_t k = 4; k-- > 0;) {
    up_[k] = ConvTranspose1d<T>(config.level_width(k + 1), config.level_width(k), rng);
    conv_[k] = DoubleConv<T>(2 * config.level_width(k), config.level_width(k), rng);
  }
  final_ = Conv1d<T>(config.level_width(0), config.in_channels, 1, {}, true, rng);
}

template <typename T>
BasicTensor<T> Decoder<T>::forward(const EncoderOutput<T>& enc, NormMode mode) {
  BasicTensor<T> h = enc.bottleneck;
  for (std::size_t k = 4; k-- > 0;) {
    h = conv_[k].forward(core::concat_channels(enc.skips[k], up_[k].forward(h)), mode);
  }
  return final_.forward(h);
}

template <typename T>
void Decoder<T>::collect(NamedTensors<T>& out) const {
  for (std::size_t k = 4; k-- > 0;) {
    const std::string prefix = "dec." + std::to_string(k + 1) + ".";
    up_[k].collect(prefix + "up.", out);
    conv_[k].collect(prefix, out);
  }
  final_.collect("final.", out);
}

template <typename T>
UNet<T>::UNet(const UNetConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  core::Rng enc_rng(core::mix_seed(seed, 1));
  core::Rng dec_rng(core::mix_seed(seed, 2));
  encoder_ = Encoder<T>(config_, enc_rng);
  decoder_ = Decoder<T>(config_, dec_rng);
}

template <typename T>
UNetOutput<T> UNet<T>::forward(const BasicTensor<T>& x, NormMode mode) {
  const auto xb = as_batched_input(x, config_.in_channels);
  auto enc = encoder_.forward(xb, mode);
  UNetOutput<T> out;
  out.reconstruction = decoder_.forward(enc, mode);
  out.bottleneck = enc.bottleneck;
  if (x.dim() == 2) {
    out.reconstruction = core::reshape(out.reconstruction, x.shape());
    out.bottleneck = core::reshape(out.bottleneck, {out.bottleneck.size(1), out.bottleneck.size(2)});
  }
  return out;
}

template <typename T>
BasicTensor<T> UNet<T>::encoder_forward(const BasicTensor<T>& x, NormMode mode) {
  const auto xb = as_batched_input(x, config_.in_channels);
  auto b = encoder_.forward(xb, mode).bottleneck;
  if (x.dim() == 2) b = core::reshape(b, {b.size(1), b.size(2)});
  return b;
}

template <typename T>
NamedTensors<T> UNet<T>::named_tensors() const {
  NamedTensors<T> out;
  encoder_.collect(out);
  decoder_.collect(out);
  return out;
}

template class Encoder<float>;
template class Encoder<double>;
template class Decoder<float>;
template class Decoder<double>;
template class UNet<float>;
template class UNet<double>;
template BasicTensor<float> as_batched_input(const BasicTensor<float>&, std::size_t);
template BasicTensor<double> as_batched_input(const BasicTensor<double>&, std::size_t);

}  // namespace spellerssl::model
