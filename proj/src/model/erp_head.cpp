#include "spellerssl/model/erp_head.hpp"

#include <string>

#include "spellerssl/core/error.hpp"

namespace spellerssl::model {

void HeadConfig::validate() const {
  if (bottleneck_channels == 0 || hidden == 0) {
    throw ConfigError("HeadConfig: bottleneck_channels and hidden must be >= 1");
  }
  if (classes != 2) throw ConfigError("HeadConfig: only binary heads are supported");
}

template <typename T>
ErpHead<T>::ErpHead(const HeadConfig& config, core::Rng& rng) : config_(config) {
  config_.validate();
  const std::size_t d = config_.hidden;
  proj_ = Conv1d<T>(config_.bottleneck_channels, d, 1, {}, false, rng);
  proj_bn_ = BatchNorm1d<T>(d);
  dw_ = Conv1d<T>(d, d, 3, {.padding = 1, .groups = d}, true, rng);
  dwd_ = Conv1d<T>(d, d, 3, {.padding = 2, .dilation = 2, .groups = d}, true, rng);
  fuse_ = Conv1d<T>(d, d, 1, {}, true, rng);
  fc_ = Linear<T>(d, config_.classes, rng);
}

template <typename T>
BasicTensor<T> ErpHead<T>::forward(const BasicTensor<T>& b, NormMode mode) {
  if (b.dim() != 2 && b.dim() != 3) {
    throw DimensionError("ErpHead: expected [B, T] or [N, B, T], got " + core::shape_str(b.shape()));
  }
  const std::size_t channels = b.size(b.dim() - 2);
  if (channels != config_.bottleneck_channels) {
    throw DimensionError("ErpHead: bottleneck channel axis is " + std::to_string(channels) +
                         ", head expects " + std::to_string(config_.bottleneck_channels));
  }
  const bool unbatched = b.dim() == 2;
  BasicTensor<T> h = unbatched ? core::reshape(b, {1, b.size(0), b.size(1)}) : b;
  h = core::gelu(proj_bn_.forward(proj_.forward(h), mode));
  h = core::gelu(dw_.forward(h));
  h = core::gelu(dwd_.forward(h));
  h = core::gelu(fuse_.forward(h));
  auto logits = fc_.forward(core::global_avg_pool_time(h));
  if (unbatched) logits = core::reshape(logits, {config_.classes});
  return logits;
}

template <typename T>
void ErpHead<T>::collect(NamedTensors<T>& out) const {
  proj_.collect("head.proj.", out);
  proj_bn_.collect("head.proj_bn.", out);
  dw_.collect("head.dw.", out);
  dwd_.collect("head.dwd.", out);
  fuse_.collect("head.fuse.", out);
  fc_.collect("head.fc.", out);
}

template <typename T>
Classifier<T>::Classifier(const UNetConfig& unet, const HeadConfig& head, std::uint64_t seed)
    : unet_config_(unet) {
  unet_config_.validate();
  if (head.bottleneck_channels != unet_config_.bottleneck_channels()) {
    throw ConfigError("Classifier: head expects " + std::to_string(head.bottleneck_channels) +
                      " bottleneck channels, encoder produces " +
                      std::to_string(unet_config_.bottleneck_channels()));
  }
  // Same stream as UNet's encoder so a scratch classifier starts from the
  // same encoder weights as a fresh U-Net with this seed.
  core::Rng enc_rng(core::mix_seed(seed, 1));
  core::Rng head_rng(core::mix_seed(seed, 3));
  encoder_ = Encoder<T>(unet_config_, enc_rng);
  head_ = ErpHead<T>(head, head_rng);
}

template <typename T>
BasicTensor<T> Classifier<T>::forward(const BasicTensor<T>& x, NormMode mode) {
  return forward(x, mode, mode);
}

template <typename T>
BasicTensor<T> Classifier<T>::forward(const BasicTensor<T>& x, NormMode encoder_mode,
                                      NormMode head_mode, bool track_encoder) {
  const auto xb = as_batched_input(x, unet_config_.in_channels);
  BasicTensor<T> bottleneck;
  if (track_encoder) {
    bottleneck = encoder_.forward(xb, encoder_mode).bottleneck;
  } else {
    core::NoGradGuard no_grad;
    bottleneck = encoder_.forward(xb, encoder_mode).bottleneck;
  }
  auto logits = head_.forward(bottleneck, head_mode);
  if (x.dim() == 2) logits = core::reshape(logits, {logits.size(1)});
  return logits;
}

template <typename T>
NamedTensors<T> Classifier<T>::named_tensors() const {
  NamedTensors<T> out;
  encoder_.collect(out);
  head_.collect(out);
  return out;
}

template <typename T>
NamedTensors<T> Classifier<T>::encoder_tensors() const {
  NamedTensors<T> out;
  encoder_.collect(out);
  return out;
}

template <typename T>
NamedTensors<T> Classifier<T>::head_tensors() const {
  NamedTensors<T> out;
  head_.collect(out);
  return out;
}

template <typename T>
double decision_score(const BasicTensor<T>& logits) {
  if (logits.numel() != 2) {
    throw DimensionError("decision_score: expected 2 logits, got " +
                         core::shape_str(logits.shape()));
  }
  return static_cast<double>(logits.at(1)) - static_cast<double>(logits.at(0));
}

template class ErpHead<float>;
template class ErpHead<double>;
template class Classifier<float>;
template class Classifier<double>;
template double decision_score(const BasicTensor<float>&);
template double decision_score(const BasicTensor<double>&);

}  // namespace spellerssl::model
