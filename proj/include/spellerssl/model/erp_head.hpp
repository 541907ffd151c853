#pragma once

#include <cstddef>
#include <cstdint>

#include "spellerssl/model/layers.hpp"
#include "spellerssl/model/unet.hpp"

namespace spellerssl::model {

struct HeadConfig {
  std::size_t bottleneck_channels = 128;
  std::size_t hidden = 128;
  std::size_t classes = 2;
  void validate() const;
};

// 1x1 projection + BatchNorm, depthwise k3, dilated depthwise k3 (d=2), 1x1
// fusion, each followed by GELU; mean over time; linear to logits.
// Parameters: head.proj., head.proj_bn., head.dw., head.dwd., head.fuse.,
// head.fc.
template <typename T>
class ErpHead {
 public:
  ErpHead() = default;
  ErpHead(const HeadConfig& config, core::Rng& rng);

  // b: [N, B, T] -> logits [N, classes]; [B, T] -> [classes].
  BasicTensor<T> forward(const BasicTensor<T>& b, NormMode mode);
  void collect(NamedTensors<T>& out) const;
  const HeadConfig& config() const { return config_; }

 private:
  HeadConfig config_;
  Conv1d<T> proj_;
  BatchNorm1d<T> proj_bn_;
  Conv1d<T> dw_;
  Conv1d<T> dwd_;
  Conv1d<T> fuse_;
  Linear<T> fc_;
};

// Encoder + ERP-Head. Encoder parameter names match the U-Net's so an SSL
// checkpoint loads with the "enc.,bottleneck." filter.
template <typename T>
class Classifier {
 public:
  Classifier() = default;
  Classifier(const UNetConfig& unet, const HeadConfig& head, std::uint64_t seed);

  BasicTensor<T> forward(const BasicTensor<T>& x, NormMode mode);
  // Separate norm modes; with track_encoder=false the encoder runs without a
  // tape (frozen encoder).
  BasicTensor<T> forward(const BasicTensor<T>& x, NormMode encoder_mode, NormMode head_mode,
                         bool track_encoder = true);

  NamedTensors<T> named_tensors() const;
  NamedTensors<T> encoder_tensors() const;
  NamedTensors<T> head_tensors() const;
  const UNetConfig& unet_config() const { return unet_config_; }
  const HeadConfig& head_config() const { return head_.config(); }

 private:
  UNetConfig unet_config_;
  Encoder<T> encoder_;
  ErpHead<T> head_;
};

// logit(P300) - logit(non-P300).
template <typename T>
double decision_score(const BasicTensor<T>& logits);

}  // namespace spellerssl::model
