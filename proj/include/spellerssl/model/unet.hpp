#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

#include "spellerssl/model/layers.hpp"

namespace spellerssl::model {

struct UNetConfig {
  std::size_t in_channels = 8;
  std::size_t base_width = 64;
  double width_multiplier = 1.0;

  // Width of ladder level 0..4: base * 2^level * multiplier, at least 1.
  std::size_t level_width(std::size_t level) const;
  std::size_t bottleneck_channels() const { return level_width(4); }
  void validate() const;
};

template <typename T>
struct EncoderOutput {
  std::array<BasicTensor<T>, 4> skips;  // stage outputs before pooling
  BasicTensor<T> bottleneck;            // [N, B, L/16]
};

template <typename T>
struct UNetOutput {
  BasicTensor<T> reconstruction;  // same shape as the input
  BasicTensor<T> bottleneck;
};

// Four double-conv stages with 2/2 max pooling, a double-conv bottleneck.
// Parameters are named enc.1. .. enc.4. and bottleneck.
template <typename T>
class Encoder {
 public:
  Encoder() = default;
  Encoder(const UNetConfig& config, core::Rng& rng);

  // x: [N, C, L] with L a multiple of 16.
  EncoderOutput<T> forward(const BasicTensor<T>& x, NormMode mode);
  void collect(NamedTensors<T>& out) const;
  const UNetConfig& config() const { return config_; }

 private:
  UNetConfig config_;
  std::array<DoubleConv<T>, 4> stages_;
  DoubleConv<T> bottleneck_;
};

// Transposed-conv upsampling, concatenation with the matching skip, double
// conv; then a 1x1 projection back to C. Parameters: dec.4. .. dec.1., final.
template <typename T>
class Decoder {
 public:
  Decoder() = default;
  Decoder(const UNetConfig& config, core::Rng& rng);

  BasicTensor<T> forward(const EncoderOutput<T>& enc, NormMode mode);
  void collect(NamedTensors<T>& out) const;

 private:
  std::array<ConvTranspose1d<T>, 4> up_;
  std::array<DoubleConv<T>, 4> conv_;
  Conv1d<T> final_;
};

template <typename T>
class UNet {
 public:
  UNet() = default;
  UNet(const UNetConfig& config, std::uint64_t seed);

  // x: [N, C, L] or [C, L]; the output keeps the input rank.
  UNetOutput<T> forward(const BasicTensor<T>& x, NormMode mode);
  BasicTensor<T> encoder_forward(const BasicTensor<T>& x, NormMode mode);

  NamedTensors<T> named_tensors() const;
  const UNetConfig& config() const { return config_; }
  Encoder<T>& encoder() { return encoder_; }

 private:
  UNetConfig config_;
  Encoder<T> encoder_;
  Decoder<T> decoder_;
};

// Lifts [C, L] to [1, C, L] and checks the time axis; shared with the
// classifier.
template <typename T>
BasicTensor<T> as_batched_input(const BasicTensor<T>& x, std::size_t channels);

}  // namespace spellerssl::model
