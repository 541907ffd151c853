#include "spellerssl/signal/masking.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spellerssl/core/error.hpp"
#include "spellerssl/core/random.hpp"

namespace spellerssl::signal {

PaddedTensor pad_time_to_multiple(const core::Tensor& x, std::size_t m) {
  if (m == 0) throw ConfigError("pad_time_to_multiple: multiple must be >= 1");
  if (x.dim() < 1) throw DimensionError("pad_time_to_multiple: scalar input");
  const std::size_t len = x.shape().back();
  const std::size_t padded = (len + m - 1) / m * m;
  PaddedTensor out;
  out.original_length = len;
  if (padded == len) {
    out.tensor = x.detach();
    return out;
  }
  const std::size_t rows = len == 0 ? 0 : x.numel() / len;
  std::vector<float> v(rows * padded, 0.0f);
  auto src = x.values();
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(src.data() + r * len, len, v.data() + r * padded);
  }
  core::Shape shape = x.shape();
  shape.back() = padded;
  out.tensor = core::Tensor(std::move(shape), std::move(v));
  return out;
}

core::Tensor unpad_time(const core::Tensor& x, std::size_t original_length) {
  if (x.dim() < 1) throw DimensionError("unpad_time: scalar input");
  const std::size_t len = x.shape().back();
  if (original_length > len) {
    throw DimensionError("unpad_time: original length " + std::to_string(original_length) +
                         " exceeds time axis " + std::to_string(len));
  }
  const std::size_t rows = len == 0 ? 0 : x.numel() / len;
  std::vector<float> v(rows * original_length);
  auto src = x.values();
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(src.data() + r * len, original_length, v.data() + r * original_length);
  }
  core::Shape shape = x.shape();
  shape.back() = original_length;
  return core::Tensor(std::move(shape), std::move(v));
}

void MaskSpec::validate(std::size_t length) const {
  if (!(time_mask_ratio >= 0.0 && time_mask_ratio <= 1.0)) {
    throw ConfigError("mask: time_mask_ratio must lie in [0, 1]");
  }
  if (!(channel_mask_ratio >= 0.0 && channel_mask_ratio <= 1.0)) {
    throw ConfigError("mask: channel_mask_ratio must lie in [0, 1]");
  }
  if (channel_mask_ratio != 0.0) {
    throw ConfigError("mask: channel masking is not supported (ratio must be 0)");
  }
  if (block_length == 0 || block_length > length) {
    throw ConfigError("mask: block_length " + std::to_string(block_length) +
                      " cannot tile a sequence of length " + std::to_string(length));
  }
}

std::size_t MaskSpec::masked_count(std::size_t length) const {
  return static_cast<std::size_t>(std::llround(time_mask_ratio * static_cast<double>(length)));
}

std::vector<std::uint8_t> sample_time_mask(std::size_t length, const MaskSpec& spec) {
  spec.validate(length);
  std::vector<std::uint8_t> mask(length, 0);
  const std::size_t masked = spec.masked_count(length);
  if (masked == 0) return mask;
  const std::size_t b = spec.block_length;
  const std::size_t blocks = (masked + b - 1) / b;
  const std::size_t short_len = masked - (blocks - 1) * b;
  const std::size_t free = length - masked;

  core::Rng rng(spec.seed);
  // Stars and bars: choose `blocks` bar positions among free + blocks slots.
  const std::size_t slots = free + blocks;
  std::vector<std::size_t> bars;
  bars.reserve(blocks);
  std::vector<std::uint8_t> taken(slots, 0);
  for (std::size_t j = slots - blocks; j < slots; ++j) {  // Floyd's sampling
    const std::size_t t = rng.below(j + 1);
    const std::size_t pick = taken[t] ? j : t;
    taken[pick] = 1;
  }
  for (std::size_t i = 0; i < slots; ++i)
    if (taken[i]) bars.push_back(i);
  const std::size_t short_block = rng.below(blocks);

  std::size_t pos = 0;
  for (std::size_t k = 0; k < blocks; ++k) {
    const std::size_t gap = bars[k] - (k == 0 ? 0 : bars[k - 1] + 1);
    pos += gap;
    const std::size_t len = k == short_block ? short_len : b;
    std::fill_n(mask.begin() + static_cast<std::ptrdiff_t>(pos), len, std::uint8_t{1});
    pos += len;
  }
  // A random circular shift removes the edge bias of the linear composition,
  // so every timestep is masked with probability masked / length.
  std::rotate(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(rng.below(length)),
              mask.end());
  return mask;
}

void apply_time_mask(std::span<float> data, std::size_t channels,
                     std::span<const std::uint8_t> mask) {
  const std::size_t len = mask.size();
  if (data.size() != channels * len) {
    throw DimensionError("apply_time_mask: buffer of " + std::to_string(data.size()) +
                         " values is not " + std::to_string(channels) + " x " +
                         std::to_string(len));
  }
  for (std::size_t c = 0; c < channels; ++c)
    for (std::size_t t = 0; t < len; ++t)
      if (mask[t]) data[c * len + t] = 0.0f;
}

MaskedTensor mask_time(const core::Tensor& x, const MaskSpec& spec) {
  if (x.dim() != 2) {
    throw DimensionError("mask_time: expected [C, L], got " + core::shape_str(x.shape()));
  }
  MaskedTensor out;
  out.mask = sample_time_mask(x.size(1), spec);
  out.masked = x.detach();
  apply_time_mask(out.masked.values(), x.size(0), out.mask);
  return out;
}

}  // namespace spellerssl::signal
