#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spellerssl/core/tensor.hpp"

namespace spellerssl::signal {

struct PaddedTensor {
  core::Tensor tensor;
  std::size_t original_length = 0;
};

// Zero-pads the last (time) axis of [C, L] or [N, C, L] up to the next
// multiple of m.
PaddedTensor pad_time_to_multiple(const core::Tensor& x, std::size_t m = 16);

// Drops trailing time samples beyond `original_length`.
core::Tensor unpad_time(const core::Tensor& x, std::size_t original_length);

struct MaskSpec {
  double time_mask_ratio = 0.5;
  double channel_mask_ratio = 0.0;
  std::size_t block_length = 8;
  std::uint64_t seed = 0;

  void validate(std::size_t length) const;
  std::size_t masked_count(std::size_t length) const;
};

// Per-timestep mask of length L covering exactly round(ratio * L) steps with
// non-overlapping blocks of block_length (the last block may be shorter).
// Block positions are a uniformly random composition of the unmasked steps
// into the gaps between blocks, rotated by a random offset; a block may wrap
// from the end of the sequence to its start.
std::vector<std::uint8_t> sample_time_mask(std::size_t length, const MaskSpec& spec);

// Zeroes masked timesteps of a channel-major [C, L] buffer in place.
void apply_time_mask(std::span<float> data, std::size_t channels,
                     std::span<const std::uint8_t> mask);

struct MaskedTensor {
  core::Tensor masked;
  std::vector<std::uint8_t> mask;
};

// x: [C, L]. Unmasked samples are copied bit-for-bit.
MaskedTensor mask_time(const core::Tensor& x, const MaskSpec& spec);

}  // namespace spellerssl::signal
